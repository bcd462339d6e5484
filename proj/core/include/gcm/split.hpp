#pragma once

#include <cstdint>
#include <vector>

#include "gcm/types.hpp"

namespace gcm {

struct SplitFractions {
    double train = 0.8;
    double val = 0.1;
    double test = 0.1;
};

/// Assigns each record a split via a seeded shuffle. Sizes are
/// floor(n * val) and floor(n * test), with the remainder going to train
/// (the largest split). Record order is left untouched; only the split
/// fields change. Throws if the fractions are not positive or do not sum
/// to 1 within 1e-9.
void split_dataset(std::vector<SubjectRecord>& records, const SplitFractions& fractions,
                   std::uint64_t seed);

}  // namespace gcm
