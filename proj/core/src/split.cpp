#include "gcm/split.hpp"

#include <cmath>
#include <numeric>

#include "gcm/rng.hpp"

namespace gcm {

void split_dataset(std::vector<SubjectRecord>& records, const SplitFractions& fractions,
                   std::uint64_t seed) {
    if (fractions.train <= 0.0 || fractions.val <= 0.0 || fractions.test <= 0.0) {
        throw invalid_input_error("split_dataset: fractions must be positive");
    }
    const double sum = fractions.train + fractions.val + fractions.test;
    if (std::abs(sum - 1.0) > 1e-9) {
        throw invalid_input_error("split_dataset: fractions sum to " + std::to_string(sum) +
                                  ", expected 1");
    }

    const std::size_t n = records.size();
    const std::size_t n_val = static_cast<std::size_t>(std::floor(n * fractions.val));
    const std::size_t n_test = static_cast<std::size_t>(std::floor(n * fractions.test));
    const std::size_t n_train = n - n_val - n_test;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    for (std::size_t pos = 0; pos < n; ++pos) {
        Split s = Split::test;
        if (pos < n_train) {
            s = Split::train;
        } else if (pos < n_train + n_val) {
            s = Split::val;
        }
        records[order[pos]].split = s;
    }
}

}  // namespace gcm
