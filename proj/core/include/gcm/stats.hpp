#pragma once

#include <span>
#include <vector>

namespace gcm {

/// dot(a,b) / (|a| |b|), in [-1, 1] within floating tolerance.
/// Throws invalid_input_error on dimension mismatch or a zero-norm input
/// (a zero norm signals a degenerate embedding upstream).
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Maps each value to (v - min) / (max - min). A constant list maps to all
/// zeros: a constant pool carries no ranking signal, and zero is the
/// conservative "no inconsistency" value. Throws on an empty list.
std::vector<double> minmax_normalize(std::span<const double> values);

/// Standard Pearson r. Requires equal lengths >= 3 and nonzero variance in
/// both inputs; throws invalid_input_error otherwise.
double pearson_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace gcm
