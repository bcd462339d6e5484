#include "gcm/stats.hpp"

#include <algorithm>
#include <cmath>

#include "gcm/error.hpp"

namespace gcm {

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw invalid_input_error("cosine_similarity: dimension mismatch (" +
                                  std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
    if (a.empty()) throw invalid_input_error("cosine_similarity: empty vectors");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) {
        throw invalid_input_error("cosine_similarity: zero-norm input (degenerate embedding)");
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<double> minmax_normalize(std::span<const double> values) {
    if (values.empty()) throw invalid_input_error("minmax_normalize: empty list");
    for (double v : values) {
        if (!std::isfinite(v)) throw invalid_input_error("minmax_normalize: non-finite value");
    }
    const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
    const double mn = *mn_it, mx = *mx_it;
    std::vector<double> out(values.size(), 0.0);
    if (mx == mn) return out;  // constant list -> all zeros
    const double inv = 1.0 / (mx - mn);
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mn) * inv;
    return out;
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw invalid_input_error("pearson_correlation: length mismatch");
    }
    if (x.size() < 3) {
        throw invalid_input_error("pearson_correlation: need at least 3 samples, got " +
                                  std::to_string(x.size()));
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw invalid_input_error("pearson_correlation: zero variance, correlation undefined");
    }
    return sxy / (std::sqrt(sxx) * std::sqrt(syy));
}

}  // namespace gcm
