#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "gcm/frechet.hpp"

namespace gcm::testsupport {

/// Brute-force Fréchet distance in extended precision: forms the
/// (nonsymmetric) product Sigma1*Sigma2 in long double and takes the trace of
/// its square root through a general eigendecomposition — a different
/// algorithm and precision than the library's symmetric route.
long double frechet_distance_bruteforce(const gcm::GaussianStats& a, const gcm::GaussianStats& b);

/// Random SPD stats of dimension d: Q diag(lambda) Q^T with a Haar-ish Q from
/// the QR of a Gaussian matrix and eigenvalues in [0.1, 3].
gcm::GaussianStats random_spd_stats(int dim, std::uint64_t seed);

}  // namespace gcm::testsupport
