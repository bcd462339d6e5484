#include "support/frechet_oracle.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <complex>

#include "gcm/rng.hpp"

namespace gcm::testsupport {

using MatrixXl = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXl = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

long double frechet_distance_bruteforce(const gcm::GaussianStats& a, const gcm::GaussianStats& b) {
    const int d = static_cast<int>(a.mean.size());
    MatrixXl s1 = a.covariance.cast<long double>();
    MatrixXl s2 = b.covariance.cast<long double>();
    VectorXl dmu = (a.mean - b.mean).cast<long double>();

    // Product of two SPD matrices is similar to an SPD matrix, so its
    // eigenvalues are real and non-negative; sum their square roots.
    const MatrixXl product = s1 * s2;
    Eigen::EigenSolver<MatrixXl> solver(product);
    long double trace_sqrt = 0.0L;
    for (int i = 0; i < d; ++i) {
        const std::complex<long double> ev = solver.eigenvalues()[i];
        const long double real = ev.real() > 0.0L ? ev.real() : 0.0L;
        trace_sqrt += std::sqrt(real);
    }
    return dmu.squaredNorm() + s1.trace() + s2.trace() - 2.0L * trace_sqrt;
}

gcm::GaussianStats random_spd_stats(int dim, std::uint64_t seed) {
    gcm::Rng rng(seed);
    Eigen::MatrixXd gaussian(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) gaussian(i, j) = rng.normal();
    }
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian);
    Eigen::MatrixXd q = qr.householderQ();

    Eigen::VectorXd eigenvalues(dim);
    for (int i = 0; i < dim; ++i) eigenvalues[i] = rng.uniform(0.1, 3.0);

    gcm::GaussianStats stats;
    stats.covariance = q * eigenvalues.asDiagonal() * q.transpose();
    stats.covariance = 0.5 * (stats.covariance + stats.covariance.transpose());
    stats.mean.resize(dim);
    for (int i = 0; i < dim; ++i) stats.mean[i] = rng.uniform(-2.0, 2.0);
    stats.count = 2 * dim;
    return stats;
}

}  // namespace gcm::testsupport
