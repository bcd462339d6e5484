#include "gcm/frechet.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

#include "gcm/error.hpp"

namespace gcm {
namespace {

constexpr double kIndefiniteTolerance = 1e-6;
constexpr double kNegativeClamp = -1e-8;

/// Symmetric PSD square root by eigendecomposition, eigenvalues clamped at 0.
/// Throws if the matrix is indefinite beyond tolerance.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m, const char* what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) {
        throw numerical_error(std::string("frechet_distance: eigendecomposition failed for ") + what);
    }
    const Eigen::VectorXd& evals = solver.eigenvalues();
    const double largest = std::max(evals.maxCoeff(), 0.0);
    if (evals.minCoeff() < -kIndefiniteTolerance * std::max(largest, 1.0)) {
        throw numerical_error(std::string("frechet_distance: ") + what +
                              " is indefinite beyond tolerance (min eigenvalue " +
                              std::to_string(evals.minCoeff()) + ")");
    }
    const Eigen::VectorXd clamped = evals.cwiseMax(0.0).cwiseSqrt();
    return solver.eigenvectors() * clamped.asDiagonal() * solver.eigenvectors().transpose();
}

void check_stats(const GaussianStats& s, const char* which) {
    if (s.mean.size() == 0 || s.covariance.rows() != s.mean.size() ||
        s.covariance.cols() != s.mean.size()) {
        throw invalid_input_error(std::string("frechet_distance: malformed stats for ") + which);
    }
    const double asym = (s.covariance - s.covariance.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9 * std::max(1.0, s.covariance.cwiseAbs().maxCoeff())) {
        throw invalid_input_error(std::string("frechet_distance: covariance of ") + which +
                                  " is not symmetric");
    }
}

}  // namespace

GaussianStats gaussian_stats(std::span<const FeatureVector> features) {
    if (features.size() < 2) {
        throw invalid_input_error("gaussian_stats: need at least 2 samples, got " +
                                  std::to_string(features.size()));
    }
    const std::size_t dim = features.front().size();
    if (dim == 0) throw invalid_input_error("gaussian_stats: empty feature vectors");
    for (const auto& f : features) {
        if (f.size() != dim) throw invalid_input_error("gaussian_stats: feature dimension mismatch");
    }

    const int n = static_cast<int>(features.size());
    const int d = static_cast<int>(dim);
    Eigen::MatrixXd data(d, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) data(j, i) = features[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }

    GaussianStats stats;
    stats.count = n;
    stats.mean = data.rowwise().mean();
    const Eigen::MatrixXd centered = data.colwise() - stats.mean;
    Eigen::MatrixXd cov = centered * centered.transpose() / static_cast<double>(n - 1);
    stats.covariance = 0.5 * (cov + cov.transpose());
    return stats;
}

double frechet_distance(const GaussianStats& a, const GaussianStats& b) {
    check_stats(a, "a");
    check_stats(b, "b");
    if (a.mean.size() != b.mean.size()) {
        throw invalid_input_error("frechet_distance: dimension mismatch (" +
                                  std::to_string(a.mean.size()) + " vs " +
                                  std::to_string(b.mean.size()) + ")");
    }

    const double mean_term = (a.mean - b.mean).squaredNorm();

    // Tr((S1 S2)^{1/2}) = Tr((A S2 A)^{1/2}) with A = S1^{1/2}; the inner
    // matrix is symmetric PSD, so the whole route stays self-adjoint.
    const Eigen::MatrixXd root_a = psd_sqrt(a.covariance, "covariance a");
    const Eigen::MatrixXd inner = root_a * b.covariance * root_a;
    const Eigen::MatrixXd sym_inner = 0.5 * (inner + inner.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym_inner);
    if (solver.info() != Eigen::Success) {
        throw numerical_error("frechet_distance: eigendecomposition failed for product term");
    }
    const double trace_sqrt = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();

    double dist = mean_term + a.covariance.trace() + b.covariance.trace() - 2.0 * trace_sqrt;
    if (dist < 0.0) {
        if (dist < kNegativeClamp) {
            throw numerical_error("frechet_distance: negative distance " + std::to_string(dist) +
                                  " beyond clamp tolerance");
        }
        dist = 0.0;
    }
    return dist;
}

double fid(std::span<const ImageGrid> reference_images, std::span<const ImageGrid> eval_images,
           const FeatureExtractor& extractor) {
    if (reference_images.size() < 2 || eval_images.size() < 2) {
        throw invalid_input_error("fid: both image sets need at least 2 images");
    }
    if (!extractor.extract) throw config_error("fid: feature extractor not set");

    auto featurize = [&](std::span<const ImageGrid> images) {
        std::vector<FeatureVector> features;
        features.reserve(images.size());
        for (const auto& img : images) features.push_back(extractor.extract(img));
        return features;
    };
    const auto ref_features = featurize(reference_images);
    const auto eval_features = featurize(eval_images);
    return frechet_distance(gaussian_stats(ref_features), gaussian_stats(eval_features));
}

}  // namespace gcm
