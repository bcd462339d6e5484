#pragma once

#include <Eigen/Core>

#include <functional>
#include <span>
#include <string>

#include "gcm/types.hpp"

namespace gcm {

/// First and second moments of a feature distribution.
struct GaussianStats {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
    int count = 0;
};

/// Sample mean and unbiased sample covariance (divisor count-1), symmetrized
/// as (C + C^T)/2. Requires at least 2 vectors of equal dimension.
GaussianStats gaussian_stats(std::span<const FeatureVector> features);

/// |mu1 - mu2|^2 + Tr(Sigma1 + Sigma2 - 2 (Sigma1 Sigma2)^{1/2}).
/// The product square root is evaluated through the symmetric route
/// sqrt(A Sigma2 A) with A = Sigma1^{1/2}, both square roots by
/// self-adjoint eigendecomposition with eigenvalues clamped at zero.
/// Tiny negative results (> -1e-8) clamp to 0; covariances whose most
/// negative eigenvalue is below -1e-6 times the largest raise
/// numerical_error.
double frechet_distance(const GaussianStats& a, const GaussianStats& b);

/// Pluggable feature extractor for FID. The default pipeline wraps the
/// trained contrastive encoder; real-data users can substitute a pretrained
/// classifier. `name` is recorded in reports so FIDs stay comparable.
struct FeatureExtractor {
    std::string name;
    std::function<FeatureVector(const ImageGrid&)> extract;
};

/// Fréchet distance between Gaussian fits of the two image sets' features.
double fid(std::span<const ImageGrid> reference_images, std::span<const ImageGrid> eval_images,
           const FeatureExtractor& extractor);

}  // namespace gcm
