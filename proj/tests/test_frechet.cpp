#include <doctest.h>

#include <cmath>

#include "gcm/frechet.hpp"
#include "gcm/rng.hpp"
#include "support/frechet_oracle.hpp"

using namespace gcm;
using testsupport::frechet_distance_bruteforce;
using testsupport::random_spd_stats;

TEST_CASE("gaussian stats: hand-computed two-point case") {
    // Oracle: mean (1,1); covariance with divisor n-1 = [[2,2],[2,2]].
    std::vector<FeatureVector> features{{0.0, 0.0}, {2.0, 2.0}};
    const auto stats = gaussian_stats(features);
    CHECK(stats.count == 2);
    CHECK(stats.mean[0] == doctest::Approx(1.0));
    CHECK(stats.mean[1] == doctest::Approx(1.0));
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) CHECK(stats.covariance(i, j) == doctest::Approx(2.0));
    }
}

TEST_CASE("gaussian stats: repeated vector has zero covariance") {
    std::vector<FeatureVector> features(5, FeatureVector{1.5, -2.0, 3.0});
    const auto stats = gaussian_stats(features);
    CHECK(stats.covariance.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("gaussian stats: seeded normal draws approach identity") {
    Rng rng(101);
    std::vector<FeatureVector> features;
    for (int i = 0; i < 10000; ++i) {
        features.push_back({rng.normal(), rng.normal()});
    }
    const auto stats = gaussian_stats(features);
    CHECK(std::abs(stats.mean[0]) < 0.05);
    CHECK(std::abs(stats.mean[1]) < 0.05);
    CHECK(stats.covariance(0, 0) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(stats.covariance(1, 1) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(std::abs(stats.covariance(0, 1)) < 0.05);
}

TEST_CASE("gaussian stats input validation") {
    CHECK_THROWS_AS(gaussian_stats(std::vector<FeatureVector>{{1.0, 2.0}}), invalid_input_error);
    CHECK_THROWS_AS(gaussian_stats(std::vector<FeatureVector>{{1.0}, {1.0, 2.0}}),
                    invalid_input_error);
}

TEST_CASE("frechet distance closed forms") {
    SUBCASE("identical stats give zero") {
        const auto stats = random_spd_stats(4, 5);
        CHECK(frechet_distance(stats, stats) == doctest::Approx(0.0).epsilon(1e-8));
    }
    SUBCASE("identity covariances reduce to the mean term") {
        GaussianStats a, b;
        a.mean = Eigen::Vector2d(0.0, 0.0);
        b.mean = Eigen::Vector2d(3.0, 4.0);
        a.covariance = Eigen::Matrix2d::Identity();
        b.covariance = Eigen::Matrix2d::Identity();
        a.count = b.count = 10;
        CHECK(frechet_distance(a, b) == doctest::Approx(25.0).epsilon(1e-8));
    }
    SUBCASE("diagonal case matches sum of (s1 + s2 - 2 sqrt(s1 s2))") {
        GaussianStats a, b;
        a.mean = Eigen::Vector2d::Zero();
        b.mean = Eigen::Vector2d::Zero();
        a.covariance = Eigen::Vector2d(1.0, 1.0).asDiagonal();
        b.covariance = Eigen::Vector2d(4.0, 9.0).asDiagonal();
        a.count = b.count = 10;
        CHECK(frechet_distance(a, b) == doctest::Approx(5.0).epsilon(1e-8));
    }
}

TEST_CASE("frechet distance matches the extended-precision brute-force oracle") {
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const int dim = 2 + static_cast<int>(rng.uniform_int(7));  // D <= 8
        const auto a = random_spd_stats(dim, derive_seed(555, static_cast<std::uint64_t>(trial) * 2));
        const auto b =
            random_spd_stats(dim, derive_seed(555, static_cast<std::uint64_t>(trial) * 2 + 1));
        const double ours = frechet_distance(a, b);
        const double oracle = static_cast<double>(frechet_distance_bruteforce(a, b));
        CHECK(ours == doctest::Approx(oracle).epsilon(1e-6));
    }
}

TEST_CASE("frechet distance is symmetric and zero on self") {
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = random_spd_stats(5, derive_seed(777, static_cast<std::uint64_t>(trial) * 2));
        const auto b =
            random_spd_stats(5, derive_seed(777, static_cast<std::uint64_t>(trial) * 2 + 1));
        const double ab = frechet_distance(a, b);
        const double ba = frechet_distance(b, a);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-8));
        CHECK(frechet_distance(a, a) <= 1e-8);
    }
}

TEST_CASE("frechet distance input validation") {
    const auto a = random_spd_stats(3, 1);
    const auto b = random_spd_stats(4, 2);
    CHECK_THROWS_AS(frechet_distance(a, b), invalid_input_error);

    GaussianStats indefinite = random_spd_stats(3, 3);
    indefinite.covariance(0, 0) = -1.0;
    CHECK_THROWS_AS(frechet_distance(indefinite, a), numerical_error);
}

TEST_CASE("fid of a set against itself is zero") {
    // A simple deterministic extractor: 4 image moments.
    FeatureExtractor extractor;
    extractor.name = "moments";
    extractor.extract = [](const ImageGrid& img) {
        double sum = 0.0, sumsq = 0.0, top = 0.0, left = 0.0;
        for (int r = 0; r < img.height; ++r) {
            for (int c = 0; c < img.width; ++c) {
                const double v = img.at(r, c);
                sum += v;
                sumsq += v * v;
                if (r < img.height / 2) top += v;
                if (c < img.width / 2) left += v;
            }
        }
        return FeatureVector{sum, sumsq, top, left};
    };

    Rng rng(8);
    std::vector<ImageGrid> images;
    for (int i = 0; i < 12; ++i) {
        ImageGrid img(6, 6);
        for (double& v : img.pixels) v = rng.uniform01();
        images.push_back(std::move(img));
    }
    CHECK(fid(images, images, extractor) == doctest::Approx(0.0).epsilon(1e-8));

    std::vector<ImageGrid> one(images.begin(), images.begin() + 1);
    CHECK_THROWS_AS(fid(one, images, extractor), invalid_input_error);
}
