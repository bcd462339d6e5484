#include <benchmark/benchmark.h>

#include <Eigen/Core>

#include "gcm/encoder.hpp"
#include "gcm/frechet.hpp"
#include "gcm/rng.hpp"
#include "gcm/stats.hpp"

namespace {

gcm::GaussianStats random_stats(int dim, std::uint64_t seed) {
    gcm::Rng rng(seed);
    Eigen::MatrixXd g(dim, dim);
    for (int i = 0; i < g.size(); ++i) g.data()[i] = rng.normal();
    gcm::GaussianStats s;
    s.covariance = g * g.transpose() / dim + Eigen::MatrixXd::Identity(dim, dim) * 0.1;
    s.mean = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < dim; ++i) s.mean[i] = rng.uniform(-1.0, 1.0);
    s.count = 2 * dim;
    return s;
}

void FrechetDistance(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    const auto a = random_stats(dim, 1);
    const auto b = random_stats(dim, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gcm::frechet_distance(a, b));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(FrechetDistance)->RangeMultiplier(2)->Range(8, 128)->Complexity();

void NtXentLoss(benchmark::State& state) {
    const int pairs = static_cast<int>(state.range(0));
    gcm::Rng rng(3);
    Eigen::MatrixXd z(32, 2 * pairs);
    for (int i = 0; i < z.size(); ++i) z.data()[i] = rng.uniform(-1.0, 1.0);
    Eigen::MatrixXd grad;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gcm::nt_xent_loss(z, 0.5, &grad));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(NtXentLoss)->RangeMultiplier(2)->Range(8, 128)->Complexity();

void CosineSimilarity(benchmark::State& state) {
    gcm::Rng rng(4);
    std::vector<double> a(256), b(256);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = rng.uniform(-1.0, 1.0);
        b[i] = rng.uniform(-1.0, 1.0);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(gcm::cosine_similarity(a, b));
    }
}
BENCHMARK(CosineSimilarity);

void PearsonCorrelation(benchmark::State& state) {
    gcm::Rng rng(5);
    std::vector<double> x(4096), y(4096);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.uniform(-1.0, 1.0);
        y[i] = 0.3 * x[i] + rng.uniform(-1.0, 1.0);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(gcm::pearson_correlation(x, y));
    }
}
BENCHMARK(PearsonCorrelation);

}  // namespace
