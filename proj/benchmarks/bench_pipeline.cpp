#include <benchmark/benchmark.h>

#include "gcm/encoder.hpp"
#include "gcm/phantom.hpp"
#include "gcm/referee.hpp"
#include "gcm/views.hpp"

namespace {

gcm::PhantomConfig bench_config() {
    gcm::PhantomConfig cfg;
    cfg.seed = 1;
    cfg.noise_level = 0.02;
    return cfg;
}

void GeneratePhantom(benchmark::State& state) {
    const auto cfg = bench_config();
    const gcm::AttributeVector attrs{55.0, 27.5, 27.5};
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gcm::generate_phantom(attrs, cfg, seed++));
    }
}
BENCHMARK(GeneratePhantom);

void BuildEvalSets(benchmark::State& state) {
    const auto cohort = gcm::generate_cohort(static_cast<int>(state.range(0)), bench_config());
    for (auto _ : state) {
        benchmark::DoNotOptimize(gcm::build_eval_sets(cohort, 3));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BuildEvalSets)->Range(8, 64)->Complexity();

void RefereeInference(benchmark::State& state) {
    const auto cohort = gcm::generate_cohort(16, bench_config());
    gcm::RefereeTrainConfig tc;
    tc.epochs = 1;
    const auto model = gcm::train_referee(cohort, gcm::Attribute::bmi, gcm::Side::superior, tc);
    const auto view = gcm::referee_view(cohort.front().image, gcm::Side::superior, 0.10);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gcm::predict_attribute(model, view));
    }
}
BENCHMARK(RefereeInference);

void EncoderEmbedding(benchmark::State& state) {
    const auto cohort = gcm::generate_cohort(16, bench_config());
    gcm::ContrastiveTrainConfig tc;
    tc.epochs = 1;
    tc.batch_size = 8;
    const auto model = gcm::train_encoder(cohort, tc);
    const auto view = gcm::referee_view(cohort.front().image, gcm::Side::superior, 0.10);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gcm::embed(model, view));
    }
}
BENCHMARK(EncoderEmbedding);

}  // namespace
