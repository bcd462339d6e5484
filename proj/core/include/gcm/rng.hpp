#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace gcm {

/// splitmix64 mix; decorrelates nearby seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Combines a base seed with a stream index into an independent child seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Deterministic random source. std::mt19937_64 is fully specified by the
/// standard, but the std distributions are not, so every draw here is
/// implemented by hand. Fixed seed -> identical streams on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n). Rejection-sampled, bias-free.
    std::uint64_t uniform_int(std::uint64_t n);

    /// Standard normal via Box-Muller (pairs consumed in order).
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Fisher-Yates shuffle with this stream.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace gcm
