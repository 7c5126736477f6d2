#pragma once

#include <cstdint>
#include <random>

namespace hstbeam {

/// splitmix64 step; used to derive well-separated seeds from (seed, tag) pairs.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// A named, forkable random stream. Every stochastic component owns its own
/// stream so that runs are reproducible regardless of evaluation order.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : seed_(splitmix64(seed)), engine_(seed_) {}

    /// Derive an independent stream keyed by (this stream's seed, tag).
    /// Forking does not disturb this stream's state.
    RngStream fork(std::uint64_t tag) const { return RngStream(seed_ ^ splitmix64(~tag)); }

    double uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    double gaussian(double mean, double stddev) {
        return mean + stddev * std::normal_distribution<double>(0.0, 1.0)(engine_);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Truncated Gaussian via rejection; bounds are inclusive.
    double truncated_gaussian(double mean, double stddev, double lo, double hi) {
        for (;;) {
            const double x = gaussian(mean, stddev);
            if (x >= lo && x <= hi) return x;
        }
    }

    std::mt19937_64& engine() { return engine_; }

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace hstbeam
