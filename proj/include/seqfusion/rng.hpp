#pragma once

#include <cstdint>
#include <random>

namespace seqfusion {

/// Deterministic random source. Every distribution is derived from the
/// mt19937_64 stream with fixed algorithms (53-bit uniforms, Marsaglia
/// polar normals, Marsaglia-Tsang gamma), so a seed pins the exact output
/// sequence across platforms and toolchains; frozen test fixtures rely on
/// that. std::gamma_distribution would not give this guarantee.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n); n must be a small positive count.
    int next_below(int n) {
        const int k = static_cast<int>(next_double() * n);
        return k < n ? k : n - 1;
    }

    double next_normal();

    /// Gamma(alpha, 1) for any alpha > 0.
    double next_gamma(double alpha);

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace seqfusion
