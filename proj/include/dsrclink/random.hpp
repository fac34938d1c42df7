#pragma once

#include <cstdint>
#include <random>

namespace dsrclink {

/// Deterministic RNG used everywhere randomness is needed. The integer and
/// Gaussian draws are implemented explicitly (rejection sampling and
/// Box-Muller) instead of through std distributions, whose output is
/// implementation-defined; identical seeds must give identical streams.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform integer in [0, bound), bound >= 1, unbiased.
    std::uint32_t uniform_int(std::uint32_t bound);

    /// Uniform double in [0, 1) with 53-bit resolution.
    double uniform_double();

    /// Standard normal deviate (Box-Muller, spare cached).
    double gaussian();

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Mixes a master seed with a stream index so parallel runs (sweep points,
/// ablation cells) own independent deterministic streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

} // namespace dsrclink
