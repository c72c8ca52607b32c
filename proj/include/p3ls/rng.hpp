#pragma once

#include <cstdint>
#include <random>

namespace p3ls {

/// Deterministic random stream. The engine is std::mt19937_64 (fully
/// specified by the standard) and all distribution transforms are implemented
/// here, so a given seed yields the same draws on every platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; consumes exactly two uniforms per draw.
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Poisson draw; inversion for small means, Hoermann's transformed
  /// rejection (PTRS) for large ones.
  long poisson(double mean);

  /// Stateless stream split: seed for the index-th substream of base.
  static std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

private:
  std::mt19937_64 engine_;
};

}  // namespace p3ls
