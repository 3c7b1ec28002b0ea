#pragma once

#include <cstdint>
#include <random>

namespace evomarket {

/// Seeded random stream used by every stochastic component.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The variate transforms are implemented here rather than taken
/// from <random>, because the standard distributions are allowed to differ
/// between library implementations and runs must be byte-reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1).
  double uniform_open() {
    return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
  }

  /// Standard normal (Marsaglia polar method).
  double normal();

  double exponential(double mean);

  /// Seed of the index-th independent child stream of a base seed.
  static std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace evomarket
