#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace nfbeam {

/// Seeded random source used throughout the simulator.
///
/// The engine is std::mt19937_64; uniform and Gaussian variates are derived
/// from its raw 64-bit output with fixed formulas, so a seed gives the same
/// stream on every standard library (std::normal_distribution does not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n);

  double normal();

  /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  std::complex<double> complex_normal(double variance);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Mixes a master seed with a list of integer tags into an independent seed.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags);

}  // namespace nfbeam
