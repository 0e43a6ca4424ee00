#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace bnet {

// Deterministic random source. The mt19937_64 engine is pinned by the C++
// standard, but the std:: distributions are not, so every draw type we need
// is implemented here to keep outputs byte-stable across library versions.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Independent stream for a labelled subtask. Each (n, replicate) cell of an
  // experiment gets its own stream so results do not depend on scheduling.
  static Rng child(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                   std::uint64_t c = 0);

  std::uint64_t bits() { return eng_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller; the second coordinate is cached.
  double normal();

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Standard Laplace (density exp(-|x|)/2).
  double laplace();

  // Uniform integer in [0, n). Modulo bias is ~n/2^64, irrelevant here.
  std::uint64_t index(std::uint64_t n) { return bits() % n; }

  // k distinct values from {0, ..., n-1} in sorted order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

  // Random sign, +1 or -1.
  double sign() { return (bits() & 1) ? 1.0 : -1.0; }

private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bnet
