#include "bnet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace bnet {

namespace {

// splitmix64 finalizer, used only for seed mixing.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng Rng::child(std::uint64_t master, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = mix(master);
  h = mix(h ^ a);
  h = mix(h ^ b);
  h = mix(h ^ c);
  return Rng(h);
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // u in (0, 1] so the log is finite.
  double u = 1.0 - uniform01();
  double v = uniform01();
  double r = std::sqrt(-2.0 * std::log(u));
  double theta = 2.0 * 3.14159265358979323846 * v;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

double Rng::laplace() {
  double u = uniform01() - 0.5;
  double m = 1.0 - 2.0 * std::abs(u);  // in (0, 1]
  double e = -std::log(m);
  return u >= 0 ? e : -e;
}

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t k) {
  std::vector<std::size_t> out;
  if (k >= n) {
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = i;
    return out;
  }
  if (k > n / 3) {
    // Partial Fisher-Yates on an explicit index array.
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = i + static_cast<std::size_t>(index(n - i));
      std::swap(idx[i], idx[j]);
    }
    out.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
  } else {
    // Floyd's algorithm: O(k) memory for sparse draws from a large range.
    std::unordered_set<std::size_t> seen;
    for (std::size_t i = n - k; i < n; ++i) {
      std::size_t t = static_cast<std::size_t>(index(i + 1));
      if (seen.count(t)) t = i;
      seen.insert(t);
      out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace bnet
