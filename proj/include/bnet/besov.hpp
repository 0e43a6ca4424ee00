#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace bnet {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Anisotropic smoothness vector s = (s_1, ..., s_d), one entry per input axis.
// Derived quantities:
//   s_min, s_max      extreme per-axis smoothness
//   s_tilde           harmonic-style aggregate, (sum_i 1/s_i)^{-1}; this is the
//                     exponent that drives approximation and contraction rates
//   d_star = s_min / s_tilde   effective dimension seen by the rates
struct SmoothnessVector {
  std::vector<double> s;

  SmoothnessVector() = default;
  explicit SmoothnessVector(std::vector<double> v) : s(std::move(v)) { validate(); }

  int dim() const { return static_cast<int>(s.size()); }
  double min() const;
  double max() const;
  double tilde() const;
  double d_star() const { return min() / tilde(); }

  // Throws std::invalid_argument unless nonempty with all entries > 0.
  void validate() const;
};

// Dyadic level exponent for axis smoothness s_i at level k: the axis is
// resolved at 2^{e} with e = floor(k * s_min / s_i). The rough axes (small
// s_i) get more resolution per level; the axis attaining s_min advances one
// dyadic step per level, and for isotropic s every axis does. The small slack
// keeps ratios that are integers in intent (s = (0.5, 1.0) and friends) from
// landing one ulp below the integer.
inline long level_exponent(long k, double s_min, double s_i) {
  return static_cast<long>(std::floor(static_cast<double>(k) * s_min / s_i + 1e-9));
}

// Function-space parameters: integrability p, summability q (either may be
// infinity), spline order m, and the smoothness vector.
struct BesovParams {
  double p = kInf;
  double q = kInf;
  int m = 1;
  SmoothnessVector s;

  int dim() const { return s.dim(); }

  // Throws std::invalid_argument on out-of-range parameters.
  void validate() const;

  // Order constraint for spline approximation: 0 < s_max < min(m, m - 1 + 1/p).
  bool order_ok() const;

  // Regime margin for approximation in L^r: omega = (1/p - 1/r)_+ must fall
  // below s_tilde. nu = (s_tilde - omega) / (2 omega) controls how far past
  // the budget level the thinned tail extends (infinite when omega == 0).
  double omega(double r) const;
  double nu(double r) const;
  bool regime_ok(double r) const { return omega(r) < s.tilde(); }
};

// Besov embedding with loss of integrability: moving from p1 to p2 >= p1
// costs a factor gamma = 1 - (1/p1 - 1/p2)_+ / s_tilde on every smoothness
// entry. Valid only while s_tilde exceeds the integrability gap.
struct EmbeddingResult {
  double gamma = 1.0;
  SmoothnessVector scaled;  // gamma * s, entrywise
};

// Throws std::domain_error when p1 > p2 or s_tilde <= (1/p1 - 1/p2)_+.
EmbeddingResult embedding_exponent(double p1, double p2, const SmoothnessVector& s);

// Grid resolution for the modulus-of-smoothness estimate below.
struct ModulusGrid {
  int x_per_axis = 64;  // evaluation lattice over [0,1]^d
  int h_per_axis = 5;   // candidate shifts per axis, spanning [-t_i, t_i]
};

// Estimate of the r-th order L^p modulus of smoothness
//   w_{r,p}(f, t) = sup_{|h_i| <= t_i} || Delta_h^r f ||_{L^p[0,1]^d}
// with the sup replaced by a maximum over a shift lattice and the L^p norm by
// a Riemann sum. Differences are taken as zero whenever x or x + r h leaves
// the unit cube.
double difference_modulus(const std::function<double(const std::vector<double>&)>& f,
                          int d, int r, const std::vector<double>& t, double p,
                          const ModulusGrid& grid = {});

}  // namespace bnet
