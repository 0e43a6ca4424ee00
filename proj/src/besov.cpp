#include "bnet/besov.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace bnet {

double SmoothnessVector::min() const {
  validate();
  double v = s[0];
  for (double x : s) v = std::min(v, x);
  return v;
}

double SmoothnessVector::max() const {
  validate();
  double v = s[0];
  for (double x : s) v = std::max(v, x);
  return v;
}

double SmoothnessVector::tilde() const {
  validate();
  double acc = 0.0;
  for (double x : s) acc += 1.0 / x;
  return 1.0 / acc;
}

void SmoothnessVector::validate() const {
  if (s.empty()) throw std::invalid_argument("smoothness vector is empty");
  for (double x : s) {
    if (!(x > 0.0) || !std::isfinite(x))
      throw std::invalid_argument("smoothness entries must be positive finite");
  }
}

void BesovParams::validate() const {
  s.validate();
  if (!(p > 0.0)) throw std::invalid_argument("p must be positive (infinity allowed)");
  if (!(q > 0.0)) throw std::invalid_argument("q must be positive (infinity allowed)");
  if (m < 0) throw std::invalid_argument("spline order m must be >= 0");
}

bool BesovParams::order_ok() const {
  double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  double cap = std::min(static_cast<double>(m), static_cast<double>(m) - 1.0 + inv_p);
  double smax = s.max();
  return smax > 0.0 && smax < cap;
}

double BesovParams::omega(double r) const {
  double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  double inv_r = std::isinf(r) ? 0.0 : 1.0 / r;
  return std::max(0.0, inv_p - inv_r);
}

double BesovParams::nu(double r) const {
  double w = omega(r);
  if (w == 0.0) return kInf;
  return (s.tilde() - w) / (2.0 * w);
}

EmbeddingResult embedding_exponent(double p1, double p2, const SmoothnessVector& s) {
  if (!(p1 > 0.0) || !(p2 > 0.0)) throw std::domain_error("integrability must be positive");
  if (p1 > p2) throw std::domain_error("embedding requires p1 <= p2");
  double inv1 = std::isinf(p1) ? 0.0 : 1.0 / p1;
  double inv2 = std::isinf(p2) ? 0.0 : 1.0 / p2;
  double gap = std::max(0.0, inv1 - inv2);
  double st = s.tilde();
  if (!(st > gap))
    throw std::domain_error("embedding invalid: s_tilde = " + std::to_string(st) +
                            " does not exceed integrability gap " + std::to_string(gap));
  EmbeddingResult res;
  res.gamma = 1.0 - gap / st;
  res.scaled.s.reserve(s.s.size());
  for (double x : s.s) res.scaled.s.push_back(res.gamma * x);
  return res;
}

namespace {

double binom_coeff(int n, int k) {
  double v = 1.0;
  for (int i = 0; i < k; ++i) v = v * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return v;
}

// r-th forward difference with step h, zero if the stencil leaves the cube.
double forward_difference(const std::function<double(const std::vector<double>&)>& f,
                          int d, int r, const std::vector<double>& x,
                          const std::vector<double>& h) {
  std::vector<double> pt(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    double lo = x[static_cast<std::size_t>(i)];
    double hi = lo + r * h[static_cast<std::size_t>(i)];
    if (std::min(lo, hi) < 0.0 || std::max(lo, hi) > 1.0) return 0.0;
  }
  double acc = 0.0;
  for (int j = 0; j <= r; ++j) {
    for (int i = 0; i < d; ++i)
      pt[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + j * h[static_cast<std::size_t>(i)];
    double sgn = ((r - j) % 2 == 0) ? 1.0 : -1.0;
    acc += sgn * binom_coeff(r, j) * f(pt);
  }
  return acc;
}

}  // namespace

double difference_modulus(const std::function<double(const std::vector<double>&)>& f,
                          int d, int r, const std::vector<double>& t, double p,
                          const ModulusGrid& grid) {
  if (d <= 0 || static_cast<int>(t.size()) != d)
    throw std::invalid_argument("difference_modulus: t must have length d");
  if (r < 1) throw std::invalid_argument("difference_modulus: order r must be >= 1");
  const int nx = std::max(2, grid.x_per_axis);
  const int nh = std::max(1, grid.h_per_axis);

  // Enumerate the shift lattice; each axis runs over nh values in [-t_i, t_i]
  // (just {t_i} when nh == 1).
  std::size_t h_total = 1;
  for (int i = 0; i < d; ++i) h_total *= static_cast<std::size_t>(nh);

  std::vector<double> h(static_cast<std::size_t>(d));
  std::vector<double> x(static_cast<std::size_t>(d));
  std::size_t x_total = 1;
  for (int i = 0; i < d; ++i) x_total *= static_cast<std::size_t>(nx);

  double best = 0.0;
  for (std::size_t hi = 0; hi < h_total; ++hi) {
    std::size_t rem = hi;
    for (int i = 0; i < d; ++i) {
      int a = static_cast<int>(rem % static_cast<std::size_t>(nh));
      rem /= static_cast<std::size_t>(nh);
      double ti = t[static_cast<std::size_t>(i)];
      h[static_cast<std::size_t>(i)] =
          (nh == 1) ? ti : -ti + 2.0 * ti * static_cast<double>(a) / static_cast<double>(nh - 1);
    }

    double acc = 0.0;  // sup for p = inf, Riemann sum of |.|^p otherwise
    for (std::size_t xi = 0; xi < x_total; ++xi) {
      std::size_t xr = xi;
      for (int i = 0; i < d; ++i) {
        int a = static_cast<int>(xr % static_cast<std::size_t>(nx));
        xr /= static_cast<std::size_t>(nx);
        x[static_cast<std::size_t>(i)] = static_cast<double>(a) / static_cast<double>(nx - 1);
      }
      double v = std::abs(forward_difference(f, d, r, x, h));
      if (std::isinf(p)) {
        acc = std::max(acc, v);
      } else {
        acc += std::pow(v, p);
      }
    }
    double norm = std::isinf(p)
                      ? acc
                      : std::pow(acc / static_cast<double>(x_total), 1.0 / p);
    best = std::max(best, norm);
  }
  return best;
}

}  // namespace bnet
