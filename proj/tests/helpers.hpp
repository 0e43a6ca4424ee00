#pragma once

// Shared oracle helpers for the test suites. These deliberately avoid the
// library's own code paths: quadrature instead of closed forms, naive sums
// instead of skip logic, so they can certify frozen expected values.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "bnet/bspline.hpp"

namespace testutil {

// Composite two-point Gauss-Legendre integration of f over [a, b]. Exact for
// cubics; samples never land on the interval endpoints, which matters when
// the integrand jumps there (the order-0 spline).
inline double gauss2(const std::function<double(double)>& f, double a, double b, int n) {
  const double off = 0.5 / std::sqrt(3.0);
  double h = (b - a) / n;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    double mid = a + (i + 0.5) * h;
    acc += f(mid - off * h) + f(mid + off * h);
  }
  return acc * h / 2.0;
}

// Convolution oracle for the cardinal B-spline recursion:
//   psi_m(x) = integral_0^1 psi_{m-1}(x - t) dt.
// The integrand is piecewise polynomial with kinks (or jumps, for m = 1) at
// t = x - i; splitting there makes the panel rule exact for m <= 4 up to
// roundoff.
inline double bspline_convolution_oracle(int m, double x) {
  std::vector<double> cuts{0.0, 1.0};
  for (int i = 0; i <= m; ++i) {
    double t = x - i;
    if (t > 0.0 && t < 1.0) cuts.push_back(t);
  }
  std::sort(cuts.begin(), cuts.end());
  double acc = 0.0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    acc += gauss2([&](double t) { return bnet::bspline_eval(m - 1, x - t); },
                  cuts[s], cuts[s + 1], 8);
  }
  return acc;
}

// Ordinary least squares of y on x; slope, intercept and R^2. Constant y
// (zero variance) is reported as a perfect fit, since a constant is affine.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit out;
  out.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  out.intercept = my - out.slope * mx;
  if (syy > 0.0) {
    double ssres = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = y[i] - (out.intercept + out.slope * x[i]);
      ssres += r * r;
    }
    out.r2 = 1.0 - ssres / syy;
  }
  return out;
}

}  // namespace testutil
