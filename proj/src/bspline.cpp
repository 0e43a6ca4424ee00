#include "bnet/bspline.hpp"

#include <cmath>
#include <stdexcept>

namespace bnet {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double v = 1.0;
  for (int i = 0; i < k; ++i) v = v * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return v;
}

double bspline_eval(int m, double x) {
  if (m < 0) throw std::invalid_argument("bspline_eval: order must be >= 0");
  if (x <= 0.0 || x >= static_cast<double>(m + 1)) return 0.0;
  if (m == 0) return 1.0;

  double inv_fact = 1.0;
  for (int i = 2; i <= m; ++i) inv_fact /= static_cast<double>(i);

  // Only terms with j < x contribute; x < m+1 keeps the loop short.
  double acc = 0.0;
  for (int j = 0; j <= m + 1; ++j) {
    double u = x - static_cast<double>(j);
    if (u <= 0.0) break;
    double term = binom(m + 1, j) * std::pow(u, m);
    acc += (j % 2 == 0) ? term : -term;
  }
  return acc * inv_fact;
}

}  // namespace bnet
