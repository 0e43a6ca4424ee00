#pragma once

namespace bnet {

// Binomial coefficient as a double (exact for the ranges used here).
double binom(int n, int k);

// Cardinal B-spline of order m: psi_0 is the indicator of the unit interval
// and psi_m = psi_0 * psi_{m-1} (convolution). Evaluated in closed form as an
// alternating sum of truncated powers,
//   psi_m(x) = (1/m!) sum_{j=0}^{m+1} (-1)^j C(m+1, j) max(x - j, 0)^m,
// with explicit zero outside the open support (0, m+1): the alternating sum
// cancels only up to roundoff for x >= m+1, so the support is enforced
// directly. For m = 0 the open-interval convention makes the "zero outside"
// statement hold verbatim at both endpoints.
double bspline_eval(int m, double x);

}  // namespace bnet
