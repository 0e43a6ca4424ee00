#pragma once

#include "bnet/network.hpp"

namespace bnet {

// Uniform deviation bound under entrywise parameter perturbation: two
// networks of identical shape whose parameters differ by at most eps satisfy
//   sup_x |f(x) - f'(x)| <= eps * A * max(B,1)^{A-1} * (D+1)^A
// over [0,1]^d, where A counts affine maps (hidden layers + 1), D is the
// width and B bounds the parameter magnitudes of both networks.
double lipschitz_param_bound(double eps, long affine_count, long D, double B);

struct CoveringBound {
  double log_value = 0.0;     // log of the covering number bound
  bool valid = false;         // stated preconditions hold
  double margin_floor = 0.0;  // smallest eps admitted when a margin is given
};

// Metric entropy of the clipped sparse class at sup-norm radius eps:
//   log N <= (S+1) * log(2 L max(B,1)^L (D+1)^{2L} / eps).
// Stated for L >= 3, D >= 3. When margin_a > 0 the perturbed-class variant is
// requested, which additionally needs eps >= 2 a L max(B,1)^{L-1} (D+1)^L;
// the flag reports whether all preconditions hold at this eps.
CoveringBound covering_bound(double eps, const ShapeBudget& shape, double margin_a = 0.0);

// VC-based entropy bound for the unbounded-parameter class:
//   C1 * L * S * log(S) * log(K / eps^p) + log(C2 * L * S * log S),
// constants kept symbolic (callers pass what they want; both default to 1).
double vc_covering_bound(long L, long S, double eps, double K, double p,
                         double C1 = 1.0, double C2 = 1.0);

}  // namespace bnet
