#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "bnet/coefficients.hpp"
#include "bnet/gadgets.hpp"
#include "bnet/network.hpp"
#include "bnet/rng.hpp"
#include "bnet/targets.hpp"

namespace bnet {

// Error budget for gadget construction. `levels` is the sawtooth depth the
// squaring chains will use, derived from eps_target by gadget_budget().
struct GadgetBudget {
  double eps_target = 1e-3;
  int levels = 1;
};

// Derives the sawtooth depth for eps_target, throwing std::invalid_argument
// when the target cannot be met within max_levels.
GadgetBudget gadget_budget(double eps_target, int max_levels = 40);

// Spec-facing gadget entry points (thin wrappers over the builders in
// gadgets.hpp). power uses the domain [0, m+1] of the truncated powers.
Network square_net(const GadgetBudget& budget);
Network mult_net(const GadgetBudget& budget, double bound);
Network power_net(int m, const GadgetBudget& budget);

// One compiled tensor B-spline basis function together with its certificate
// inputs: the construction targets eps and the realized network is compared
// against the order formulas
//   L0 = 3 + 2 ceil(log2(3^{d v m} / eps) + 5) ceil(log2(d v m))
//   D0 = 6 d m (m+2) + 2d,  S0 = L0 D0^2,  B0 = 2 (m+1) m.
struct BsplineNetBuild {
  Network net;
  int d = 0;
  int m = 0;
  double eps_target = 0.0;
  double band_width = 0.0;  // suppression band next to the upper faces
  long L0 = 0;
  long D0 = 0;
  long S0 = 0;
  double B0 = 0.0;
};

// Network value of the unit basis M^{d,m}_{0,0}: sup error <= eps_target on
// [0, m+1]^d and exactly zero outside it. For m = 0 the target is the open-box
// indicator; interior points at distance >= band_width from the faces are
// exact and the sup claim is restricted to that region (the discontinuity
// cannot be beaten).
BsplineNetBuild bspline_net(int d, int m, const GadgetBudget& budget);

// Which basis functions a budget-N approximant uses. Full levels up to K,
// then magnitude-thinned levels up to K_star with per-level quotas
// ceil(N(K)^{1+delta} N(k)^{-delta}).
struct ApproxPlan {
  long N = 0;
  long K = 0;
  long K_star = 0;
  double omega = 0.0;
  double nu = 0.0;    // infinite when omega = 0 (then K_star = K, no tail)
  double delta = 0.0;
  std::vector<SplineIndex> selected;  // E_N in canonical order
  std::vector<std::size_t> tail_quota;  // |J*(k)| for K < k <= K_star
};

// N(K) = ceil(2^{sum_i floor(K s_min / s_i)}), evaluated per level.
double level_budget(const BesovParams& params, long k);

// Chooses K maximal with N(K) <= N, then selects indices: whole levels k <= K
// and, in the thinned range, the largest-|alpha| entries of each level (ties
// broken by index order). Levels beyond the coefficient content only add
// zero coefficients and are not enumerated.
ApproxPlan plan_index_selection(const SplineCoefficients& coeffs, long N, double r);

// Sparse network approximant: a single shared gadget core evaluated through
// per-block input affines x -> 2^{e(k)} x - j, combined with output weights
// alpha. The dense materialization (to_network) exists for small assemblies;
// at scale the shared-core form is the honest representation of the
// construction's parameter sharing, and realized shape numbers are derived
// from it directly.
struct AssembledBlock {
  SplineIndex idx;
  double alpha = 0.0;
};

struct BlockAssembly {
  BsplineNetBuild core;
  BesovParams params;
  std::vector<AssembledBlock> blocks;  // canonical (k, j) order
  bool clip = false;

  double eval(const std::vector<double>& x) const;
  std::vector<double> eval_batch(const std::vector<std::vector<double>>& pts) const;

  long depth() const;            // hidden layers of the stacked network
  long width() const;            // widest hidden layer of the stacked network
  std::size_t sparsity() const;  // shared core once + per-block first layers + outputs
  double sup_weight() const;     // includes folded first layers and output weights

  Network to_network(std::size_t max_units = 4000) const;
};

// Builds the assembly for the planned index set. Blocks with a zero
// coefficient are dropped. When target_B > 0 the shared layers are rescaled
// (geometric equalization, folded first layers included) and the call throws
// RescaleInfeasible if even the equalized assembly exceeds target_B.
BlockAssembly assemble_approximant(const SplineCoefficients& coeffs, const ApproxPlan& plan,
                                   const GadgetBudget& budget, double target_B,
                                   bool clip = false);

// Composition of per-layer assemblies following a composite_chain target;
// intermediate outputs pass through the exact [0,1] clamp, adding two affine
// maps per seam, so depth accounts as sum_h (depth_h + 2).
struct CompositeAssembly {
  std::vector<std::vector<BlockAssembly>> layers;          // [layer][component]
  std::vector<std::vector<std::vector<int>>> wiring;       // input columns per component

  double eval(const std::vector<double>& x) const;
  long depth() const;
};

CompositeAssembly composite_assemble(const TargetFunction& chain,
                                     const std::vector<ApproxPlan>& plans,
                                     const GadgetBudget& budget, double target_B);

// Affine pre-composition g(Ax + b) folded into the first layer. The image of
// the unit cube under (A, b) must stay inside the unit cube (checked exactly
// via per-row interval extremes over the corners).
struct AffineComposeResult {
  Network net;
  double C_A = 0.0;       // max |entry| over A and b
  double B3_bound = 0.0;  // C_A (d_in + 1) B_inner, the stated sup-norm order
  double realized_B = 0.0;
};

AffineComposeResult affine_compose(const std::vector<double>& A, const std::vector<double>& b,
                                   int in_dim, const Network& inner);

// Statistical shape schedule for sample size n at intrinsic smoothness
// s_tilde: N_n = ceil(n^{1/(2 s_tilde + 1)}), L = ceil(C_L log n),
// D = ceil(C_D N_n), S = ceil(C_S N_n log n), B = C_B.
struct RateConstants {
  double C_L = 1.0;
  double C_D = 1.0;
  double C_S = 1.0;
  double C_B = 10.0;
};

struct HyperParams {
  long N_n = 1;
  ShapeBudget shape;
};

HyperParams hyperparams_for_n(long n, double s_tilde, const RateConstants& c = {});

// L^r distance between target and approximation over [0,1]^d: Monte Carlo
// with standard error for finite r, lattice maximum (std_error = 0) for
// r = infinity.
struct ErrorEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

ErrorEstimate approx_error(const std::function<double(const std::vector<double>&)>& target,
                           const std::function<double(const std::vector<double>&)>& approx,
                           int d, double r, int n_points, Rng& rng);
ErrorEstimate approx_error(const TargetFunction& target, const BlockAssembly& net, double r,
                           int n_points, Rng& rng);
ErrorEstimate approx_error(const TargetFunction& target, const Network& net, double r,
                           int n_points, Rng& rng);

// One row of the N-sweep used by the approx-rate report.
struct ApproxRateRow {
  long N = 0;
  long K = 0;
  std::size_t selected = 0;  // |E_N|
  long L = 0;
  long D = 0;
  std::size_t S = 0;
  double B = 0.0;
  double error_l2 = 0.0;
  double error_sup = 0.0;
  double seconds = 0.0;
};

std::vector<ApproxRateRow> approx_rate_sweep(const SplineCoefficients& target,
                                             const std::vector<long>& budgets, double r,
                                             const GadgetBudget& gadget, int mc_points,
                                             unsigned seed, bool timing = true);

}  // namespace bnet
