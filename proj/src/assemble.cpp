#include "bnet/assemble.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bnet/bspline.hpp"

namespace bnet {

namespace {

double factorial(int m) {
  double f = 1.0;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

// First layer of `core` with the block input map x -> 2^{e} x - j folded in.
// The scale factors are powers of two, so folded weights are exact.
Layer folded_first_layer(const Layer& first, const std::vector<long>& e,
                         const std::vector<long>& j) {
  Layer out = first;
  for (int r = 0; r < first.out; ++r) {
    double shift = 0.0;
    for (int c = 0; c < first.in; ++c) {
      shift += first.w(r, c) * static_cast<double>(j[static_cast<std::size_t>(c)]);
      out.w(r, c) = std::ldexp(first.w(r, c), static_cast<int>(e[static_cast<std::size_t>(c)]));
    }
    out.b[static_cast<std::size_t>(r)] = first.b[static_cast<std::size_t>(r)] - shift;
  }
  return out;
}

double layer_wmax(const Layer& l) {
  double m = 0.0;
  for (double v : l.W) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

GadgetBudget gadget_budget(double eps_target, int max_levels) {
  if (!(eps_target > 0.0) || !(eps_target < 1.0))
    throw std::invalid_argument("gadget_budget: eps_target must lie in (0, 1)");
  GadgetBudget b;
  b.eps_target = eps_target;
  b.levels = std::max(1, square_levels_for(eps_target));
  if (b.levels > max_levels)
    throw std::invalid_argument("gadget_budget: eps_target needs more than max_levels levels");
  return b;
}

Network square_net(const GadgetBudget& budget) {
  return square_gadget(std::max(1, budget.levels)).net;
}

Network mult_net(const GadgetBudget& budget, double bound) {
  return mult_gadget(bound, budget.eps_target).net;
}

Network power_net(int m, const GadgetBudget& budget) {
  if (m < 1) throw std::invalid_argument("power_net: m must be >= 1");
  if (m == 1) {
    // ReLU itself: exact on the whole line, not just the design range.
    Network net;
    net.d = 1;
    Layer l1(1, 1);
    l1.w(0, 0) = 1.0;
    Layer l2(1, 1);
    l2.w(0, 0) = 1.0;
    net.layers = {l1, l2};
    return net;
  }
  return power_gadget(m, static_cast<double>(m + 1), budget.eps_target).net;
}

// ---------------------------------------------------------------------------
// Basis compiler. The network follows the spline's own algebra: per-axis
// clamped ramps (x_i - j)_+ capped at m+1, truncated powers of each ramp, the
// alternating-sum recombination into psi_m, and a product tree across axes.
// A penalty channel per axis rides alongside and a final gate subtracts it,
// which forces an exact zero beyond the upper faces; below the lower faces
// every ramp is dead and zero propagates through the gadgets bitwise.

BsplineNetBuild bspline_net(int d, int m, const GadgetBudget& budget) {
  if (d < 1 || d > 6) throw std::invalid_argument("bspline_net: d must be in [1, 6]");
  if (m < 0 || m > 4) throw std::invalid_argument("bspline_net: m must be in [0, 4]");
  const double eps = budget.eps_target;
  if (!(eps > 0.0) || !(eps < 1.0))
    throw std::invalid_argument("bspline_net: eps_target must lie in (0, 1)");

  BsplineNetBuild build;
  build.d = d;
  build.m = m;
  build.eps_target = eps;

  const int dvm = std::max(d, std::max(m, 1));
  const long log_dvm =
      static_cast<long>(std::ceil(std::log2(static_cast<double>(dvm)) - 1e-12));
  build.L0 = 3 + 2 *
                 static_cast<long>(std::ceil(
                     std::log2(std::pow(3.0, dvm) / eps) + 5.0)) *
                 log_dvm;
  build.D0 = 6L * d * m * (m + 2) + 2L * d;
  build.S0 = build.L0 * build.D0 * build.D0;
  build.B0 = 2.0 * (m + 1) * m;

  if (m == 0) {
    // Open-box indicator: trim channels near every face, one gate. The factor
    // 2 on the gate row keeps the outside-zero claim robust to the rounding
    // of the 1/w slopes.
    const double w = std::min(eps, 0.25);
    build.band_width = w;
    Layer l1(d, 2 * d);
    for (int i = 0; i < d; ++i) {
      l1.w(2 * i, i) = -1.0 / w;
      l1.b[static_cast<std::size_t>(2 * i)] = 1.0;
      l1.w(2 * i + 1, i) = 1.0 / w;
      l1.b[static_cast<std::size_t>(2 * i + 1)] = (w - 1.0) / w;
    }
    Layer l2(2 * d, 1);
    for (int c = 0; c < 2 * d; ++c) l2.w(0, c) = -2.0;
    l2.b[0] = 1.0;
    Layer l3(1, 1);
    l3.w(0, 0) = 1.0;
    build.net.d = d;
    build.net.layers = {l1, l2, l3};
    build.net.validate();
    return build;
  }

  const double U = static_cast<double>(m + 1);
  const double mfact = factorial(m);
  const double w = std::min(std::pow(eps * mfact / 2.0, 1.0 / m), 0.5);
  build.band_width = w;

  // Error split: band sup w^m/m! <= eps/2, psi chains eps/4 total, product
  // tree eps/4 total.
  const double eps_psi = eps / (4.0 * d);
  const double delta_pow = eps_psi * mfact / std::pow(2.0, m + 1);

  // Front: ramp pairs and the penalty pre-activation, one hidden layer.
  const int per_axis = 2 * (m + 2) + 1;
  const int R = d * (m + 2);
  Layer f1(d, d * per_axis);
  for (int i = 0; i < d; ++i) {
    const int base = i * per_axis;
    for (int j = 0; j <= m + 1; ++j) {
      f1.w(base + 2 * j, i) = 1.0;
      f1.b[static_cast<std::size_t>(base + 2 * j)] = -static_cast<double>(j);
      f1.w(base + 2 * j + 1, i) = 1.0;
      f1.b[static_cast<std::size_t>(base + 2 * j + 1)] = -(static_cast<double>(j) + U);
    }
    f1.w(base + 2 * (m + 2), i) = 1.0 / w;
    f1.b[static_cast<std::size_t>(base + 2 * (m + 2))] = -(U - w) / w;
  }
  Layer f2(d * per_axis, R + d);
  for (int i = 0; i < d; ++i) {
    const int base = i * per_axis;
    for (int j = 0; j <= m + 1; ++j) {
      f2.w(i * (m + 2) + j, base + 2 * j) = 1.0;
      f2.w(i * (m + 2) + j, base + 2 * j + 1) = -1.0;
    }
    f2.w(R + i, base + 2 * (m + 2)) = 1.0;
  }
  Network front;
  front.d = d;
  front.layers = {f1, f2};

  // Power towers on every ramp, penalties carried at matching depth.
  GadgetBuild pw = power_gadget(m, U, delta_pow);
  const int pw_hidden = pw.net.hidden_count();
  std::vector<Network> blocks;
  blocks.reserve(static_cast<std::size_t>(R) + 1);
  for (int t = 0; t < R; ++t) {
    Network tower = pw.net;
    remap_inputs(tower, R + d, {t});
    blocks.push_back(std::move(tower));
  }
  {
    Network qc = identity_net(d, pw_hidden, true);
    std::vector<int> cols(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) cols[static_cast<std::size_t>(i)] = R + i;
    remap_inputs(qc, R + d, cols);
    blocks.push_back(std::move(qc));
  }
  Network mid = compose(stack_shared(blocks), front);

  // Alternating-sum recombination into psi per axis; penalties pass through.
  Layer comb(R + d, 2 * d);
  double psi_lo = 0.0;
  double psi_hi = 0.0;
  for (int j = 0; j <= m + 1; ++j) {
    const double c = ((j % 2 == 0) ? 1.0 : -1.0) * binom(m + 1, j) / mfact;
    psi_lo += std::min(c * pw.lo, c * pw.hi);
    psi_hi += std::max(c * pw.lo, c * pw.hi);
  }
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= m + 1; ++j) {
      const double c = ((j % 2 == 0) ? 1.0 : -1.0) * binom(m + 1, j) / mfact;
      comb.w(i, i * (m + 2) + j) = c;
    }
    comb.w(d + i, R + i) = 1.0;
  }
  append_affine(mid, comb);

  // Product tree across axes; C = 1 because psi values live in [0, 1] up to
  // the chain errors and the multiplier clamps its inputs anyway.
  double root_bound = std::max(std::abs(psi_lo), std::abs(psi_hi));
  if (d >= 2) {
    const double delta_m = eps / (4.0 * (d - 1));
    GadgetBuild mg = mult_gadget(1.0, delta_m);
    const int mdepth = mg.net.hidden_count();
    int nv = d;
    while (nv > 1) {
      const int in_dim = nv + d;
      std::vector<Network> stage;
      for (int p = 0; p + 1 < nv; p += 2) {
        Network mm = mg.net;
        remap_inputs(mm, in_dim, {p, p + 1});
        stage.push_back(std::move(mm));
      }
      if (nv % 2 == 1) {
        Network carry = identity_net(1, mdepth, false);
        remap_inputs(carry, in_dim, {nv - 1});
        stage.push_back(std::move(carry));
      }
      Network qc = identity_net(d, mdepth, true);
      std::vector<int> cols(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) cols[static_cast<std::size_t>(i)] = nv + i;
      remap_inputs(qc, in_dim, cols);
      stage.push_back(std::move(qc));
      mid = compose(stack_shared(stage), mid);
      nv = (nv + 1) / 2;
    }
    root_bound = std::max(std::abs(mg.lo), std::abs(mg.hi));
  }

  // Gate: subtract lambda * sum_i q_i and rectify. lambda doubles a sound
  // bound on |v|, so q_i >= 1 forces the pre-activation negative with margin.
  const double lambda = 2.0 * std::max(root_bound, 1.0);
  Layer g1(1 + d, 1);
  g1.w(0, 0) = 1.0;
  for (int i = 0; i < d; ++i) g1.w(0, 1 + i) = -lambda;
  Layer g2(1, 1);
  g2.w(0, 0) = 1.0;
  Network gate;
  gate.d = 1 + d;
  gate.layers = {g1, g2};

  build.net = compose(gate, mid);
  build.net.validate();
  return build;
}

// ---------------------------------------------------------------------------

double level_budget(const BesovParams& params, long k) {
  const std::vector<long> e = level_exponents(params, k);
  long total = 0;
  for (long v : e) total += v;
  if (total > 900) return kInf;
  return std::ceil(std::ldexp(1.0, static_cast<int>(total)));
}

ApproxPlan plan_index_selection(const SplineCoefficients& coeffs, long N, double r) {
  coeffs.params.validate();
  if (N < 1) throw std::invalid_argument("plan_index_selection: N must be >= 1");
  if (!(r > 0.0)) throw std::invalid_argument("plan_index_selection: r must be positive");
  if (!coeffs.params.regime_ok(r))
    throw std::domain_error("plan_index_selection: integrability gap reaches s_tilde");

  ApproxPlan plan;
  plan.N = N;
  plan.omega = coeffs.params.omega(r);
  plan.nu = coeffs.params.nu(r);

  while (level_budget(coeffs.params, plan.K + 1) <= static_cast<double>(N)) ++plan.K;

  const long K_content =
      coeffs.entries.empty() ? -1 : coeffs.entries.rbegin()->first.k;

  for (long k = 0; k <= std::min(plan.K, K_content); ++k) {
    for (auto& j : enumerate_index_set(coeffs.params, k))
      plan.selected.push_back(SplineIndex{k, std::move(j)});
  }

  if (plan.omega > 0.0) {
    plan.delta = plan.nu;
    plan.K_star =
        static_cast<long>(std::ceil(static_cast<double>(plan.K) * (1.0 + 1.0 / plan.nu) -
                                    1e-12));
    const double NK = level_budget(coeffs.params, plan.K);
    for (long k = plan.K + 1; k <= std::min(plan.K_star, K_content); ++k) {
      const double Nk = level_budget(coeffs.params, k);
      const double raw = NK * std::pow(NK / Nk, plan.delta);
      const std::size_t quota =
          static_cast<std::size_t>(std::max(1.0, std::ceil(raw - 1e-12)));
      plan.tail_quota.push_back(quota);

      std::vector<std::pair<SplineIndex, double>> level;
      const auto lo = coeffs.entries.lower_bound(SplineIndex{k, {}});
      for (auto it = lo; it != coeffs.entries.end() && it->first.k == k; ++it)
        level.emplace_back(it->first, it->second);
      std::stable_sort(level.begin(), level.end(), [](const auto& a, const auto& b) {
        return std::abs(a.second) > std::abs(b.second);
      });
      const std::size_t take = std::min(quota, level.size());
      for (std::size_t i = 0; i < take; ++i) plan.selected.push_back(level[i].first);
    }
  } else {
    plan.K_star = plan.K;
    plan.delta = 0.0;
  }

  std::sort(plan.selected.begin(), plan.selected.end());
  return plan;
}

// ---------------------------------------------------------------------------

double BlockAssembly::eval(const std::vector<double>& x) const {
  Workspace ws;
  std::vector<double> t(static_cast<std::size_t>(core.d));
  std::vector<std::vector<long>> exps;
  double acc = 0.0;
  const double edge = static_cast<double>(core.m + 1);
  for (const AssembledBlock& blk : blocks) {
    const auto lk = static_cast<std::size_t>(blk.idx.k);
    while (exps.size() <= lk) exps.push_back(level_exponents(params, static_cast<long>(exps.size())));
    const std::vector<long>& e = exps[lk];
    bool inside = true;
    for (int i = 0; i < core.d; ++i) {
      const std::size_t ui = static_cast<std::size_t>(i);
      t[ui] = std::ldexp(x[ui], static_cast<int>(e[ui])) - static_cast<double>(blk.idx.j[ui]);
      if (!(t[ui] > 0.0 && t[ui] < edge)) {
        inside = false;
        break;
      }
    }
    if (!inside) continue;  // the compiled block is exactly zero there
    acc += blk.alpha * core.net.forward(t, ws);
  }
  if (clip) acc = std::clamp(acc, -1.0, 1.0);
  return acc;
}

std::vector<double> BlockAssembly::eval_batch(const std::vector<std::vector<double>>& pts) const {
  std::vector<double> out(pts.size(), 0.0);
  const long n = static_cast<long>(pts.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = eval(pts[static_cast<std::size_t>(i)]);
  return out;
}

long BlockAssembly::depth() const { return core.net.hidden_count(); }

long BlockAssembly::width() const {
  return static_cast<long>(blocks.size()) * static_cast<long>(core.net.max_width());
}

std::size_t BlockAssembly::sparsity() const {
  std::size_t s = 0;
  for (std::size_t l = 1; l < core.net.layers.size(); ++l) {
    for (double v : core.net.layers[l].W) s += (v != 0.0);
    for (double v : core.net.layers[l].b) s += (v != 0.0);
  }
  if (core.net.layers.empty()) return s;
  for (const AssembledBlock& blk : blocks) {
    const Layer f =
        folded_first_layer(core.net.layers.front(), level_exponents(params, blk.idx.k), blk.idx.j);
    for (double v : f.W) s += (v != 0.0);
    for (double v : f.b) s += (v != 0.0);
    s += (blk.alpha != 0.0);
  }
  return s;
}

double BlockAssembly::sup_weight() const {
  double b = 0.0;
  for (std::size_t l = 1; l < core.net.layers.size(); ++l) {
    for (double v : core.net.layers[l].W) b = std::max(b, std::abs(v));
    for (double v : core.net.layers[l].b) b = std::max(b, std::abs(v));
  }
  for (const AssembledBlock& blk : blocks) {
    const Layer f =
        folded_first_layer(core.net.layers.front(), level_exponents(params, blk.idx.k), blk.idx.j);
    for (double v : f.W) b = std::max(b, std::abs(v));
    for (double v : f.b) b = std::max(b, std::abs(v));
    b = std::max(b, std::abs(blk.alpha));
  }
  return b;
}

Network BlockAssembly::to_network(std::size_t max_units) const {
  if (blocks.empty()) {
    Network zero;
    zero.d = params.dim();
    zero.layers.push_back(Layer(params.dim(), 1));
    zero.clip = clip;
    return zero;
  }
  if (static_cast<std::size_t>(width()) > max_units)
    throw std::length_error("BlockAssembly::to_network: materialization too wide");
  std::vector<Network> nets;
  nets.reserve(blocks.size());
  for (const AssembledBlock& blk : blocks) {
    Network nb = core.net;
    nb.layers.front() =
        folded_first_layer(core.net.layers.front(), level_exponents(params, blk.idx.k), blk.idx.j);
    nets.push_back(std::move(nb));
  }
  Network out = stack_shared(nets);
  Layer row(static_cast<int>(blocks.size()), 1);
  for (std::size_t i = 0; i < blocks.size(); ++i) row.w(0, static_cast<int>(i)) = blocks[i].alpha;
  append_affine(out, row);
  out.clip = clip;
  out.validate();
  return out;
}

namespace {

void rescale_assembly(BlockAssembly& as, double target_B) {
  if (as.blocks.empty()) return;
  std::vector<Layer>& layers = as.core.net.layers;
  const std::size_t n = layers.size();

  std::vector<double> wmax(n + 1, 0.0);
  for (const AssembledBlock& blk : as.blocks) {
    wmax[0] = std::max(wmax[0], layer_wmax(folded_first_layer(
                                    layers.front(), level_exponents(as.params, blk.idx.k),
                                    blk.idx.j)));
    wmax[n] = std::max(wmax[n], std::abs(blk.alpha));
  }
  for (std::size_t l = 1; l < n; ++l) wmax[l] = layer_wmax(layers[l]);

  double log_sum = 0.0;
  std::size_t active = 0;
  for (double m : wmax) {
    if (m > 0.0) {
      log_sum += std::log(m);
      ++active;
    }
  }
  if (active > 0) {
    const double G = std::exp(log_sum / static_cast<double>(active));
    double cum = 1.0;
    for (std::size_t l = 0; l < n; ++l) {
      const double c = wmax[l] > 0.0 ? G / wmax[l] : 1.0;
      cum *= c;
      for (double& v : layers[l].W) v *= c;
      for (double& v : layers[l].b) v *= cum;
    }
    const double c_out = wmax[n] > 0.0 ? G / wmax[n] : 1.0;
    for (AssembledBlock& blk : as.blocks) blk.alpha *= c_out;
  }

  const double achieved = as.sup_weight();
  if (achieved > target_B) throw RescaleInfeasible(achieved);
}

}  // namespace

BlockAssembly assemble_approximant(const SplineCoefficients& coeffs, const ApproxPlan& plan,
                                   const GadgetBudget& budget, double target_B, bool clip) {
  BlockAssembly as;
  as.params = coeffs.params;
  as.core = bspline_net(coeffs.params.dim(), coeffs.params.m, budget);
  as.clip = clip;
  for (const SplineIndex& idx : plan.selected) {
    const auto it = coeffs.entries.find(idx);
    if (it == coeffs.entries.end() || it->second == 0.0) continue;
    as.blocks.push_back(AssembledBlock{idx, it->second});
  }
  if (target_B > 0.0) rescale_assembly(as, target_B);
  return as;
}

// ---------------------------------------------------------------------------

double CompositeAssembly::eval(const std::vector<double>& x) const {
  std::vector<double> cur = x;
  std::vector<double> next;
  std::vector<double> args;
  for (std::size_t h = 0; h < layers.size(); ++h) {
    next.assign(layers[h].size(), 0.0);
    for (std::size_t c = 0; c < layers[h].size(); ++c) {
      const std::vector<int>& cols = wiring[h][c];
      args.assign(cols.size(), 0.0);
      for (std::size_t i = 0; i < cols.size(); ++i)
        args[i] = cur[static_cast<std::size_t>(cols[i])];
      next[c] = layers[h][c].eval(args);
    }
    if (h + 1 < layers.size()) {
      for (double& v : next) v = std::clamp(v, 0.0, 1.0);
    }
    cur = next;
  }
  return cur.empty() ? 0.0 : cur[0];
}

long CompositeAssembly::depth() const {
  long total = 0;
  for (const auto& layer : layers) {
    long dmax = 0;
    for (const BlockAssembly& as : layer) dmax = std::max(dmax, as.depth());
    total += dmax + 2;
  }
  return total;
}

CompositeAssembly composite_assemble(const TargetFunction& chain,
                                     const std::vector<ApproxPlan>& plans,
                                     const GadgetBudget& budget, double target_B) {
  if (chain.kind != TargetKind::composite_chain)
    throw std::invalid_argument("composite_assemble: target is not a composition chain");
  std::size_t total = 0;
  for (const auto& layer : chain.chain) total += layer.size();
  if (plans.size() != total)
    throw std::invalid_argument("composite_assemble: need one plan per component, layer-major");

  CompositeAssembly out;
  std::size_t pi = 0;
  for (const auto& layer : chain.chain) {
    out.layers.emplace_back();
    out.wiring.emplace_back();
    for (const ChainComponent& comp : layer) {
      out.layers.back().push_back(
          assemble_approximant(comp.series, plans[pi++], budget, target_B, false));
      out.wiring.back().push_back(comp.inputs);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

AffineComposeResult affine_compose(const std::vector<double>& A, const std::vector<double>& b,
                                   int in_dim, const Network& inner) {
  const int d_out = inner.d;
  if (in_dim < 1) throw std::invalid_argument("affine_compose: bad input dimension");
  if (A.size() != static_cast<std::size_t>(d_out) * static_cast<std::size_t>(in_dim) ||
      b.size() != static_cast<std::size_t>(d_out))
    throw std::invalid_argument("affine_compose: affine shape mismatch");

  // Row-wise extremes over the cube corners; for an affine map the interval
  // arithmetic bound is attained, so this check is exact.
  for (int r = 0; r < d_out; ++r) {
    double lo = b[static_cast<std::size_t>(r)];
    double hi = lo;
    for (int c = 0; c < in_dim; ++c) {
      const double a = A[static_cast<std::size_t>(r) * in_dim + c];
      lo += std::min(0.0, a);
      hi += std::max(0.0, a);
    }
    if (lo < -1e-12 || hi > 1.0 + 1e-12)
      throw std::domain_error("affine_compose: image of the unit cube leaves the unit cube");
  }

  AffineComposeResult res;
  for (double v : A) res.C_A = std::max(res.C_A, std::abs(v));
  for (double v : b) res.C_A = std::max(res.C_A, std::abs(v));
  res.B3_bound = res.C_A * static_cast<double>(in_dim + 1) * inner.sup_weight();

  Layer aff(in_dim, d_out);
  aff.W = A;
  aff.b = b;
  res.net = inner;
  prepend_affine(res.net, aff);
  res.realized_B = res.net.sup_weight();
  return res;
}

// ---------------------------------------------------------------------------

namespace {

long ceil_guarded(double v) {
  const double r = std::round(v);
  if (std::abs(v - r) < 1e-9 * std::max(1.0, std::abs(r)))
    return static_cast<long>(r);
  return static_cast<long>(std::ceil(v));
}

}  // namespace

HyperParams hyperparams_for_n(long n, double s_tilde, const RateConstants& c) {
  if (n < 1) throw std::invalid_argument("hyperparams_for_n: n must be >= 1");
  if (!(s_tilde > 0.0)) throw std::invalid_argument("hyperparams_for_n: s_tilde must be positive");
  HyperParams h;
  const double logn = std::log(static_cast<double>(n));
  h.N_n = std::max(1L, ceil_guarded(std::pow(static_cast<double>(n), 1.0 / (2.0 * s_tilde + 1.0))));
  h.shape.L = std::max(1L, ceil_guarded(c.C_L * logn));
  h.shape.D = std::max(1L, ceil_guarded(c.C_D * static_cast<double>(h.N_n)));
  h.shape.S = std::max(1L, ceil_guarded(c.C_S * static_cast<double>(h.N_n) * logn));
  h.shape.B = c.C_B;
  h.shape.validate();
  return h;
}

// ---------------------------------------------------------------------------

ErrorEstimate approx_error(const std::function<double(const std::vector<double>&)>& target,
                           const std::function<double(const std::vector<double>&)>& approx,
                           int d, double r, int n_points, Rng& rng) {
  if (d < 1 || n_points < 1) throw std::invalid_argument("approx_error: bad arguments");
  ErrorEstimate est;
  std::vector<double> x(static_cast<std::size_t>(d));
  if (std::isinf(r)) {
    int g = std::max(2, static_cast<int>(std::floor(
                            std::pow(static_cast<double>(n_points), 1.0 / d) + 1e-9)));
    std::vector<int> t(static_cast<std::size_t>(d), 0);
    while (true) {
      for (int i = 0; i < d; ++i)
        x[static_cast<std::size_t>(i)] = (t[static_cast<std::size_t>(i)] + 0.5) / g;
      est.value = std::max(est.value, std::abs(target(x) - approx(x)));
      int i = 0;
      while (i < d && ++t[static_cast<std::size_t>(i)] == g) t[static_cast<std::size_t>(i++)] = 0;
      if (i == d) break;
    }
    return est;
  }
  if (!(r > 0.0)) throw std::invalid_argument("approx_error: r must be positive");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int p = 0; p < n_points; ++p) {
    for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = rng.uniform01();
    const double a = std::pow(std::abs(target(x) - approx(x)), r);
    sum += a;
    sum_sq += a * a;
  }
  const double mean = sum / n_points;
  est.value = std::pow(mean, 1.0 / r);
  if (n_points > 1 && mean > 0.0) {
    const double var = std::max(0.0, (sum_sq - sum * sum / n_points) / (n_points - 1));
    const double se_mean = std::sqrt(var / n_points);
    est.std_error = se_mean * est.value / (r * mean);
  }
  return est;
}

ErrorEstimate approx_error(const TargetFunction& target, const BlockAssembly& net, double r,
                           int n_points, Rng& rng) {
  if (std::isinf(r)) {
    return approx_error([&](const std::vector<double>& x) { return target.eval(x); },
                        [&](const std::vector<double>& x) { return net.eval(x); }, target.d, r,
                        n_points, rng);
  }
  if (n_points < 1) throw std::invalid_argument("approx_error: bad arguments");
  std::vector<std::vector<double>> pts(static_cast<std::size_t>(n_points));
  for (auto& x : pts) {
    x.resize(static_cast<std::size_t>(target.d));
    for (double& v : x) v = rng.uniform01();
  }
  const std::vector<double> gv = net.eval_batch(pts);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double a = std::pow(std::abs(target.eval(pts[i]) - gv[i]), r);
    sum += a;
    sum_sq += a * a;
  }
  ErrorEstimate est;
  const double mean = sum / n_points;
  est.value = std::pow(mean, 1.0 / r);
  if (n_points > 1 && mean > 0.0) {
    const double var = std::max(0.0, (sum_sq - sum * sum / n_points) / (n_points - 1));
    const double se_mean = std::sqrt(var / n_points);
    est.std_error = se_mean * est.value / (r * mean);
  }
  return est;
}

ErrorEstimate approx_error(const TargetFunction& target, const Network& net, double r,
                           int n_points, Rng& rng) {
  Workspace ws;
  return approx_error([&](const std::vector<double>& x) { return target.eval(x); },
                      [&](const std::vector<double>& x) { return net.forward(x, ws); },
                      target.d, r, n_points, rng);
}

// ---------------------------------------------------------------------------

std::vector<ApproxRateRow> approx_rate_sweep(const SplineCoefficients& target,
                                             const std::vector<long>& budgets, double r,
                                             const GadgetBudget& gadget, int mc_points,
                                             unsigned seed, bool timing) {
  std::vector<ApproxRateRow> rows;
  rows.reserve(budgets.size());
  const TargetFunction tf = make_series(target);
  for (const long N : budgets) {
    const auto t0 = std::chrono::steady_clock::now();
    ApproxRateRow row;
    row.N = N;
    const ApproxPlan plan = plan_index_selection(target, N, r);
    row.K = plan.K;
    row.selected = plan.selected.size();
    const BlockAssembly as = assemble_approximant(target, plan, gadget, 0.0, false);
    row.L = as.depth();
    row.D = as.width();
    row.S = as.sparsity();
    row.B = as.sup_weight();
    Rng rng = Rng::child(seed, static_cast<std::uint64_t>(N));
    row.error_l2 = approx_error(tf, as, 2.0, mc_points, rng).value;
    Rng rng_sup = Rng::child(seed, static_cast<std::uint64_t>(N), 1);
    row.error_sup =
        approx_error(tf, as, kInf, std::min(mc_points, 4096), rng_sup).value;
    if (timing) {
      row.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace bnet
