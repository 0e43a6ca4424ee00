#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bnet/besov.hpp"
#include "bnet/coefficients.hpp"
#include "bnet/rng.hpp"

namespace bnet {

// Random member of the radius-R ball: coefficients drawn levelwise with scale
// 2^{-k} |J(k)|^{-1/p}, magnitudes uniform in [1/2, 1] with random signs, then
// rescaled once so the sequence norm equals `radius` exactly. One valid
// sampler among many; the class only asks for ball membership.
SplineCoefficients sample_besov_ball(Rng& rng, const BesovParams& params, long K,
                                     double radius);

enum class TargetKind {
  spline_series,
  additive,
  multiplicative,
  rotated,
  piecewise,
  figure1_f1,
  figure1_f2,
  composite_chain,
};

// Axis-aligned closed box inside the unit cube.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  bool contains(const std::vector<double>& x) const;
};

// One component function of a composition layer: which coordinates of the
// previous layer it reads (0-based) and its spline series over those inputs.
struct ChainComponent {
  std::vector<int> inputs;
  SplineCoefficients series;
};

// Ground-truth target over [0,1]^d. The payload depends on `kind`; eval is
// deterministic (same x, bitwise same value) and |f(x)| <= bound everywhere,
// with `scale` recording any normalization applied at construction.
struct TargetFunction {
  TargetKind kind = TargetKind::spline_series;
  int d = 0;
  double bound = 1.0;
  double scale = 1.0;

  std::vector<SplineCoefficients> components;  // series / factors / pieces
  std::vector<Box> boxes;                      // piecewise regions
  double tau = 0.0;                            // rotation angle
  std::vector<double> A;                       // rotation affine, row-major d x d
  std::vector<double> b;
  std::shared_ptr<const TargetFunction> inner;          // rotated wrappee
  std::vector<long> d_chain;                            // composite d^(0..H)
  std::vector<std::vector<ChainComponent>> chain;       // composite layers

  double eval(const std::vector<double>& x) const;

  std::string to_json(int indent = -1) const;
  static TargetFunction from_json(const std::string& text);
};

TargetFunction make_series(SplineCoefficients series);

// f(x) = sum_i g_i(x_i) over univariate factors, rescaled to sup <= 1 when the
// plain sum would exceed it (the factor lands in `scale`).
TargetFunction make_additive(std::vector<SplineCoefficients> g);

// f(x) = prod_i g_i(x_i), same normalization policy as make_additive.
TargetFunction make_multiplicative(std::vector<SplineCoefficients> g);

// f = g(Ax + b) with A the planar rotation by tau in coordinates (0,1) scaled
// by 1/sqrt(d), padded with I/sqrt(d) on the remaining axes, and b = (I - A)c
// for the cube center c. Since A contracts distances to c by 1/sqrt(d), the
// image of the cube stays inside the cube for every tau.
TargetFunction make_rotated(TargetFunction g, double tau);

// f(x) = sum_i 1{x in boxes[i]} g_i(x); overlaps add.
TargetFunction make_piecewise(std::vector<Box> boxes, std::vector<SplineCoefficients> g);

// Closed-form two-dimensional examples:
//   1: 1{x1 in [1/2,1]} + sin(2 pi x2)    2: |x1 - 1/2| + (x2 - 1/2)^2
TargetFunction figure1_function(int which);

// Composition f_H o ... o f_1; layer h has d_chain[h] components, each reading
// its ChainComponent::inputs from the previous layer's output. Intermediate
// outputs (h < H) are clamped into [0,1] so downstream domains are respected.
TargetFunction make_composite_chain(std::vector<long> d_chain,
                                    std::vector<std::vector<ChainComponent>> layers);

// Rate-determining quantities for a composition class. Layers are 1-based in
// the reported argmin.
struct CompositeRateParams {
  std::vector<double> s_tilde;             // per-layer intrinsic smoothness
  std::vector<double> t_star_layer;        // s_min^{(h)} / s_tilde^{(h)}
  std::vector<double> s_tilde_star_layer;  // effective smoothness through later layers
  int h_star = 1;
  double t_star = 0.0;
  double s_tilde_star = 0.0;
};

// d_circ has length H+1 (d^(0) = ambient input dim, d^(H) = 1); t_circ[h-1]
// is the arity of layer h's components and s_circ[h-1] their shared smoothness
// vector (dimension t_circ[h-1]). Effective smoothness per layer:
//   s~*(h) = s~(h) * prod_{k>h} min(s_min^{(k)} - t*^{(k)}/p, 1)
// and s~* = min_h s~*(h), ties broken toward the smallest h.
CompositeRateParams composite_rate_params(const std::vector<long>& d_circ,
                                          const std::vector<long>& t_circ,
                                          const std::vector<SmoothnessVector>& s_circ,
                                          double p);

}  // namespace bnet
