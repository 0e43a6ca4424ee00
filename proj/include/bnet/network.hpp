#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bnet {

// One affine map; rows index output units.
struct Layer {
  int in = 0;
  int out = 0;
  std::vector<double> W;  // row-major, out x in
  std::vector<double> b;  // length out

  Layer() = default;
  Layer(int in_, int out_)
      : in(in_), out(out_),
        W(static_cast<std::size_t>(in_) * static_cast<std::size_t>(out_), 0.0),
        b(static_cast<std::size_t>(out_), 0.0) {}

  double& w(int r, int c) { return W[static_cast<std::size_t>(r) * in + c]; }
  double w(int r, int c) const { return W[static_cast<std::size_t>(r) * in + c]; }
};

// Scratch buffers so repeated forward passes do not allocate.
struct Workspace {
  std::vector<double> a;
  std::vector<double> z;
};

// Feed-forward ReLU network: layers.size() affine maps with ReLU between
// consecutive ones (none after the last). `clip` clamps a scalar output to
// [-1, 1], which is exactly the two-unit clipping gadget with F = 1.
//
// The optional sparsity mask is aligned with the canonical parameter
// flattening (per layer: all of W row-major, then b). Masked-out parameters
// are held at exactly zero; set_mask enforces that on the stored values, so
// the forward pass never needs to consult the mask.
struct Network {
  int d = 0;
  std::vector<Layer> layers;
  bool clip = false;
  std::vector<std::uint8_t> mask;

  int hidden_count() const { return static_cast<int>(layers.size()) - 1; }
  int output_dim() const { return layers.empty() ? 0 : layers.back().out; }
  // Widest layer output among hidden layers (the D in shape budgets). For a
  // depth-0 network (single affine) this is 0.
  int max_width() const;
  std::vector<int> hidden_widths() const;

  std::size_t param_total() const;    // dense parameter count T
  std::size_t nonzero_count() const;  // realized sparsity S
  double sup_weight() const;          // realized B, max over |W| and |b|

  void validate() const;

  double forward(const std::vector<double>& x, Workspace& ws) const;
  double forward(const std::vector<double>& x) const;
  // Multi-output variant (no clipping); used when a network is an internal
  // block of a larger assembly.
  std::vector<double> forward_vec(const std::vector<double>& x, Workspace& ws) const;
  std::vector<double> forward_vec(const std::vector<double>& x) const;

  // Flat parameter view in canonical order.
  double get_param(std::size_t idx) const;
  void set_param(std::size_t idx, double v);
  void set_mask(std::vector<std::uint8_t> m);  // zeroes masked-out parameters
  bool mask_allows(std::size_t idx) const { return mask.empty() || mask[idx] != 0; }

  std::string to_json(int indent = -1) const;
  static Network from_json(const std::string& text);
};

// Dense parameter count of the rectangular shape: input d, L hidden layers of
// width D, scalar output. L = 0 degenerates to a single affine map.
std::size_t param_count(long L, long D, long d);

// Shape budget (L, D, S, B) for a network class.
struct ShapeBudget {
  long L = 1;
  long D = 1;
  long S = 1;
  double B = 1.0;

  void validate() const {
    if (L < 0 || D < 1 || S < 1 || !(B > 0.0))
      throw std::invalid_argument("shape budget entries must be positive");
  }
};

// Scalar clipping gadget Clip_F(x) = F[ReLU(x/F + 1) - ReLU(x/F - 1)] - F,
// the identity on [-F, F] and saturating outside.
Network clip_gadget(double F);

// Channel-wise clamp to [0, 1]: ReLU(x) - ReLU(x - 1) per channel.
Network clip01_gadget(int dim);

// Rescales all affine maps by positive per-layer factors with product one, so
// the realized function is unchanged (positive homogeneity of ReLU; biases
// pick up the cumulative factor). Factors geometrically equalize the per-layer
// weight sup-norms. Throws RescaleInfeasible when even the equalized network
// exceeds target_B.
struct RescaleInfeasible : std::runtime_error {
  double min_achievable;
  explicit RescaleInfeasible(double b)
      : std::runtime_error("rescale_weights: target B below achievable " +
                           std::to_string(b)),
        min_achievable(b) {}
};

void rescale_weights(Network& net, double target_B);

}  // namespace bnet
