#pragma once

#include <vector>

#include "bnet/network.hpp"

namespace bnet {

// --- composition utilities -------------------------------------------------
// Networks are treated as open chains (affine, ReLU, ..., affine) and glued
// so that the alternating structure is preserved: at every seam the two
// adjacent affine maps are merged into one, so composing never inserts spare
// identity layers.

// Exact identity with the requested number of hidden layers. Channels known
// to be nonnegative ride a single ReLU per layer; general channels use a
// (positive part, negative part) pair.
Network identity_net(int dim, int hidden, bool nonneg = false);

// Function composition outer(inner(x)); seam affines merged.
Network compose(const Network& outer, const Network& inner);

// Parallel blocks over one shared input vector: every net must have the same
// input dimension and hidden depth; outputs are concatenated.
Network stack_shared(const std::vector<Network>& nets);

// Rewrites the first affine map so the network reads its d_old inputs from
// positions `cols` of a wider input vector.
void remap_inputs(Network& net, int new_d, const std::vector<int>& cols);

// Appends hidden layers that compute the identity (see identity_net).
Network pad_depth(const Network& net, int extra_hidden, bool nonneg = false);

// Merges an affine map into the first/last affine layer of the chain.
void prepend_affine(Network& net, const Layer& aff);
void append_affine(Network& net, const Layer& aff);

// --- gadgets ---------------------------------------------------------------

// A compiled block together with its certified sup error over the design
// range and a sound output interval valid for arbitrary real inputs (the
// builders clamp their inputs, so the interval does not grow with |x|).
struct GadgetBuild {
  Network net;
  double err = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// Piecewise-linear interpolant of x^2 on [0,1] with 2^levels + 1 knots,
// realized by the sawtooth construction: one width-3 hidden layer per level,
// weights bounded by 4. Error is exactly bounded by 2^{-2 levels - 2};
// endpoints are exact, and 0 maps to exactly 0.
GadgetBuild square_gadget(int levels);

// Smallest level count with 2^{-2L-2} <= eps.
int square_levels_for(double eps);

// Product via polarization, (x + y)^2 - x^2 - y^2 = 2xy, on three shared
// squaring chains scaled to [0,1]. Inputs are clamped to the design box
// [-C, C]^2, so outputs stay bounded for all reals, a factor that is exactly
// zero forces an exactly zero product, and the certified error holds on the
// whole box. Error <= 6 C^2 2^{-2L-2} with L chosen for eps.
GadgetBuild mult_gadget(double C, double eps);

// x^m on [0, U] by squaring-and-multiplying with carried channels.
// m = 1 is the exact identity.
GadgetBuild power_gadget(int m, double U, double eps);

}  // namespace bnet
