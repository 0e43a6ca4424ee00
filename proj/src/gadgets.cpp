#include "bnet/gadgets.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bnet {

namespace {

Layer identity_affine(int dim) {
  Layer l;
  l.in = dim;
  l.out = dim;
  l.W.assign(static_cast<size_t>(dim) * dim, 0.0);
  l.b.assign(dim, 0.0);
  for (int i = 0; i < dim; ++i) l.W[static_cast<size_t>(i) * dim + i] = 1.0;
  return l;
}

// Affine map x -> second(first(x)).
Layer affine_product(const Layer& second, const Layer& first) {
  if (second.in != first.out)
    throw std::invalid_argument("affine_product: inner dim mismatch");
  Layer out;
  out.in = first.in;
  out.out = second.out;
  out.W.assign(static_cast<size_t>(out.out) * out.in, 0.0);
  out.b = second.b;
  for (int r = 0; r < second.out; ++r) {
    for (int k = 0; k < second.in; ++k) {
      const double w2 = second.w(r, k);
      if (w2 == 0.0) continue;
      out.b[r] += w2 * first.b[k];
      for (int c = 0; c < first.in; ++c)
        out.W[static_cast<size_t>(r) * out.in + c] += w2 * first.w(k, c);
    }
  }
  return out;
}

void require_plain(const Network& net, const char* who) {
  if (net.clip || !net.mask.empty())
    throw std::invalid_argument(std::string(who) +
                                ": expects an unclipped, unmasked chain");
}

}  // namespace

Network identity_net(int dim, int hidden, bool nonneg) {
  if (dim <= 0 || hidden < 0)
    throw std::invalid_argument("identity_net: bad shape");
  Network net;
  net.d = dim;
  if (hidden == 0) {
    net.layers.push_back(identity_affine(dim));
    return net;
  }
  if (nonneg) {
    // ReLU is the identity on nonnegative channels.
    for (int l = 0; l <= hidden; ++l) net.layers.push_back(identity_affine(dim));
    return net;
  }
  // Split x = ReLU(x) - ReLU(-x) once, carry both halves, recombine.
  Layer split;
  split.in = dim;
  split.out = 2 * dim;
  split.W.assign(static_cast<size_t>(2 * dim) * dim, 0.0);
  split.b.assign(2 * dim, 0.0);
  for (int i = 0; i < dim; ++i) {
    split.W[static_cast<size_t>(2 * i) * dim + i] = 1.0;
    split.W[static_cast<size_t>(2 * i + 1) * dim + i] = -1.0;
  }
  net.layers.push_back(split);
  for (int l = 1; l < hidden; ++l) net.layers.push_back(identity_affine(2 * dim));
  Layer join;
  join.in = 2 * dim;
  join.out = dim;
  join.W.assign(static_cast<size_t>(dim) * 2 * dim, 0.0);
  join.b.assign(dim, 0.0);
  for (int i = 0; i < dim; ++i) {
    join.W[static_cast<size_t>(i) * 2 * dim + 2 * i] = 1.0;
    join.W[static_cast<size_t>(i) * 2 * dim + 2 * i + 1] = -1.0;
  }
  net.layers.push_back(join);
  return net;
}

Network compose(const Network& outer, const Network& inner) {
  require_plain(inner, "compose");
  if (!outer.mask.empty()) throw std::invalid_argument("compose: masked outer");
  if (outer.d != inner.output_dim())
    throw std::invalid_argument("compose: dimension mismatch at seam");
  Network net;
  net.d = inner.d;
  net.clip = outer.clip;
  net.layers.reserve(inner.layers.size() + outer.layers.size() - 1);
  for (size_t i = 0; i + 1 < inner.layers.size(); ++i)
    net.layers.push_back(inner.layers[i]);
  net.layers.push_back(affine_product(outer.layers.front(), inner.layers.back()));
  for (size_t i = 1; i < outer.layers.size(); ++i)
    net.layers.push_back(outer.layers[i]);
  return net;
}

Network stack_shared(const std::vector<Network>& nets) {
  if (nets.empty()) throw std::invalid_argument("stack_shared: empty list");
  const int d = nets.front().d;
  const size_t depth = nets.front().layers.size();
  for (const Network& n : nets) {
    require_plain(n, "stack_shared");
    if (n.d != d || n.layers.size() != depth)
      throw std::invalid_argument("stack_shared: blocks must share input and depth");
  }
  Network net;
  net.d = d;
  for (size_t t = 0; t < depth; ++t) {
    int in_total = 0;
    int out_total = 0;
    for (const Network& n : nets) {
      in_total += n.layers[t].in;
      out_total += n.layers[t].out;
    }
    Layer L;
    L.out = out_total;
    L.in = (t == 0) ? d : in_total;
    L.W.assign(static_cast<size_t>(L.out) * L.in, 0.0);
    L.b.assign(out_total, 0.0);
    int ro = 0;
    int co = 0;
    for (const Network& n : nets) {
      const Layer& src = n.layers[t];
      const int cbase = (t == 0) ? 0 : co;
      for (int r = 0; r < src.out; ++r) {
        L.b[ro + r] = src.b[r];
        for (int c = 0; c < src.in; ++c)
          L.W[static_cast<size_t>(ro + r) * L.in + cbase + c] = src.w(r, c);
      }
      ro += src.out;
      co += src.in;
    }
    net.layers.push_back(std::move(L));
  }
  return net;
}

void remap_inputs(Network& net, int new_d, const std::vector<int>& cols) {
  if (static_cast<int>(cols.size()) != net.d)
    throw std::invalid_argument("remap_inputs: need one column per input");
  for (int c : cols)
    if (c < 0 || c >= new_d) throw std::invalid_argument("remap_inputs: column out of range");
  Layer& first = net.layers.front();
  std::vector<double> W(static_cast<size_t>(first.out) * new_d, 0.0);
  for (int r = 0; r < first.out; ++r)
    for (int c = 0; c < first.in; ++c)
      W[static_cast<size_t>(r) * new_d + cols[c]] += first.w(r, c);
  first.W = std::move(W);
  first.in = new_d;
  net.d = new_d;
}

Network pad_depth(const Network& net, int extra_hidden, bool nonneg) {
  if (extra_hidden == 0) return net;
  return compose(identity_net(net.output_dim(), extra_hidden, nonneg), net);
}

void prepend_affine(Network& net, const Layer& aff) {
  net.layers.front() = affine_product(net.layers.front(), aff);
  net.d = aff.in;
}

void append_affine(Network& net, const Layer& aff) {
  net.layers.back() = affine_product(aff, net.layers.back());
}

int square_levels_for(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("square_levels_for: eps must be positive");
  int levels = 0;
  while (levels < 60 && std::ldexp(1.0, -2 * levels - 2) > eps) ++levels;
  return levels;
}

GadgetBuild square_gadget(int levels) {
  if (levels < 0) throw std::invalid_argument("square_gadget: negative levels");
  GadgetBuild g;
  g.err = std::ldexp(1.0, -2 * levels - 2);
  g.lo = 0.0;
  g.hi = 1.0;
  g.net.d = 1;
  if (levels == 0) {
    // Chord through (0,0) and (1,1): the level-0 interpolant is x itself.
    g.net.layers.push_back(identity_affine(1));
    return g;
  }
  // Each level refines the interpolant by one sawtooth fold. The running
  // state between layers is (a, u): a the interpolant so far, u the current
  // sawtooth value, both in [0, 1]. A layer materializes ReLU(u),
  // ReLU(u - 1/2), ReLU(u - 1) and, beyond the first level, ReLU(a).
  auto tooth_rows = [](Layer& L, int row, int ucol, int ncols) {
    const double off[3] = {0.0, -0.5, -1.0};
    for (int t = 0; t < 3; ++t) {
      L.W[static_cast<size_t>(row + t) * ncols + ucol] = 1.0;
      L.b[row + t] = off[t];
    }
  };
  {
    Layer L;
    L.in = 1;
    L.out = 3;
    L.W.assign(3, 0.0);
    L.b.assign(3, 0.0);
    tooth_rows(L, 0, 0, 1);
    g.net.layers.push_back(L);
  }
  // From units (h1, h2, h3) of level l: the sawtooth value is
  // u_l = 2h1 - 4h2 + 2h3 and the interpolant advances by
  // a_l = a_{l-1} - u_l / 4^l (with a_0 = x, which is h1 at the first level).
  for (int l = 1; l < levels; ++l) {
    const bool first = (l == 1);
    const int in = first ? 3 : 4;
    const double s = std::ldexp(1.0, -2 * l);  // 4^{-l}
    Layer L;
    L.in = in;
    L.out = 4;
    L.W.assign(static_cast<size_t>(4) * in, 0.0);
    L.b.assign(4, 0.0);
    const int acol = 0;  // h1 doubles as the carry at level 1
    const int h1 = first ? 0 : 1, h2 = first ? 1 : 2, h3 = first ? 2 : 3;
    L.W[static_cast<size_t>(0) * in + acol] += 1.0;
    L.W[static_cast<size_t>(0) * in + h1] += -2.0 * s;
    L.W[static_cast<size_t>(0) * in + h2] += 4.0 * s;
    L.W[static_cast<size_t>(0) * in + h3] += -2.0 * s;
    // sawtooth rows read u_l and fold it once more
    for (int t = 0; t < 3; ++t) {
      const double off[3] = {0.0, -0.5, -1.0};
      L.W[static_cast<size_t>(1 + t) * in + h1] = 2.0;
      L.W[static_cast<size_t>(1 + t) * in + h2] = -4.0;
      L.W[static_cast<size_t>(1 + t) * in + h3] = 2.0;
      L.b[1 + t] = off[t];
    }
    g.net.layers.push_back(L);
  }
  {
    const bool single = (levels == 1);
    const int in = single ? 3 : 4;
    const double s = std::ldexp(1.0, -2 * levels);
    Layer L;
    L.in = in;
    L.out = 1;
    L.W.assign(in, 0.0);
    L.b.assign(1, 0.0);
    const int acol = 0;
    const int h1 = single ? 0 : 1, h2 = single ? 1 : 2, h3 = single ? 2 : 3;
    L.W[acol] += 1.0;
    L.W[h1] += -2.0 * s;
    L.W[h2] += 4.0 * s;
    L.W[h3] += -2.0 * s;
    g.net.layers.push_back(L);
  }
  return g;
}

GadgetBuild mult_gadget(double C, double eps) {
  if (!(C > 0.0) || !(eps > 0.0))
    throw std::invalid_argument("mult_gadget: C and eps must be positive");
  const int levels = square_levels_for(eps / (6.0 * C * C));
  GadgetBuild sq = square_gadget(levels);

  // Front: clamp01(|x + y| / 2C), clamp01(|x| / 2C), clamp01(|y| / 2C).
  // clamp01(|p|) = ReLU(p) + ReLU(-p) - ReLU(p - 1) - ReLU(-p - 1).
  Network front;
  front.d = 2;
  {
    Layer L;
    L.in = 2;
    L.out = 12;
    L.W.assign(24, 0.0);
    L.b.assign(12, 0.0);
    const double inv = 1.0 / (2.0 * C);
    const double rows[3][2] = {{inv, inv}, {inv, 0.0}, {0.0, inv}};
    for (int t = 0; t < 3; ++t) {
      const double sgn[4] = {1.0, -1.0, 1.0, -1.0};
      const double off[4] = {0.0, 0.0, -1.0, -1.0};
      for (int u = 0; u < 4; ++u) {
        const int r = 4 * t + u;
        L.W[static_cast<size_t>(r) * 2 + 0] = sgn[u] * rows[t][0];
        L.W[static_cast<size_t>(r) * 2 + 1] = sgn[u] * rows[t][1];
        L.b[r] = off[u];
      }
    }
    front.layers.push_back(L);
  }
  {
    Layer A;
    A.in = 12;
    A.out = 3;
    A.W.assign(36, 0.0);
    A.b.assign(3, 0.0);
    for (int t = 0; t < 3; ++t) {
      const double sgn[4] = {1.0, 1.0, -1.0, -1.0};
      for (int u = 0; u < 4; ++u) A.W[static_cast<size_t>(t) * 12 + 4 * t + u] = sgn[u];
    }
    front.layers.push_back(A);
  }

  // Three identical squaring chains over the clamped channels. Sharing one
  // weight set makes the chain outputs for |x+y|/2C and |x|/2C bitwise equal
  // whenever y is exactly zero. The outputs are materialized as activations
  // (they are nonnegative, so the ReLU is exact) before the polarization row,
  // which keeps the subtraction grouped as (s) - (x) - (y) and therefore
  // exactly zero in that case.
  std::vector<Network> chains;
  for (int t = 0; t < 3; ++t) {
    Network c = sq.net;
    remap_inputs(c, 3, {t});
    chains.push_back(std::move(c));
  }
  Network body = pad_depth(stack_shared(chains), 1, /*nonneg=*/true);
  {
    Layer out;
    out.in = 3;
    out.out = 1;
    const double s = 2.0 * C * C;
    out.W = {s, -s, -s};
    out.b = {0.0};
    append_affine(body, out);
  }

  GadgetBuild g;
  g.net = compose(body, front);
  g.err = 6.0 * C * C * sq.err;
  g.lo = -4.0 * C * C;
  g.hi = 2.0 * C * C;
  return g;
}

GadgetBuild power_gadget(int m, double U, double eps) {
  if (m < 1 || !(U >= 1.0) || !(eps > 0.0))
    throw std::invalid_argument("power_gadget: need m >= 1, U >= 1, eps > 0");
  GadgetBuild g;
  if (m == 1) {
    g.net.d = 1;
    g.net.layers.push_back(identity_affine(1));
    g.err = 0.0;
    g.lo = 0.0;
    g.hi = U;
    return g;
  }
  if (m == 2) {
    GadgetBuild sq = square_gadget(square_levels_for(eps / (U * U)));
    g.net = sq.net;
    Layer pre;
    pre.in = 1;
    pre.out = 1;
    pre.W = {1.0 / U};
    pre.b = {0.0};
    prepend_affine(g.net, pre);
    Layer post;
    post.in = 1;
    post.out = 1;
    post.W = {U * U};
    post.b = {0.0};
    append_affine(g.net, post);
    g.err = U * U * sq.err;
    g.lo = 0.0;
    g.hi = U * U;
    return g;
  }
  if (m % 2 == 0) {
    const int h = m / 2;
    const double peak = std::pow(U, h);
    // p^2 and p_hat^2 differ by at most 2 peak * inner error on [0, U].
    GadgetBuild inner = power_gadget(h, U, eps / (4.0 * peak));
    GadgetBuild mult = mult_gadget(peak, eps / 2.0);
    Layer dup;
    dup.in = 1;
    dup.out = 2;
    dup.W = {1.0, 1.0};
    dup.b = {0.0, 0.0};
    Network squared = mult.net;
    prepend_affine(squared, dup);
    g.net = compose(squared, inner.net);
    g.err = mult.err + 2.0 * peak * inner.err;
    g.lo = mult.lo;
    g.hi = mult.hi;
    return g;
  }
  // Odd powers: compute r^{m-1}, carry r alongside, multiply.
  const double peak = std::pow(U, m - 1);
  GadgetBuild inner = power_gadget(m - 1, U, eps / (2.0 * U));
  GadgetBuild mult = mult_gadget(peak, eps / 2.0);
  const int inner_hidden = inner.net.hidden_count();
  Network carry = identity_net(1, inner_hidden, /*nonneg=*/true);
  Network pair = stack_shared({carry, inner.net});
  g.net = compose(mult.net, pair);
  g.err = mult.err + U * inner.err;
  g.lo = mult.lo;
  g.hi = mult.hi;
  return g;
}

}  // namespace bnet
