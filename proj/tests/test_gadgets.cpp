#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "bnet/gadgets.hpp"
#include "bnet/network.hpp"
#include "bnet/rng.hpp"

using namespace bnet;

namespace {

// Independent oracle: piecewise-linear interpolant of x^2 at knots i/2^L.
double square_interp(int levels, double x) {
  const double n = std::ldexp(1.0, levels);
  const double i = std::floor(x * n);
  const double x0 = i / n, x1 = (i + 1) / n;
  const double y0 = x0 * x0, y1 = x1 * x1;
  return y0 + (x - x0) * (y1 - y0) / (x1 - x0);
}

Network random_net(Rng& rng, int d, const std::vector<int>& widths) {
  Network net;
  net.d = d;
  int in = d;
  for (size_t i = 0; i <= widths.size(); ++i) {
    const int out = (i < widths.size()) ? widths[i] : 1;
    Layer l;
    l.in = in;
    l.out = out;
    l.W.resize(static_cast<size_t>(in) * out);
    l.b.resize(out);
    for (double& w : l.W) w = 2.0 * rng.uniform01() - 1.0;
    for (double& b : l.b) b = 0.5 * (2.0 * rng.uniform01() - 1.0);
    net.layers.push_back(std::move(l));
    in = out;
  }
  return net;
}

}  // namespace

TEST_CASE("square gadget matches the dyadic interpolant of x^2") {
  for (int levels : {1, 2, 3, 5}) {
    GadgetBuild g = square_gadget(levels);
    CHECK(g.net.hidden_count() == levels);
    // One fold needs no sawtooth re-expansion, so the +-4 rows appear from
    // level 2 on.
    CHECK(g.net.sup_weight() == (levels >= 2 ? 4.0 : 1.0));
    double worst_true = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double x = i / 400.0;
      const double y = g.net.forward(std::vector<double>{x});
      CHECK(y == doctest::Approx(square_interp(levels, x)).epsilon(1e-12));
      worst_true = std::max(worst_true, std::abs(y - x * x));
    }
    CHECK(worst_true <= g.err + 1e-15);
  }
}

TEST_CASE("square gadget endpoint and knot exactness") {
  GadgetBuild g = square_gadget(2);
  CHECK(g.net.forward(std::vector<double>{0.0}) == 0.0);
  CHECK(g.net.forward(std::vector<double>{1.0}) == 1.0);
  // f_2 interpolates at quarters; between 1/4 and 1/2 it is the chord.
  CHECK(g.net.forward(std::vector<double>{0.25}) == doctest::Approx(0.0625));
  CHECK(g.net.forward(std::vector<double>{0.3}) == doctest::Approx(0.1));
  // Negative inputs die at the first layer.
  CHECK(g.net.forward(std::vector<double>{-0.7}) == 0.0);
}

TEST_CASE("mult gadget approximates products on its design box") {
  for (double C : {1.0, 3.0}) {
    GadgetBuild g = mult_gadget(C, 1e-3);
    CHECK(g.err <= 1e-3);
    Rng rng(2024);
    double worst = 0.0;
    for (int t = 0; t < 500; ++t) {
      const double x = C * (2.0 * rng.uniform01() - 1.0);
      const double y = C * (2.0 * rng.uniform01() - 1.0);
      const double v = g.net.forward(std::vector<double>{x, y});
      worst = std::max(worst, std::abs(v - x * y));
    }
    CHECK(worst <= g.err + 1e-12);
  }
}

TEST_CASE("mult gadget is exactly zero when either factor is zero") {
  GadgetBuild g = mult_gadget(2.0, 1e-4);
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    const double x = 4.0 * rng.uniform01() - 2.0;
    CHECK(g.net.forward(std::vector<double>{x, 0.0}) == 0.0);
    CHECK(g.net.forward(std::vector<double>{0.0, x}) == 0.0);
  }
}

TEST_CASE("mult gadget output stays in its certified interval off the box") {
  GadgetBuild g = mult_gadget(1.0, 1e-2);
  for (double x : {-50.0, -1.5, 0.2, 3.0, 1e6}) {
    for (double y : {-1e6, -0.4, 2.0, 77.0}) {
      const double v = g.net.forward(std::vector<double>{x, y});
      CHECK(v >= g.lo - 1e-12);
      CHECK(v <= g.hi + 1e-12);
    }
  }
}

TEST_CASE("power gadget tracks r^m on [0, U]") {
  const double U = 3.0;
  for (int m : {1, 2, 3, 4, 5}) {
    GadgetBuild g = power_gadget(m, U, 1e-3);
    CHECK(g.err <= 1e-3 + 1e-15);
    double worst = 0.0;
    for (int i = 0; i <= 300; ++i) {
      const double r = U * i / 300.0;
      const double v = g.net.forward(std::vector<double>{r});
      worst = std::max(worst, std::abs(v - std::pow(r, m)));
    }
    CHECK(worst <= g.err + 1e-10);
    CHECK(g.net.forward(std::vector<double>{0.0}) == 0.0);
  }
  // m = 1 is the exact identity, no hidden layers.
  CHECK(power_gadget(1, U, 1e-6).net.hidden_count() == 0);
  CHECK(power_gadget(1, U, 1e-6).net.forward(std::vector<double>{1.7}) == 1.7);
}

TEST_CASE("compose equals pointwise composition") {
  Rng rng(11);
  Network f = random_net(rng, 3, {4, 2});
  Network gnet = random_net(rng, 2, {5});
  // f expects 3 inputs, so feed it three stacked copies of g over R^2.
  std::vector<Network> copies{gnet, gnet, gnet};
  Network inner = stack_shared(copies);
  Network comp = compose(f, inner);
  CHECK(comp.hidden_count() == f.hidden_count() + inner.hidden_count());
  for (int t = 0; t < 100; ++t) {
    std::vector<double> x{rng.uniform01(), rng.uniform01()};
    std::vector<double> mid = inner.forward_vec(x);
    const double direct = f.forward(mid);
    const double fused = comp.forward(x);
    CHECK(fused == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("stack_shared concatenates block outputs") {
  Rng rng(12);
  Network a = random_net(rng, 2, {3, 3});
  Network b = random_net(rng, 2, {4, 3});
  Network s = stack_shared({a, b});
  CHECK(s.output_dim() == 2);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x{rng.uniform01(), rng.uniform01()};
    std::vector<double> out = s.forward_vec(x);
    CHECK(out[0] == a.forward(x));
    CHECK(out[1] == b.forward(x));
  }
}

TEST_CASE("remap_inputs reads from the requested columns") {
  Rng rng(13);
  Network a = random_net(rng, 2, {3});
  Network wide = a;
  remap_inputs(wide, 5, {4, 1});
  for (int t = 0; t < 50; ++t) {
    std::vector<double> z{rng.uniform01(), rng.uniform01(), rng.uniform01(),
                          rng.uniform01(), rng.uniform01()};
    // Accumulation order over input columns changes, so only near-exact.
    CHECK(wide.forward(z) ==
          doctest::Approx(a.forward(std::vector<double>{z[4], z[1]})).epsilon(1e-14));
  }
  CHECK_THROWS_AS(remap_inputs(a, 1, {0, 0, 0}), std::invalid_argument);
}

TEST_CASE("identity padding preserves values") {
  Rng rng(14);
  Network a = random_net(rng, 2, {3});
  Network padded = pad_depth(a, 3);
  CHECK(padded.hidden_count() == a.hidden_count() + 3);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x{2.0 * rng.uniform01() - 1.0, 2.0 * rng.uniform01() - 1.0};
    CHECK(padded.forward(x) == doctest::Approx(a.forward(x)).epsilon(1e-13));
  }
  Network id = identity_net(3, 2);
  std::vector<double> v{-0.3, 0.0, 1.7};
  std::vector<double> w = id.forward_vec(v);
  CHECK(w[0] == -0.3);
  CHECK(w[1] == 0.0);
  CHECK(w[2] == 1.7);
}

TEST_CASE("prepend and append affine fold into the end layers") {
  Rng rng(15);
  Network a = random_net(rng, 2, {4});
  const size_t depth_before = a.layers.size();
  Layer pre;
  pre.in = 3;
  pre.out = 2;
  pre.W = {1.0, 0.0, -2.0, 0.0, 0.5, 1.0};
  pre.b = {0.1, -0.2};
  Network folded = a;
  prepend_affine(folded, pre);
  Layer post;
  post.in = 1;
  post.out = 2;
  post.W = {2.0, -1.0};
  post.b = {0.0, 3.0};
  append_affine(folded, post);
  CHECK(folded.layers.size() == depth_before);
  CHECK(folded.d == 3);
  CHECK(folded.output_dim() == 2);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> z{rng.uniform01(), rng.uniform01(), rng.uniform01()};
    std::vector<double> mid{z[0] + 0.0 * z[1] - 2.0 * z[2] + 0.1,
                            0.5 * z[1] + 1.0 * z[2] - 0.2};
    const double y = a.forward(mid);
    std::vector<double> out = folded.forward_vec(z);
    CHECK(out[0] == doctest::Approx(2.0 * y).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(-y + 3.0).epsilon(1e-12));
  }
}
