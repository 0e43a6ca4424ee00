#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "bnet/targets.hpp"

using namespace bnet;

namespace {

BesovParams uni_params() {
  BesovParams p;
  p.p = 2.0;
  p.q = 2.0;
  p.m = 2;
  p.s = SmoothnessVector{{1.0}};
  return p;
}

BesovParams aniso_params() {
  BesovParams p;
  p.p = 2.0;
  p.q = 2.0;
  p.m = 2;
  p.s = SmoothnessVector{{0.5, 1.0}};
  return p;
}

SplineCoefficients random_series(const BesovParams& params, long K, unsigned seed) {
  Rng rng(seed);
  return sample_besov_ball(rng, params, K, 1.0);
}

}  // namespace

TEST_CASE("besov ball samples hit the requested norm exactly") {
  const BesovParams params = aniso_params();
  for (unsigned seed = 1; seed <= 12; ++seed) {
    Rng rng(seed);
    SplineCoefficients c = sample_besov_ball(rng, params, 3, 1.0);
    CHECK(sequence_norm(c) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(!c.entries.empty());
  }
}

TEST_CASE("besov ball sampling is deterministic and homogeneous in radius") {
  const BesovParams params = uni_params();
  Rng a(99), b(99), hseed(99);
  SplineCoefficients full = sample_besov_ball(a, params, 4, 1.0);
  SplineCoefficients again = sample_besov_ball(b, params, 4, 1.0);
  CHECK(full.entries == again.entries);

  SplineCoefficients half = sample_besov_ball(hseed, params, 4, 0.5);
  REQUIRE(half.entries.size() == full.entries.size());
  auto it = full.entries.begin();
  for (const auto& [idx, v] : half.entries) {
    CHECK(idx == it->first);
    CHECK(v == 0.5 * it->second);  // rescaling by a power of two is exact
    ++it;
  }
}

TEST_CASE("additive targets sum per-coordinate series") {
  SplineCoefficients g1 = random_series(uni_params(), 2, 5);
  SplineCoefficients g2 = random_series(uni_params(), 2, 6);
  TargetFunction f = make_additive({g1, g2});
  CHECK(f.d == 2);
  CHECK(f.bound <= 1.0 + 1e-12);

  for (int t = 0; t < 10; ++t) {
    const double x1 = (t + 0.5) / 10.0, x2 = 1.0 - t / 10.0;
    const double direct = expansion_eval(g1, {x1}) + expansion_eval(g2, {x2});
    CHECK(f.eval({x1, x2}) == doctest::Approx(f.scale * direct).epsilon(1e-13));
  }

  // zero factors give the zero function
  SplineCoefficients z;
  z.params = uni_params();
  TargetFunction zero = make_additive({z, z});
  CHECK(zero.eval({0.3, 0.8}) == 0.0);
  CHECK(zero.scale == 1.0);

  // symmetric factors commute with coordinate swap
  TargetFunction sym = make_additive({g1, g1});
  CHECK(sym.eval({0.2, 0.9}) == sym.eval({0.9, 0.2}));

  CHECK_THROWS_AS(make_additive({random_series(aniso_params(), 1, 7)}),
                  std::invalid_argument);
}

TEST_CASE("multiplicative targets multiply factors and vanish with any zero factor") {
  SplineCoefficients g1 = random_series(uni_params(), 2, 8);
  SplineCoefficients g2 = random_series(uni_params(), 2, 9);
  SplineCoefficients g3 = random_series(uni_params(), 2, 10);
  TargetFunction f = make_multiplicative({g1, g2, g3});
  for (int t = 0; t < 10; ++t) {
    const double x1 = t / 10.0, x2 = (t + 0.3) / 10.5, x3 = 1.0 - t / 11.0;
    const double direct = expansion_eval(g1, {x1}) * expansion_eval(g2, {x2}) *
                          expansion_eval(g3, {x3});
    CHECK(f.eval({x1, x2, x3}) == doctest::Approx(f.scale * direct).epsilon(1e-12));
  }

  SplineCoefficients z;
  z.params = uni_params();
  TargetFunction annihilated = make_multiplicative({g1, z});
  for (double x : {0.1, 0.5, 0.9}) CHECK(annihilated.eval({x, x}) == 0.0);
}

TEST_CASE("rotated targets use the contracted planar rotation") {
  TargetFunction g = make_series(random_series(aniso_params(), 2, 11));
  const double inv_root2 = 1.0 / std::sqrt(2.0);

  TargetFunction f0 = make_rotated(g, 0.0);
  CHECK(f0.A[0] == doctest::Approx(inv_root2));
  CHECK(f0.A[1] == 0.0);
  CHECK(f0.A[3] == doctest::Approx(inv_root2));
  // b = (I - A)c with c the center: (1 - 1/sqrt(2))/2 per coordinate
  CHECK(f0.b[0] == doctest::Approx(0.5 * (1.0 - inv_root2)).epsilon(1e-14));
  CHECK(f0.b[1] == doctest::Approx(0.5 * (1.0 - inv_root2)).epsilon(1e-14));

  TargetFunction f45 = make_rotated(g, 3.14159265358979323846 / 4.0);
  CHECK(f45.b[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(f45.b[1]) < 1e-14);

  // all four corners land inside the cube for a sweep of angles
  for (double tau : {0.0, 0.5, 3.14159265358979323846 / 4.0, 1.3, 3.0}) {
    TargetFunction f = make_rotated(g, tau);
    for (double cx : {0.0, 1.0}) {
      for (double cy : {0.0, 1.0}) {
        const double y0 = f.A[0] * cx + f.A[1] * cy + f.b[0];
        const double y1 = f.A[2] * cx + f.A[3] * cy + f.b[1];
        CHECK(y0 >= -1e-12);
        CHECK(y0 <= 1.0 + 1e-12);
        CHECK(y1 >= -1e-12);
        CHECK(y1 <= 1.0 + 1e-12);
      }
    }
  }

  // the center is (nearly) a fixed point and the range cannot grow
  TargetFunction f = make_rotated(g, 0.7);
  CHECK(f.eval({0.5, 0.5}) == doctest::Approx(g.eval({0.5, 0.5})).epsilon(1e-12));
  double sup_f = 0.0, sup_g = 0.0;
  std::vector<double> x(2);
  for (int i = 0; i <= 50; ++i) {
    for (int j = 0; j <= 50; ++j) {
      x[0] = i / 50.0;
      x[1] = j / 50.0;
      sup_f = std::max(sup_f, std::abs(f.eval(x)));
    }
  }
  for (int i = 0; i <= 400; ++i) {
    for (int j = 0; j <= 400; ++j) {
      x[0] = i / 400.0;
      x[1] = j / 400.0;
      sup_g = std::max(sup_g, std::abs(g.eval(x)));
    }
  }
  CHECK(sup_f <= sup_g + 1e-9);
}

TEST_CASE("piecewise targets follow the active box") {
  SplineCoefficients g1 = random_series(aniso_params(), 2, 12);
  SplineCoefficients g2 = random_series(aniso_params(), 2, 13);
  Box left{{0.0, 0.0}, {0.45, 1.0}};
  Box right{{0.55, 0.0}, {1.0, 1.0}};
  TargetFunction f = make_piecewise({left, right}, {g1, g2});

  for (int t = 0; t < 10; ++t) {
    const double y = t / 9.0;
    CHECK(f.eval({0.2, y}) == expansion_eval(g1, {0.2, y}));
    CHECK(f.eval({0.8, y}) == expansion_eval(g2, {0.8, y}));
    CHECK(f.eval({0.5, y}) == 0.0);  // gap between the boxes
  }

  Box bad{{-0.1, 0.0}, {0.5, 1.0}};
  CHECK_THROWS_AS(make_piecewise({bad}, {g1}), std::invalid_argument);
  CHECK_THROWS_AS(make_piecewise({left}, {g1, g2}), std::invalid_argument);
}

TEST_CASE("figure 1 closed forms") {
  TargetFunction f1 = figure1_function(1);
  CHECK(f1.eval({0.75, 0.25}) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(f1.eval({0.49, 0.5})) < 1e-12);  // sin(pi) and no indicator
  CHECK(f1.eval({0.5, 0.0}) == 1.0);  // boundary belongs to the indicator
  CHECK(f1.bound == 2.0);

  TargetFunction f2 = figure1_function(2);
  CHECK(f2.eval({0.5, 0.5}) == 0.0);
  CHECK(f2.eval({0.0, 0.0}) == doctest::Approx(0.75));
  CHECK_THROWS_AS(figure1_function(3), std::invalid_argument);
}

TEST_CASE("composite chains gather, clip, and compose") {
  BesovParams uni = uni_params();
  BesovParams duo = aniso_params();
  ChainComponent c1{{0}, random_series(uni, 2, 14)};
  ChainComponent c2{{1}, random_series(uni, 2, 15)};
  ChainComponent top{{0, 1}, random_series(duo, 2, 16)};
  TargetFunction f = make_composite_chain({2, 2, 1}, {{c1, c2}, {top}});
  CHECK(f.d == 2);

  for (int t = 0; t < 10; ++t) {
    std::vector<double> x{t / 9.0, 1.0 - t / 9.0};
    const double u = std::clamp(expansion_eval(c1.series, {x[0]}), 0.0, 1.0);
    const double v = std::clamp(expansion_eval(c2.series, {x[1]}), 0.0, 1.0);
    const double direct = expansion_eval(top.series, {u, v});
    CHECK(f.eval(x) == direct);
    CHECK(f.eval(x) == f.eval(x));  // bitwise repeatable
  }

  CHECK_THROWS_AS(make_composite_chain({2, 1}, {{c1, c2}}), std::invalid_argument);
  ChainComponent oor{{5}, random_series(uni, 1, 17)};
  CHECK_THROWS_AS(make_composite_chain({2, 1}, {{oor}}), std::invalid_argument);
}

TEST_CASE("composite rate parameters") {
  // single layer: the composition formulas collapse to the plain class
  SmoothnessVector s({0.5, 1.0});
  CompositeRateParams single = composite_rate_params({2, 1}, {2}, {s}, 2.0);
  CHECK(single.s_tilde_star == doctest::Approx(s.tilde()));
  CHECK(single.t_star == doctest::Approx(s.d_star()));
  CHECK(single.h_star == 1);

  // additive-style chain at p = infinity
  CompositeRateParams add = composite_rate_params(
      {2, 2, 1}, {1, 2}, {SmoothnessVector({1.0}), SmoothnessVector({2.0, 2.0})}, kInf);
  CHECK(add.s_tilde_star_layer[0] == doctest::Approx(1.0));
  CHECK(add.s_tilde_star_layer[1] == doctest::Approx(1.0));
  CHECK(add.s_tilde_star == doctest::Approx(1.0));
  CHECK(add.h_star == 1);  // tie broken toward the earlier layer

  // scaling every smoothness up strictly raises the effective rate exponent
  CompositeRateParams scaled_up = composite_rate_params(
      {2, 2, 1}, {1, 2}, {SmoothnessVector({1.5}), SmoothnessVector({3.0, 3.0})}, kInf);
  CHECK(scaled_up.s_tilde_star > add.s_tilde_star);

  // finite p can push a layer factor negative
  CHECK_THROWS_AS(composite_rate_params({2, 2, 1}, {1, 2},
                                        {SmoothnessVector({1.0}),
                                         SmoothnessVector({0.3, 0.3})},
                                        1.0),
                  std::domain_error);
  // arity beyond the previous width
  CHECK_THROWS_AS(composite_rate_params({2, 1}, {3}, {SmoothnessVector({1, 1, 1})}, 2.0),
                  std::invalid_argument);
}

TEST_CASE("target serialization round trips") {
  TargetFunction g = make_series(random_series(aniso_params(), 2, 18));
  TargetFunction rot = make_rotated(g, 0.9);
  TargetFunction back = TargetFunction::from_json(rot.to_json(2));
  CHECK(back.kind == TargetKind::rotated);
  CHECK(back.tau == rot.tau);
  for (int t = 0; t < 5; ++t) {
    std::vector<double> x{t / 4.0, 1.0 - t / 5.0};
    CHECK(back.eval(x) == rot.eval(x));  // payload survives bit-exactly
  }

  SplineCoefficients u = random_series(uni_params(), 1, 19);
  TargetFunction add = make_additive({u, u});
  TargetFunction add_back = TargetFunction::from_json(add.to_json());
  CHECK(add_back.scale == add.scale);
  CHECK(add_back.eval({0.3, 0.6}) == add.eval({0.3, 0.6}));

  TargetFunction fig = figure1_function(2);
  CHECK(TargetFunction::from_json(fig.to_json()).eval({0.1, 0.9}) == fig.eval({0.1, 0.9}));

  CHECK_THROWS_AS(TargetFunction::from_json("{\"kind\":\"nope\",\"d\":1,\"bound\":1,\"scale\":1}"),
                  std::invalid_argument);
  CHECK_THROWS_AS(TargetFunction::from_json("not json"), std::invalid_argument);
}
