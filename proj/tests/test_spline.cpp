#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "bnet/besov.hpp"
#include "bnet/bspline.hpp"
#include "bnet/coefficients.hpp"
#include "bnet/kernels.hpp"
#include "bnet/rng.hpp"
#include "helpers.hpp"

using namespace bnet;

TEST_CASE("cardinal B-spline point values") {
  CHECK(bspline_eval(0, 0.5) == 1.0);
  CHECK(bspline_eval(1, 1.0) == 1.0);
  // Frozen from the convolution oracle: integral of the hat over [0.5, 1.5].
  CHECK(bspline_eval(2, 1.5) == doctest::Approx(0.75).epsilon(1e-13));
  CHECK(testutil::bspline_convolution_oracle(2, 1.5) == doctest::Approx(0.75).epsilon(1e-10));
}

TEST_CASE("support is exactly the open interval (0, m+1)") {
  for (int m = 0; m <= 5; ++m) {
    CHECK(bspline_eval(m, 0.0) == 0.0);
    CHECK(bspline_eval(m, -0.25) == 0.0);
    CHECK(bspline_eval(m, static_cast<double>(m + 1)) == 0.0);
    CHECK(bspline_eval(m, static_cast<double>(m + 1) + 0.75) == 0.0);
    CHECK(bspline_eval(m, 0.5 * (m + 1)) > 0.0);
  }
}

TEST_CASE("symmetry about the support midpoint") {
  for (int m = 1; m <= 4; ++m) {
    for (int i = 0; i < 37; ++i) {
      double x = (m + 1) * (i + 0.5) / 37.0;
      CHECK(bspline_eval(m, x) ==
            doctest::Approx(bspline_eval(m, (m + 1) - x)).epsilon(1e-13));
    }
  }
}

TEST_CASE("convolution recursion against quadrature") {
  for (int m = 1; m <= 4; ++m) {
    for (int i = 0; i < 60; ++i) {
      double x = -0.5 + (m + 2) * i / 59.0;
      double direct = bspline_eval(m, x);
      double conv = testutil::bspline_convolution_oracle(m, x);
      CHECK(direct == doctest::Approx(conv).epsilon(1e-9));
      CHECK(std::abs(direct - conv) <= 1e-6);
    }
  }
}

TEST_CASE("partition of unity on shifted grid") {
  // 200 midpoints of [m, m+1]; shifts j with x - j inside the support.
  for (int m = 0; m <= 4; ++m) {
    for (int i = 0; i < 200; ++i) {
      double x = m + (i + 0.5) / 200.0;
      double sum = 0.0;
      for (int j = 0; j <= m + 1; ++j) sum += bspline_eval(m, x - j);
      CHECK(std::abs(sum - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("smoothness vector aggregates") {
  SmoothnessVector s({0.5, 1.0});
  CHECK(s.min() == 0.5);
  CHECK(s.max() == 1.0);
  CHECK(s.tilde() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(s.d_star() == doctest::Approx(1.5).epsilon(1e-15));

  // Isotropic consistency: s_tilde * d == s0.
  SmoothnessVector iso({0.7, 0.7, 0.7});
  CHECK(iso.tilde() * 3.0 == doctest::Approx(0.7).epsilon(1e-12));

  CHECK_THROWS_AS(SmoothnessVector({1.0, 0.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(SmoothnessVector(std::vector<double>{}).validate(), std::invalid_argument);
}

TEST_CASE("level exponents resolve rough axes faster") {
  // s = (0.5, 1.0): the rough axis advances every level, the smooth one
  // every other level.
  BesovParams prm{kInf, kInf, 1, SmoothnessVector({0.5, 1.0})};
  CHECK(level_exponents(prm, 0) == std::vector<long>{0, 0});
  CHECK(level_exponents(prm, 1) == std::vector<long>{1, 0});
  CHECK(level_exponents(prm, 2) == std::vector<long>{2, 1});
  CHECK(level_exponents(prm, 5) == std::vector<long>{5, 2});
  // Isotropic: one dyadic step per level on every axis regardless of s0.
  BesovParams iso{kInf, kInf, 1, SmoothnessVector({0.7, 0.7})};
  CHECK(level_exponents(iso, 3) == std::vector<long>{3, 3});
}

TEST_CASE("index set enumeration") {
  BesovParams m0{kInf, kInf, 0, SmoothnessVector({1.0})};
  auto j0 = enumerate_index_set(m0, 0);
  REQUIRE(j0.size() == 2);
  CHECK(j0[0] == std::vector<long>{0});
  CHECK(j0[1] == std::vector<long>{1});

  BesovParams m1{kInf, kInf, 1, SmoothnessVector({1.0})};
  auto j1 = enumerate_index_set(m1, 1);
  REQUIRE(j1.size() == 4);
  CHECK(j1.front() == std::vector<long>{-1});
  CHECK(j1.back() == std::vector<long>{2});

  BesovParams m2{kInf, kInf, 1, SmoothnessVector({1.0, 1.0})};
  CHECK(enumerate_index_set(m2, 1).size() == 16);
  CHECK(index_set_size(m2, 1) == 16);

  // Anisotropic sizes follow the per-axis exponents: e(2) = (2, 1), each axis
  // contributing 2^e + m + 1 shifts.
  BesovParams an{kInf, kInf, 2, SmoothnessVector({0.5, 1.0})};
  CHECK(index_set_size(an, 2) == std::size_t((4 + 3) * (2 + 3)));
  CHECK(enumerate_index_set(an, 2).size() == index_set_size(an, 2));

  CHECK_THROWS_AS(index_set_size(an, 2, 10), std::length_error);
  CHECK_THROWS_AS(index_set_size(an, -1), std::invalid_argument);
}

TEST_CASE("tensor basis matches componentwise product") {
  BesovParams prm{kInf, kInf, 2, SmoothnessVector({0.5, 1.0})};
  std::vector<double> x{0.2, 0.6};
  // e(2) = (2, 1), so the factors are psi_2(4*x1 - j1) and psi_2(2*x2 - j2).
  SplineIndex idx{2, {0, 0}};
  double expect = bspline_eval(2, 4 * 0.2 - 0) * bspline_eval(2, 2 * 0.6 - 0);
  CHECK(expect > 0.0);
  CHECK(tensor_basis_eval(prm, idx, x) == doctest::Approx(expect).epsilon(1e-14));

  // A shift outside the support of the first factor kills the product.
  SplineIndex off{2, {1, 1}};
  CHECK(bspline_eval(2, 4 * 0.2 - 1) == 0.0);
  CHECK(tensor_basis_eval(prm, off, x) == 0.0);
  CHECK_THROWS_AS(tensor_basis_eval(prm, SplineIndex{2, {1}}, x), std::invalid_argument);
}

TEST_CASE("sequence norm hand values") {
  SUBCASE("single level-0 entry, sup norms") {
    SplineCoefficients c;
    c.params = {kInf, kInf, 1, SmoothnessVector({1.0})};
    c.entries[{0, {0}}] = 1.0;
    CHECK(sequence_norm(c) == 1.0);
  }

  SUBCASE("two levels, p = q = 2, anisotropic") {
    SplineCoefficients c;
    c.params = {2.0, 2.0, 1, SmoothnessVector({0.5, 1.0})};
    c.entries[{0, {0, 0}}] = 1.5;
    c.entries[{2, {1, 0}}] = -0.25;
    c.entries[{2, {2, 1}}] = 0.5;
    // Hand computation: level 0 weight 2^0, inner 1.5; level 2 has exponents
    // (2, 1), weight 2^{2*0.5 - 3/2} = 2^{-1/2}, inner sqrt(0.3125); so the
    // norm is sqrt(2.25 + 0.3125/2) = sqrt(2.40625).
    CHECK(sequence_norm(c) == doctest::Approx(std::sqrt(2.40625)).epsilon(1e-13));
  }

  SUBCASE("q = inf takes the worst level") {
    SplineCoefficients c;
    c.params = {2.0, kInf, 1, SmoothnessVector({0.5, 1.0})};
    c.entries[{0, {0, 0}}] = 1.5;
    c.entries[{2, {1, 0}}] = -0.25;
    c.entries[{2, {2, 1}}] = 0.5;
    CHECK(sequence_norm(c) == doctest::Approx(1.5).epsilon(1e-13));
  }

  SUBCASE("homogeneity") {
    Rng rng(7);
    SplineCoefficients c;
    c.params = {1.5, 2.5, 2, SmoothnessVector({0.5, 1.0})};
    for (int t = 0; t < 40; ++t) {
      long k = static_cast<long>(rng.index(4));
      auto e = level_exponents(c.params, k);
      std::vector<long> j{static_cast<long>(rng.index(4)) - 2,
                          static_cast<long>(rng.index(4)) - 2};
      c.entries[{k, j}] = rng.normal();
    }
    double base = sequence_norm(c);
    SplineCoefficients scaled = c;
    for (auto& [idx, a] : scaled.entries) a *= -3.0;
    CHECK(std::abs(sequence_norm(scaled) - 3.0 * base) <= 1e-12 * std::max(1.0, base));
  }
}

TEST_CASE("expansion matches naive full sum") {
  BesovParams prm{kInf, kInf, 2, SmoothnessVector({0.5, 1.0})};
  Rng rng(19);
  SplineCoefficients c;
  c.params = prm;
  for (long k = 0; k <= 3; ++k) {
    auto idxs = enumerate_index_set(prm, k);
    for (const auto& j : idxs) {
      if (rng.uniform01() < 0.3) c.entries[{k, j}] = rng.normal();
    }
  }
  REQUIRE(c.entries.size() > 10);

  for (int t = 0; t < 25; ++t) {
    std::vector<double> x{rng.uniform01(), rng.uniform01()};
    double naive = 0.0;
    for (const auto& [idx, alpha] : c.entries) {
      double v = alpha;
      auto e = level_exponents(prm, idx.k);
      for (int i = 0; i < 2; ++i) {
        v *= bspline_eval(prm.m, std::ldexp(x[static_cast<std::size_t>(i)],
                                            static_cast<int>(e[static_cast<std::size_t>(i)])) -
                                     static_cast<double>(idx.j[static_cast<std::size_t>(i)]));
      }
      naive += v;
    }
    CHECK(expansion_eval(c, x) == doctest::Approx(naive).epsilon(1e-12));
  }

  SUBCASE("batch kernels agree bitwise across thread counts") {
    std::vector<std::vector<double>> pts;
    for (int t = 0; t < 400; ++t) pts.push_back({rng.uniform01(), rng.uniform01()});
    auto serial = expansion_eval_batch_serial(c, pts);
    for (int threads : {1, 4}) {
      set_threads(threads);
      auto par = expansion_eval_batch(c, pts);
      REQUIRE(par.size() == serial.size());
      for (std::size_t i = 0; i < par.size(); ++i) CHECK(par[i] == serial[i]);
    }
    set_threads(1);
  }
}

TEST_CASE("coefficient document round trip") {
  SplineCoefficients c;
  c.params = {kInf, 2.0, 3, SmoothnessVector({0.5, 1.0, 2.0})};
  c.entries[{0, {0, 0, 0}}] = 1.0 / 3.0;
  c.entries[{1, {-3, 0, 1}}] = -1e-300;
  c.entries[{4, {5, -1, 2}}] = 0.1 + 0.2;  // not exactly 0.3; must survive

  auto text = c.to_json(2);
  auto back = SplineCoefficients::from_json(text);
  REQUIRE(back.entries.size() == c.entries.size());
  CHECK(std::isinf(back.params.p));
  CHECK(back.params.q == 2.0);
  CHECK(back.params.s.s == c.params.s.s);
  auto it = back.entries.begin();
  for (const auto& [idx, alpha] : c.entries) {
    CHECK(it->first == idx);
    CHECK(it->second == alpha);  // bit-exact
    ++it;
  }

  CHECK_THROWS_AS(SplineCoefficients::from_json("{"), std::invalid_argument);
  CHECK_THROWS_AS(SplineCoefficients::from_json("{\"p\":1}"), std::invalid_argument);
  CHECK_THROWS_AS(
      SplineCoefficients::from_json(
          R"({"p":2,"q":2,"m":1,"s":[1.0],"entries":[{"k":0,"j":[0,0],"alpha":1.0}]})"),
      std::invalid_argument);
}

TEST_CASE("difference modulus") {
  auto f = [](const std::vector<double>& x) { return x[0] * x[0]; };
  ModulusGrid grid;
  grid.x_per_axis = 101;
  grid.h_per_axis = 5;
  // First-order sup modulus of x^2 at t = 0.1: attained at x = 0.9, h = 0.1,
  // value 2*0.9*0.1 + 0.01 = 0.19.
  double w = difference_modulus(f, 1, 1, {0.1}, kInf, grid);
  CHECK(w == doctest::Approx(0.19).epsilon(1e-9));

  // Monotone in t.
  double w2 = difference_modulus(f, 1, 1, {0.2}, kInf, grid);
  CHECK(w2 >= w);

  // L^2 flavour is dominated by the sup flavour.
  double wl2 = difference_modulus(f, 1, 1, {0.1}, 2.0, grid);
  CHECK(wl2 <= w + 1e-12);
  CHECK(wl2 > 0.0);

  CHECK_THROWS_AS(difference_modulus(f, 1, 0, {0.1}, 2.0, grid), std::invalid_argument);
  CHECK_THROWS_AS(difference_modulus(f, 2, 1, {0.1}, 2.0, grid), std::invalid_argument);
}

TEST_CASE("embedding exponent") {
  SmoothnessVector s({2.0, 2.0});  // s_tilde = 1
  auto res = embedding_exponent(2.0, kInf, s);
  CHECK(res.gamma == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(res.scaled.s[0] == doctest::Approx(1.0).epsilon(1e-14));

  // No integrability gap: gamma = 1.
  auto same = embedding_exponent(2.0, 2.0, s);
  CHECK(same.gamma == 1.0);

  // Gap at least s_tilde: invalid.
  SmoothnessVector rough({0.5, 0.5});  // s_tilde = 0.25
  CHECK_THROWS_AS(embedding_exponent(1.0, kInf, rough), std::domain_error);
  CHECK_THROWS_AS(embedding_exponent(4.0, 2.0, s), std::domain_error);
}

TEST_CASE("regime and order helpers") {
  BesovParams prm{2.0, 2.0, 2, SmoothnessVector({0.5, 1.0})};
  CHECK(prm.order_ok());  // s_max = 1 < min(2, 1.5)
  CHECK(prm.omega(2.0) == 0.0);
  CHECK(std::isinf(prm.nu(2.0)));
  CHECK(prm.regime_ok(2.0));

  BesovParams tight{1.5, 2.0, 2, SmoothnessVector({0.5, 1.0})};
  // omega = 2/3 - 1/2 = 1/6 < 1/3; nu = (1/3 - 1/6) / (2/6) = 1/2.
  CHECK(tight.omega(2.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(tight.nu(2.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(tight.regime_ok(2.0));

  BesovParams bad{1.0, 2.0, 2, SmoothnessVector({0.5, 1.0})};
  // omega = 1/2 >= 1/3.
  CHECK_FALSE(bad.regime_ok(2.0));

  BesovParams low_order{kInf, kInf, 1, SmoothnessVector({0.5, 1.0})};
  // s_max = 1 not strictly below min(1, 1) = 1... wait min(m, m-1+1/p) = min(1, 0).
  CHECK_FALSE(low_order.order_ok());
}
