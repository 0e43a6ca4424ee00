#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "bnet/assemble.hpp"
#include "bnet/priors.hpp"
#include "helpers.hpp"

using namespace bnet;

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Kolmogorov-Smirnov distance between a sample and an analytic CDF.
double ks_distance(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = double(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = cdf(xs[i]);
    d = std::max(d, std::max(std::abs(F - double(i) / n), std::abs(F - double(i + 1) / n)));
  }
  return d;
}

PriorSpec uniform_spike_slab(long S, double C_u) {
  PriorSpec spec;
  spec.family = PriorFamily::spike_slab;
  spec.S = S;
  spec.slab = {SlabKind::uniform, C_u};
  return spec;
}

PriorSpec shrinkage_spec(double C_v, double C_u, SpikeKind spike = SpikeKind::gaussian) {
  PriorSpec spec;
  spec.family = PriorFamily::shrinkage;
  spec.C_v = C_v;
  spec.slab = {SlabKind::uniform, C_u};
  spec.spike = spike;
  return spec;
}

}  // namespace

TEST_CASE("spike-and-slab log prior matches the closed form") {
  // T = 13 coordinates, S = 2 active under a uniform slab of half-width 2:
  // the mask term is -log C(13,2) = -log 78 and each active weight
  // contributes log(1/4), so two of them give -log 16.
  auto spec = uniform_spike_slab(2, 2.0);
  std::vector<double> theta(13, 0.0);
  std::vector<std::uint8_t> gamma(13, 0);
  gamma[3] = 1;
  theta[3] = 0.5;
  gamma[9] = 1;
  theta[9] = -1.25;

  const double expected = -std::log(78.0) - std::log(16.0);
  CHECK(log_prior_spike_slab(theta, gamma, spec) == doctest::Approx(expected).epsilon(1e-14));

  SUBCASE("support violations give -infinity, not errors") {
    auto bad = theta;
    bad[0] = 0.1;  // nonzero where gamma is 0
    CHECK(log_prior_spike_slab(bad, gamma, spec) == -std::numeric_limits<double>::infinity());

    auto wide = theta;
    wide[3] = 2.5;  // outside the slab support
    CHECK(log_prior_spike_slab(wide, gamma, spec) ==
          -std::numeric_limits<double>::infinity());

    auto extra = gamma;
    extra[0] = 1;  // three active indices but S = 2
    CHECK(log_prior_spike_slab(theta, extra, spec) ==
          -std::numeric_limits<double>::infinity());
  }

  SUBCASE("gaussian slab uses the normal density on active weights") {
    spec.slab = {SlabKind::gaussian, 0.5};
    const double lp = [&] {
      auto phi = [&](double u) {
        return -0.5 * std::log(2.0 * M_PI * 0.5) - u * u / (2.0 * 0.5);
      };
      return -std::log(78.0) + phi(0.5) + phi(-1.25);
    }();
    CHECK(log_prior_spike_slab(theta, gamma, spec) == doctest::Approx(lp).epsilon(1e-14));
  }

  CHECK_THROWS_AS(log_prior_spike_slab(theta, std::vector<std::uint8_t>(5, 0), spec),
                  std::invalid_argument);
}

TEST_CASE("shrinkage log prior matches a direct mixture evaluation") {
  // Gentle scales so the direct (non-log-space) formula is exact enough to
  // serve as an oracle.
  auto spec = shrinkage_spec(0.5, 2.0);
  const long L = 1;
  const std::size_t T = 10;
  const double sigma1 = std::exp(-0.5) / std::sqrt(std::log(10.0));
  CHECK(std::exp(log_sigma1(spec, L, T)) == doctest::Approx(sigma1).epsilon(1e-14));

  auto direct = [&](double u) {
    const double spike =
        std::exp(-u * u / (2.0 * sigma1 * sigma1)) / (sigma1 * std::sqrt(2.0 * M_PI));
    const double slab = std::abs(u) <= 2.0 ? 0.25 : 0.0;
    return std::log(0.9 * spike + 0.1 * slab);
  };

  std::vector<double> theta = {0.0, 0.3, -1.7, 0.05, 2.0, -0.001, 1.2, 0.6, -0.4, 1.9};
  double expected = 0.0;
  for (double u : theta) expected += direct(u);
  CHECK(log_prior_shrinkage(theta, L, spec) == doctest::Approx(expected).epsilon(1e-12));

  SUBCASE("laplace spike variant") {
    spec.spike = SpikeKind::laplace;
    const double s1 = std::exp(-0.5) / std::log(10.0);  // tail index k = 1
    auto direct_lap = [&](double u) {
      const double spike = std::exp(-std::abs(u) / s1) / (2.0 * s1);
      const double slab = std::abs(u) <= 2.0 ? 0.25 : 0.0;
      return std::log(0.9 * spike + 0.1 * slab);
    };
    double exp_lap = 0.0;
    for (double u : theta) exp_lap += direct_lap(u);
    CHECK(log_prior_shrinkage(theta, L, spec) == doctest::Approx(exp_lap).epsilon(1e-12));
  }

  SUBCASE("mixture density integrates to one") {
    const double mass = testutil::gauss2(
        [&](double u) { return std::exp(log_mixture_density(u, 0.1, std::log(sigma1), spec)); },
        -2.0, 2.0, 4000);
    // Everything outside the slab support is spike tail mass, which is tiny
    // at these scales but not zero; include it analytically.
    const double outside = 0.9 * std::erfc(2.0 / (sigma1 * std::sqrt(2.0)));
    CHECK(mass + outside == doctest::Approx(1.0).epsilon(1e-9));
  }

  CHECK_THROWS_AS(log_prior_shrinkage(std::vector<double>{1.0}, L, spec),
                  std::invalid_argument);
}

TEST_CASE("mixture weights sum to exactly one for any T") {
  for (std::size_t T : {2ul, 3ul, 7ul, 10ul, 97ul, 691ul, 12345ul, 1000000ul}) {
    auto [pi1, pi2] = mixture_weights(T);
    CHECK(pi1 + pi2 == 1.0);
    CHECK(pi2 == 1.0 / double(T));
  }
  CHECK_THROWS_AS(mixture_weights(1), std::invalid_argument);
}

TEST_CASE("hyperprior pmf is a normalized truncation") {
  const double lambda = 0.05;
  const long cap = 128;

  double mass = 0.0;
  for (long v = 1; v <= cap; ++v)
    mass += std::exp(hyperprior_logpmf(HyperKind::width, v, lambda, cap));
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

  // Ratios expose the raw exponent without the normalizer.
  auto w = [&](long v) { return -lambda * v * std::pow(std::log(double(v)), 3.0); };
  const double ratio = hyperprior_logpmf(HyperKind::width, 5, lambda, cap) -
                       hyperprior_logpmf(HyperKind::width, 3, lambda, cap);
  CHECK(ratio == doctest::Approx(w(5) - w(3)).epsilon(1e-12));

  auto h = [&](long v) { return -lambda * v * std::pow(std::log(double(v)), 2.0); };
  const double ratio_s = hyperprior_logpmf(HyperKind::sparsity, 6, lambda, 4096) -
                         hyperprior_logpmf(HyperKind::sparsity, 2, lambda, 4096);
  CHECK(ratio_s == doctest::Approx(h(6) - h(2)).epsilon(1e-12));

  // (log 1)^a = 0, so the unnormalized mass at 1 is always e^0 = 1 and a
  // steep rate concentrates the pmf there.
  CHECK(std::exp(hyperprior_logpmf(HyperKind::width, 1, 50.0, cap)) ==
        doctest::Approx(1.0).epsilon(1e-10));

  CHECK(hyperprior_logpmf(HyperKind::width, 0, lambda, cap) ==
        -std::numeric_limits<double>::infinity());
  CHECK(hyperprior_logpmf(HyperKind::width, cap + 1, lambda, cap) ==
        -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(hyperprior_logpmf(HyperKind::width, 1, 0.0, cap), std::invalid_argument);
}

TEST_CASE("prior draws respect the support constraints") {
  ShapeBudget shape{3, 8, 12, 10.0};
  auto spec = uniform_spike_slab(12, 2.0);
  Rng rng(404);

  const std::size_t T = param_count(shape.L, shape.D, 1);
  for (int rep = 0; rep < 200; ++rep) {
    auto draw = sample_prior(rng, spec, shape, 1);
    REQUIRE(draw.theta.size() == T);
    REQUIRE(draw.gamma.size() == T);
    std::size_t active = 0;
    for (std::size_t i = 0; i < T; ++i) {
      if (draw.gamma[i]) {
        ++active;
        CHECK(std::abs(draw.theta[i]) <= 2.0);
      } else {
        CHECK(draw.theta[i] == 0.0);
      }
    }
    CHECK(active == 12);
    CHECK(draw.sigma >= spec.sigma_lo);
    CHECK(draw.sigma <= spec.sigma_hi);
  }

  SUBCASE("same seed reproduces the draw exactly") {
    Rng a(77), b(77);
    auto da = sample_prior(a, spec, shape, 1);
    auto db = sample_prior(b, spec, shape, 1);
    CHECK(da.theta == db.theta);
    CHECK(da.sigma == db.sigma);
  }
}

TEST_CASE("sampler output matches the analytic law") {
  // The contract here is distributional: KS distance below 0.02 on 1e4 draws.
  ShapeBudget shape{2, 6, 4, 10.0};
  Rng rng(911);

  SUBCASE("uniform slab actives and the noise scale") {
    auto spec = uniform_spike_slab(4, 2.0);
    std::vector<double> actives, sigmas;
    for (int rep = 0; rep < 2500; ++rep) {
      auto draw = sample_prior(rng, spec, shape, 1);
      for (std::size_t i = 0; i < draw.theta.size(); ++i)
        if (draw.gamma[i]) actives.push_back(draw.theta[i]);
      sigmas.push_back(draw.sigma);
    }
    REQUIRE(actives.size() == 10000);
    CHECK(ks_distance(actives, [](double u) { return (u + 2.0) / 4.0; }) < 0.02);
    CHECK(ks_distance(sigmas, [&](double s) {
            return (s - spec.sigma_lo) / (spec.sigma_hi - spec.sigma_lo);
          }) < 0.02);
  }

  SUBCASE("shrinkage marginal mixes spike and slab") {
    auto spec = shrinkage_spec(0.25, 2.0);
    const std::size_t T = param_count(shape.L, shape.D, 1);
    const double s1 = std::exp(log_sigma1(spec, shape.L, T));
    std::vector<double> coords;
    while (coords.size() < 10000) {
      auto draw = sample_prior(rng, spec, shape, 1);
      coords.insert(coords.end(), draw.theta.begin(), draw.theta.end());
    }
    coords.resize(10000);
    const double pi2 = 1.0 / double(T);
    auto cdf = [&](double u) {
      const double slab = std::clamp((u + 2.0) / 4.0, 0.0, 1.0);
      return (1.0 - pi2) * normal_cdf(u / s1) + pi2 * slab;
    };
    CHECK(ks_distance(coords, cdf) < 0.02);
  }
}

TEST_CASE("adaptive prior draws width and sparsity from the hyperprior") {
  PriorSpec spec;
  spec.family = PriorFamily::adaptive;
  spec.base = PriorFamily::spike_slab;
  spec.S = 4;
  spec.slab = {SlabKind::uniform, 2.0};
  spec.lambda_N = 0.05;
  spec.lambda_H = 0.01;
  spec.max_D = 16;
  spec.max_S = 64;
  ShapeBudget shape{2, 8, 4, 10.0};

  Rng rng(2024);
  const int reps = 10000;
  std::vector<long> width_counts(spec.max_D + 1, 0);
  for (int rep = 0; rep < reps; ++rep) {
    auto draw = sample_prior(rng, spec, shape, 2);
    REQUIRE(draw.D >= 1);
    REQUIRE(draw.D <= spec.max_D);
    ++width_counts[draw.D];
    const std::size_t T = param_count(shape.L, draw.D, 2);
    REQUIRE(draw.theta.size() == T);
    CHECK(draw.S <= std::min<long>(spec.max_S, long(T)));
    long active = 0;
    for (auto g : draw.gamma) active += g;
    CHECK(active == draw.S);
  }

  // Empirical width pmf against the analytic one, three-sigma bands per cell.
  for (long v = 1; v <= spec.max_D; ++v) {
    const double p = std::exp(hyperprior_logpmf(HyperKind::width, v, spec.lambda_N, spec.max_D));
    if (p < 1e-4) continue;
    const double se = std::sqrt(p * (1.0 - p) / reps);
    CHECK(std::abs(double(width_counts[v]) / reps - p) <= 3.0 * se + 1e-12);
  }

  SUBCASE("shrinkage base draws width only") {
    spec.base = PriorFamily::shrinkage;
    spec.C_v = 0.5;
    Rng r2(5);
    auto draw = sample_prior(r2, spec, shape, 2);
    CHECK(draw.gamma.empty());
    CHECK(draw.theta.size() == param_count(shape.L, draw.D, 2));
  }
}

TEST_CASE("analytic tails agree with quadrature") {
  Slab g{SlabKind::gaussian, 0.7};
  const double quad =
      2.0 * testutil::gauss2(
                [&](double u) { return std::exp(slab_logpdf(g, u)); }, 2.0, 40.0, 2000);
  CHECK(std::exp(slab_log_tail(g, 2.0)) == doctest::Approx(quad).epsilon(1e-10));

  Slab u{SlabKind::uniform, 3.0};
  CHECK(std::exp(slab_log_tail(u, 1.0)) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(slab_log_tail(u, 3.0) == -std::numeric_limits<double>::infinity());

  // Far Gaussian tails switch to the asymptotic branch; check continuity
  // against erfc just below the handoff and the known magnitude beyond it.
  Slab n1{SlabKind::gaussian, 1.0};
  const double near = slab_log_tail(n1, 24.0);
  CHECK(near == doctest::Approx(std::log(std::erfc(24.0 / std::sqrt(2.0)))).epsilon(1e-6));
  const double far = slab_log_tail(n1, 100.0);
  CHECK(far == doctest::Approx(-5004.82).epsilon(1e-4));
}

TEST_CASE("support conditions hold for the standard examples") {
  const double s_tilde = 1.0;

  for (long n : {1000L, 10000L}) {
    auto hp = hyperparams_for_n(n, s_tilde);
    CAPTURE(n);

    // Uniform slab wide enough to cover the weight bound.
    auto us = uniform_spike_slab(hp.shape.S, hp.shape.B);
    auto ur = check_conditions(us, hp.shape, 1, n, hp.N_n);
    REQUIRE(ur.checks.size() == 2);
    CHECK(ur.checks[0].name == "B1");
    CHECK(ur.checks[1].name == "B2");
    CHECK(ur.all_pass());

    // Gaussian slab, unit variance.
    auto gs = us;
    gs.slab = {SlabKind::gaussian, 1.0};
    auto gr = check_conditions(gs, hp.shape, 1, n, hp.N_n);
    CHECK(gr.all_pass());
    CHECK(gr.checks[0].statistic == doctest::Approx(5.2521).epsilon(1e-3));

    // Shrinkage with a Gaussian spike. C_v = 1 is just enough at n = 1e3.
    auto sh = shrinkage_spec(1.0, hp.shape.B);
    auto sr = check_conditions(sh, hp.shape, 1, n, hp.N_n);
    REQUIRE(sr.checks.size() == 3);
    CHECK(sr.checks[2].name == "C3");
    CHECK(sr.all_pass());
    CHECK(sr.checks[2].statistic > 1.0);  // reported concentration margin
    CHECK(sr.smallest_C_v > 0.0);
    CHECK(sr.smallest_C_v <= 1.0);
  }

  SUBCASE("narrow uniform slab fails the density floor") {
    ShapeBudget shape{3, 8, 10, 10.0};
    auto spec = uniform_spike_slab(10, 2.0);  // support [-2,2] misses B = 10
    auto report = check_conditions(spec, shape, 1, 1000, 10);
    CHECK(report.checks[0].pass);       // tails still fine
    CHECK_FALSE(report.checks[1].pass);
    CHECK_FALSE(report.all_pass());
  }

  SUBCASE("laplace spike decay constant") {
    PriorSpec spec = shrinkage_spec(0.1, 2.0, SpikeKind::laplace);
    ShapeBudget shape{1, 2, 2, 2.0};
    auto report = check_conditions(spec, shape, 1, 1000, 10);
    // sigma_1 = e^{-0.1} / log T with T = 9, so the slowest decay constant is
    // 1/sigma_1 up to the mixture weight correction.
    const std::size_t T = param_count(1, 2, 1);
    const double s1 = std::exp(-0.1) / std::log(double(T));
    CHECK(report.checks[0].statistic == doctest::Approx(1.0 / s1).epsilon(0.01));
  }
}

TEST_CASE("sigma prior is uniform on its interval") {
  PriorSpec spec;
  spec.sigma_lo = 0.5;
  spec.sigma_hi = 2.5;
  CHECK(sigma_prior_logpdf(1.0, spec) == doctest::Approx(-std::log(2.0)).epsilon(1e-14));
  CHECK(sigma_prior_logpdf(0.4, spec) == -std::numeric_limits<double>::infinity());
  CHECK(sigma_prior_logpdf(2.6, spec) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("spec validation rejects malformed configurations") {
  PriorSpec spec;
  spec.slab.param = -1.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  spec.slab.param = 1.0;
  spec.sigma_lo = 2.0;
  spec.sigma_hi = 1.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  spec.sigma_lo = 0.1;
  spec.sigma_hi = 3.0;
  spec.family = PriorFamily::adaptive;
  spec.base = PriorFamily::adaptive;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  CHECK_THROWS_AS(log_sigma1(spec, 0, 10), std::invalid_argument);
  CHECK_THROWS_AS(log_sigma1(spec, 2, 1), std::invalid_argument);
}
