#include "bnet/priors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bnet {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.9189385332046727;  // log sqrt(2 pi)

double logsumexp2(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

double log_choose(std::size_t n, std::size_t k) {
  return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
         std::lgamma(double(n - k) + 1.0);
}

// log of the standard normal upper-tail doubled, 2 Phi-bar(z), taking log z to
// survive scale ratios like a_n / sigma_1 that overflow a double. erfc covers
// moderate z; beyond that the usual asymptotic expansion takes over.
double log_two_sided_normal_tail(double log_z) {
  if (log_z < 3.2) {  // z < ~24.5, erfc still normal
    const double z = std::exp(log_z);
    return std::log(std::erfc(z / std::sqrt(2.0)));
  }
  if (2.0 * log_z > 709.0) return kNegInf;  // z^2 overflows, tail is a true 0 here
  const double z2 = std::exp(2.0 * log_z);
  return std::log(2.0) - 0.5 * z2 - log_z - kLogSqrt2Pi + std::log1p(-1.0 / z2);
}

// Spike component helpers, all parameterized by log scale. The density is
// (1/s) phi(u/s) with phi standard Gaussian or Laplace.
double spike_log_pdf(SpikeKind kind, double log_abs_u, double log_s) {
  const double r = log_abs_u - log_s;  // log |u/s|
  if (kind == SpikeKind::gaussian) {
    if (2.0 * r > 709.0) return kNegInf;
    return -log_s - kLogSqrt2Pi - 0.5 * std::exp(2.0 * r);
  }
  if (r > 709.0) return kNegInf;
  return -log_s - std::log(2.0) - std::exp(r);
}

// log P(|u| > K) for the scaled spike.
double spike_log_tail(SpikeKind kind, double log_K, double log_s) {
  const double r = log_K - log_s;
  if (kind == SpikeKind::gaussian) return log_two_sided_normal_tail(r);
  if (r > 709.0) return kNegInf;
  return -std::exp(r);
}

struct MixtureParams {
  double log_pi1 = 0.0;
  double log_pi2 = 0.0;
  double log_s1 = 0.0;
};

MixtureParams mixture_params(const PriorSpec& spec, long L, std::size_t T) {
  MixtureParams mp;
  const double pi2 = 1.0 / double(T);
  mp.log_pi1 = std::log1p(-pi2);
  mp.log_pi2 = -std::log(double(T));
  mp.log_s1 = log_sigma1(spec, L, T);
  return mp;
}

double mixture_log_tail(const MixtureParams& mp, const PriorSpec& spec, double log_K) {
  const double spike = mp.log_pi1 + spike_log_tail(spec.spike, log_K, mp.log_s1);
  const double slab = mp.log_pi2 + slab_log_tail(spec.slab, std::exp(log_K));
  return logsumexp2(spike, slab);
}

double mixture_log_inf(const MixtureParams& mp, const PriorSpec& spec, double B) {
  // Both components decay away from the origin, so the infimum over [-B, B]
  // sits at the endpoints.
  const double spike = mp.log_pi1 + spike_log_pdf(spec.spike, std::log(B), mp.log_s1);
  const double slab = mp.log_pi2 + slab_log_inf(spec.slab, B);
  return logsumexp2(spike, slab);
}

// Mass outside [-a, a] for a = exp(log_a). The slab contributes nearly its
// whole mass; log1p keeps the complement accurate when a is microscopic.
double mixture_log_outside(const MixtureParams& mp, const PriorSpec& spec, double log_a) {
  const double spike = mp.log_pi1 + spike_log_tail(spec.spike, log_a, mp.log_s1);
  double slab_out;
  if (spec.slab.kind == SlabKind::uniform) {
    const double frac = std::exp(log_a) / spec.slab.param;  // inside-mass fraction
    slab_out = frac < 1.0 ? std::log1p(-frac) : kNegInf;
  } else {
    const double z = std::exp(log_a) / std::sqrt(spec.slab.param);
    slab_out = std::log(std::erfc(z / std::sqrt(2.0)));
  }
  return logsumexp2(spike, mp.log_pi2 + slab_out);
}

long draw_from_hyperprior(Rng& rng, HyperKind kind, double lambda, long max_value) {
  const double u = rng.uniform01();
  double acc = 0.0;
  for (long v = 1; v <= max_value; ++v) {
    acc += std::exp(hyperprior_logpmf(kind, v, lambda, max_value));
    if (u <= acc) return v;
  }
  return max_value;  // guard against accumulated rounding at u ~ 1
}

}  // namespace

void Slab::validate() const {
  if (!(param > 0.0) || !std::isfinite(param))
    throw std::invalid_argument("slab parameter must be positive and finite");
}

void PriorSpec::validate() const {
  slab.validate();
  if (!(sigma_lo > 0.0) || !(sigma_hi > sigma_lo))
    throw std::invalid_argument("sigma prior needs 0 < lo < hi");
  switch (family) {
    case PriorFamily::spike_slab:
      if (S < 1) throw std::invalid_argument("spike-and-slab sparsity must be >= 1");
      break;
    case PriorFamily::shrinkage:
      if (!(C_v > 0.0)) throw std::invalid_argument("C_v must be positive");
      break;
    case PriorFamily::adaptive:
      if (base == PriorFamily::adaptive)
        throw std::invalid_argument("adaptive prior cannot wrap itself");
      if (!(lambda_N > 0.0) || !(lambda_H > 0.0))
        throw std::invalid_argument("hyperprior rates must be positive");
      if (max_D < 1 || max_S < 1)
        throw std::invalid_argument("hyperprior truncation bounds must be >= 1");
      if (base == PriorFamily::shrinkage && !(C_v > 0.0))
        throw std::invalid_argument("C_v must be positive");
      break;
  }
}

double slab_logpdf(const Slab& slab, double u) {
  if (slab.kind == SlabKind::uniform)
    return std::abs(u) <= slab.param ? -std::log(2.0 * slab.param) : kNegInf;
  return -0.5 * std::log(2.0 * M_PI * slab.param) - 0.5 * u * u / slab.param;
}

double slab_sample(const Slab& slab, Rng& rng) {
  if (slab.kind == SlabKind::uniform) return rng.uniform(-slab.param, slab.param);
  return std::sqrt(slab.param) * rng.normal();
}

double slab_log_tail(const Slab& slab, double K) {
  if (slab.kind == SlabKind::uniform) {
    if (K >= slab.param) return kNegInf;
    return std::log1p(-K / slab.param);
  }
  return log_two_sided_normal_tail(std::log(K / std::sqrt(slab.param)));
}

double slab_log_inf(const Slab& slab, double B) {
  if (slab.kind == SlabKind::uniform)
    return B <= slab.param ? -std::log(2.0 * slab.param) : kNegInf;
  return -0.5 * std::log(2.0 * M_PI * slab.param) - 0.5 * B * B / slab.param;
}

double spike_tail_index(SpikeKind kind) {
  return kind == SpikeKind::gaussian ? 0.5 : 1.0;
}

double log_sigma1(const PriorSpec& spec, long L, std::size_t T) {
  if (L < 1) throw std::invalid_argument("depth must be >= 1");
  if (T < 2) throw std::invalid_argument("need at least two parameters");
  const double k = spike_tail_index(spec.spike);
  return -spec.C_v * double(L) * double(L) - k * std::log(std::log(double(T)));
}

double log_prior_spike_slab(const std::vector<double>& theta,
                            const std::vector<std::uint8_t>& gamma, const PriorSpec& spec) {
  if (theta.size() != gamma.size())
    throw std::invalid_argument("theta and gamma must have equal length");
  if (theta.empty()) throw std::invalid_argument("empty parameter vector");
  const std::size_t T = theta.size();

  std::size_t active = 0;
  double slab_sum = 0.0;
  for (std::size_t i = 0; i < T; ++i) {
    if (gamma[i]) {
      ++active;
      slab_sum += slab_logpdf(spec.slab, theta[i]);
    } else if (theta[i] != 0.0) {
      return kNegInf;  // off-support mass
    }
  }
  if (active != std::size_t(spec.S) || std::size_t(spec.S) > T) return kNegInf;
  return -log_choose(T, active) + slab_sum;
}

double log_mixture_density(double u, double pi2, double log_s1, const PriorSpec& spec) {
  const double log_abs = u == 0.0 ? kNegInf : std::log(std::abs(u));
  const double spike = std::log1p(-pi2) + spike_log_pdf(spec.spike, log_abs, log_s1);
  const double slab = std::log(pi2) + slab_logpdf(spec.slab, u);
  return logsumexp2(spike, slab);
}

std::pair<double, double> mixture_weights(std::size_t T) {
  if (T < 2) throw std::invalid_argument("mixture weights need T >= 2");
  const double pi2 = 1.0 / double(T);
  return {1.0 - pi2, pi2};
}

double log_prior_shrinkage(const std::vector<double>& theta, long L, const PriorSpec& spec) {
  if (theta.size() < 2) throw std::invalid_argument("shrinkage prior needs T >= 2");
  const std::size_t T = theta.size();
  const double pi2 = 1.0 / double(T);
  const double ls1 = log_sigma1(spec, L, T);
  double total = 0.0;
  for (double u : theta) total += log_mixture_density(u, pi2, ls1, spec);
  return total;
}

double hyperprior_logpmf(HyperKind kind, long value, double lambda, long max_value) {
  if (max_value < 1) throw std::invalid_argument("truncation bound must be >= 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("hyperprior rate must be positive");
  if (value < 1 || value > max_value) return kNegInf;

  const double a = kind == HyperKind::width ? 3.0 : 2.0;
  auto log_weight = [&](long v) {
    const double lv = std::log(double(v));
    return -lambda * double(v) * std::pow(lv, a);
  };
  // Weights are <= 1 with the v = 1 term exactly 1, so a linear-space
  // normalizer is safe: underflowed terms are below 1e-300 relative mass.
  double Z = 0.0;
  for (long v = 1; v <= max_value; ++v) Z += std::exp(log_weight(v));
  return log_weight(value) - std::log(Z);
}

PriorDraw sample_prior(Rng& rng, const PriorSpec& spec, const ShapeBudget& shape, long d) {
  spec.validate();
  shape.validate();
  if (d < 1) throw std::invalid_argument("input dimension must be >= 1");

  PriorDraw draw;
  draw.D = shape.D;
  draw.S = shape.S;

  PriorFamily family = spec.family;
  if (spec.family == PriorFamily::adaptive) {
    family = spec.base;
    draw.D = draw_from_hyperprior(rng, HyperKind::width, spec.lambda_N, spec.max_D);
    if (family == PriorFamily::spike_slab) {
      const long T_D = long(param_count(shape.L, draw.D, d));
      draw.S = draw_from_hyperprior(rng, HyperKind::sparsity, spec.lambda_H,
                                    std::min(spec.max_S, T_D));
    }
  }

  const std::size_t T = param_count(shape.L, draw.D, d);
  draw.theta.assign(T, 0.0);

  if (family == PriorFamily::spike_slab) {
    // Adaptive draws carry their own sparsity; otherwise the prior's S rules.
    if (spec.family != PriorFamily::adaptive) draw.S = spec.S;
    const std::size_t S = std::min<std::size_t>(std::size_t(draw.S), T);
    draw.gamma.assign(T, 0);
    for (std::size_t i : rng.sample_without_replacement(T, S)) {
      draw.gamma[i] = 1;
      draw.theta[i] = slab_sample(spec.slab, rng);
    }
    draw.S = long(S);
  } else {
    const double pi2 = 1.0 / double(T);
    const double s1 = std::exp(log_sigma1(spec, shape.L, T));
    for (std::size_t i = 0; i < T; ++i) {
      if (rng.uniform01() < pi2) {
        draw.theta[i] = slab_sample(spec.slab, rng);
      } else {
        const double z = spec.spike == SpikeKind::gaussian ? rng.normal() : rng.laplace();
        draw.theta[i] = s1 * z;  // underflows to an exact 0 for extreme C_v L^2
      }
    }
  }

  draw.sigma = rng.uniform(spec.sigma_lo, spec.sigma_hi);
  return draw;
}

double sigma_prior_logpdf(double sigma, const PriorSpec& spec) {
  if (sigma < spec.sigma_lo || sigma > spec.sigma_hi) return kNegInf;
  return -std::log(spec.sigma_hi - spec.sigma_lo);
}

bool ConditionsReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ConditionCheck& c) { return c.pass; });
}

ConditionsReport check_conditions(const PriorSpec& spec, const ShapeBudget& shape, long d,
                                  long n, long N_n) {
  spec.validate();
  shape.validate();
  if (n < 3 || N_n < 1) throw std::invalid_argument("need n >= 3 and N_n >= 1");

  const double log_n = std::log(double(n));
  const std::size_t T = param_count(shape.L, shape.D, d);
  const PriorFamily family =
      spec.family == PriorFamily::adaptive ? spec.base : spec.family;
  static const double Ks[] = {10.0, 100.0, 1000.0};

  ConditionsReport report;
  report.smallest_C_v = std::numeric_limits<double>::quiet_NaN();

  auto tail_check = [&](const char* name, auto log_tail_at) {
    ConditionCheck c;
    c.name = name;
    c.pass = true;
    c.statistic = std::numeric_limits<double>::infinity();
    std::ostringstream os;
    for (double K : Ks) {
      const double lt = log_tail_at(K);
      if (!(lt <= -K)) c.pass = false;
      c.statistic = std::min(c.statistic, -lt / K);
      os << "log tail(" << K << ") = " << lt << "; ";
    }
    os << "decay constant " << c.statistic << " (need >= 1)";
    c.detail = os.str();
    report.checks.push_back(std::move(c));
  };

  auto inf_check = [&](const char* name, double log_inf) {
    ConditionCheck c;
    c.name = name;
    c.pass = log_inf > kNegInf;
    c.statistic = c.pass ? std::max(0.0, -log_inf) / (log_n * log_n)
                         : std::numeric_limits<double>::infinity();
    std::ostringstream os;
    os << "log inf density on [-" << shape.B << ", " << shape.B << "] = " << log_inf
       << "; constant c = " << c.statistic;
    c.detail = os.str();
    report.checks.push_back(std::move(c));
  };

  if (family == PriorFamily::spike_slab) {
    tail_check("B1", [&](double K) { return slab_log_tail(spec.slab, K); });
    inf_check("B2", slab_log_inf(spec.slab, shape.B));
    return report;
  }

  // Shrinkage mixture conditions. sigma_1 depends on (L, T) through the spec.
  const MixtureParams mp = mixture_params(spec, shape.L, T);
  tail_check("C1", [&](double K) { return mixture_log_tail(mp, spec, std::log(K)); });
  inf_check("C2", mixture_log_inf(mp, spec, shape.B));

  const double log_a = -double(shape.L) * log_n;
  const double log_rhs = -std::log(double(N_n)) - 2.0 * std::log(log_n);
  auto c3_log_mass = [&](double C_v) {
    PriorSpec s = spec;
    s.C_v = C_v;
    return mixture_log_outside(mixture_params(s, shape.L, T), s, log_a);
  };
  {
    ConditionCheck c;
    c.name = "C3";
    const double lhs = c3_log_mass(spec.C_v);
    c.pass = lhs <= log_rhs;
    c.statistic = std::exp(log_rhs - lhs);  // margin, >= 1 means pass
    std::ostringstream os;
    os << "log mass outside a_n = " << lhs << " vs threshold " << log_rhs << "; margin "
       << c.statistic;
    c.detail = os.str();
    report.checks.push_back(std::move(c));
  }

  // Bisect the smallest C_v that still satisfies the concentration check;
  // the outside mass is monotone decreasing in C_v.
  double lo = 1e-6, hi = 200.0;
  if (c3_log_mass(hi) <= log_rhs) {
    if (c3_log_mass(lo) <= log_rhs) {
      report.smallest_C_v = lo;
    } else {
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (c3_log_mass(mid) <= log_rhs ? hi : lo) = mid;
      }
      report.smallest_C_v = hi;
    }
  }
  return report;
}

}  // namespace bnet
