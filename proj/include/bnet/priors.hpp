#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bnet/network.hpp"
#include "bnet/rng.hpp"

namespace bnet {

// Slab density for nonzero weights: uniform on [-param, param] or centered
// Gaussian with variance param.
enum class SlabKind { uniform, gaussian };

struct Slab {
  SlabKind kind = SlabKind::uniform;
  double param = 1.0;

  void validate() const;
};

double slab_logpdf(const Slab& slab, double u);
double slab_sample(const Slab& slab, Rng& rng);
// log P(|u| > K) and the density infimum over [-B, B]; both analytic.
double slab_log_tail(const Slab& slab, double K);
double slab_log_inf(const Slab& slab, double B);

// Spike family phi_k of the continuous relaxation: Gaussian is the
// sub-Weibull index 1/2 case, Laplace the index 1 case.
enum class SpikeKind { gaussian, laplace };

enum class PriorFamily { spike_slab, shrinkage, adaptive };

// One prior configuration. Fields beyond the selected family are ignored;
// `base` names the family an adaptive prior wraps.
struct PriorSpec {
  PriorFamily family = PriorFamily::spike_slab;

  long S = 1;  // exact sparsity of the spike-and-slab support
  Slab slab;

  SpikeKind spike = SpikeKind::gaussian;
  double C_v = 1.0;  // spike scale exponent, log sigma_1 = -C_v L^2 - k log log T

  double lambda_N = 0.1;    // width hyperprior rate, pi_D(N) ~ e^{-lambda N (log N)^3}
  double lambda_H = 0.01;   // sparsity hyperprior rate, pi_S(H) ~ e^{-lambda H (log H)^2}
  PriorFamily base = PriorFamily::spike_slab;
  long max_D = 128;
  long max_S = 4096;

  double sigma_lo = 0.1;
  double sigma_hi = 3.0;

  void validate() const;
};

// Sub-Weibull tail index of the spike family (1/2 Gaussian, 1 Laplace).
double spike_tail_index(SpikeKind kind);

// log sigma_1 for depth L and parameter count T; kept in logs because
// e^{-C_v L^2} underflows long before the formulas stop being meaningful.
double log_sigma1(const PriorSpec& spec, long L, std::size_t T);

// Exact-sparsity prior: uniform support over the C(T, S) masks, slab density
// on active weights, point mass at zero elsewhere. Support violations
// (wrong mask weight, nonzero off-support entry, slab bound exceeded) give
// -infinity rather than an error.
double log_prior_spike_slab(const std::vector<double>& theta,
                            const std::vector<std::uint8_t>& gamma, const PriorSpec& spec);

// Continuous relaxation: every coordinate iid from the two-component mixture
// pi_1 (1/sigma_1) phi(u/sigma_1) + pi_2 slab(u) with pi_2 = 1/T, T = size of
// theta, and sigma_1 tied to the shape through L.
double log_prior_shrinkage(const std::vector<double>& theta, long L, const PriorSpec& spec);

// Mixture log-density of a single coordinate (exposed for the samplers).
double log_mixture_density(double u, double pi2, double log_s1, const PriorSpec& spec);

// {pi_1, pi_2} with pi_2 = 1/T. The pair sums to exactly 1.0 in floating
// point for every T >= 2: the subtraction error in 1 - 1/T is below half an
// ulp of 1, so adding 1/T back rounds to 1.
std::pair<double, double> mixture_weights(std::size_t T);

// Width / sparsity hyperprior, truncated to {1, ..., max_value} and
// renormalized. The exponent at value 1 is zero by the (log 1)^a = 0
// convention, so the unnormalized mass there is always 1.
enum class HyperKind { width, sparsity };
double hyperprior_logpmf(HyperKind kind, long value, double lambda, long max_value);

// One joint draw. gamma is empty for families without a mask; D and S record
// the shape drawn by an adaptive prior (otherwise the input shape's values).
struct PriorDraw {
  std::vector<double> theta;
  std::vector<std::uint8_t> gamma;
  double sigma = 1.0;
  long D = 0;
  long S = 0;
};

// Draw order is fixed (D, S, mask, weights in index order, sigma) so streams
// are reproducible. d is the network input dimension, which together with the
// shape fixes the parameter count.
PriorDraw sample_prior(Rng& rng, const PriorSpec& spec, const ShapeBudget& shape, long d);

double sigma_prior_logpdf(double sigma, const PriorSpec& spec);

// Numeric verification of the support conditions behind the contraction
// theorems, at desk scale. Spike-and-slab specs get the slab checks (tail
// decay and positive density on [-B, B]); shrinkage specs get the mixture
// versions plus the near-zero concentration check against the threshold
// 1/(N_n (log n)^2) at a_n = e^{-L log n}.
struct ConditionCheck {
  std::string name;
  bool pass = false;
  double statistic = 0.0;  // decay constant, density constant, or mass margin
  std::string detail;
};

struct ConditionsReport {
  std::vector<ConditionCheck> checks;
  double smallest_C_v = 0.0;  // shrinkage: bisected threshold, NaN if none passes

  bool all_pass() const;
};

ConditionsReport check_conditions(const PriorSpec& spec, const ShapeBudget& shape, long d,
                                  long n, long N_n);

}  // namespace bnet
