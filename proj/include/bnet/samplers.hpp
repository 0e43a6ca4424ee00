#pragma once

#include <cstdint>
#include <vector>

#include "bnet/priors.hpp"
#include "bnet/rng.hpp"
#include "bnet/targets.hpp"

namespace bnet {

enum class DataKind { regression, classification };

// Design points live in the unit cube; responses are real (regression) or
// 0/1 (classification).
struct Dataset {
  long d = 1;
  std::vector<std::vector<double>> X;
  std::vector<double> Y;
  DataKind kind = DataKind::regression;

  long n() const { return long(Y.size()); }
  void validate() const;
};

// Draw order per observation: d covariates, then the noise or label variate,
// so streams are stable under changes of n.
Dataset synth_data(Rng& rng, const TargetFunction& f0, long n, double sigma0, DataKind kind);

double sigmoid(double t);
double log_sigmoid(double t);  // finite for any representable t

// Gaussian log likelihood for regression, Bernoulli-sigmoid for
// classification. fvals are the model values at the design points.
double loglik(const Dataset& data, const std::vector<double>& fvals, double sigma);

// Rectangular ReLU network (L hidden layers of width D) with all parameters
// zero, the canvas the samplers draw on.
Network dense_network(long L, long D, long d);

struct PosteriorSample {
  std::vector<double> theta;
  std::vector<std::uint8_t> gamma;  // empty for shrinkage chains
  double sigma = 1.0;
  double log_posterior = 0.0;
  long D = 0;
  long S = 0;
};

struct MoveProbs {
  double swap = 0.25;
  double walk = 0.45;
  double sigma = 0.30;
  double shape = 0.0;
};

struct ChainConfig {
  long iterations = 2000;
  long burn_in = 500;
  long thin = 1;
  MoveProbs moves;
  double walk_step = 0.1;
  double sigma_step = 0.1;
  long walk_block = 8;  // coordinates touched per walk proposal
  std::uint64_t seed = 1;
  bool adapt_steps = true;   // tune toward 0.3 acceptance, burn-in only
  bool prior_only = false;   // drop the likelihood term (prior recovery checks)
  bool cold_start = false;   // start at the null model instead of a prior draw

  void validate() const;
};

struct ChainResult {
  std::vector<PosteriorSample> samples;
  // Post-burn-in acceptance rates and the step sizes after tuning froze.
  double accept_swap = 0.0;
  double accept_walk = 0.0;
  double accept_sigma = 0.0;
  double accept_shape = 0.0;
  double walk_step_final = 0.0;
  double sigma_step_final = 0.0;
};

// Metropolis-within-Gibbs over (theta, gamma, sigma) at fixed shape. Moves:
// swap one active/inactive index pair (slab proposal on the incoming weight,
// both proposal directions in the ratio), Gaussian random walk on a random
// subset of active weights, reflected sigma walk on its prior interval.
ChainResult run_spike_slab_sampler(const Dataset& data, const PriorSpec& spec,
                                   const ShapeBudget& shape, const ChainConfig& config);

// Blockwise random walk on all T coordinates under the continuous mixture
// prior, plus the sigma move. No mask.
ChainResult run_shrinkage_sampler(const Dataset& data, const PriorSpec& spec,
                                  const ShapeBudget& shape, const ChainConfig& config);

// Adds shape moves D' = D +- 1 (and S' = S +- 1 for the spike-and-slab base)
// on top of the base sampler. Width changes embed the network by zero-padding
// or drop the last column; for the continuous base the padded coordinates are
// drawn from the spike, reversible-jump style. Depth stays at shape.L; the
// caller pins it to ceil(C_L log n). Proposals outside the hyperprior
// truncation are rejected.
ChainResult run_adaptive_sampler(const Dataset& data, const PriorSpec& spec,
                                 const ShapeBudget& shape, const ChainConfig& config);

// Network values of one posterior sample at the given points. L and d are the
// chain's fixed depth and input dimension; the sample carries its own width.
std::vector<double> sample_function_values(const PosteriorSample& sample, long L, long d,
                                           const std::vector<std::vector<double>>& pts);

struct PosteriorSummary {
  std::vector<double> mean;
  std::vector<double> q10;
  std::vector<double> q50;
  std::vector<double> q90;
  double mean_sigma = 0.0;
};

// Pointwise posterior mean and order-statistic quantiles (linearly
// interpolated) over the sample set.
PosteriorSummary posterior_summary(const std::vector<PosteriorSample>& samples, long L,
                                   long d, const std::vector<std::vector<double>>& grid);

}  // namespace bnet
