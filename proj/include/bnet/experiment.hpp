#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bnet/assemble.hpp"
#include "bnet/samplers.hpp"

namespace bnet {

// Pointwise error metrics. All of them take values already evaluated on a
// common point set, so they are purely arithmetic and easy to check against
// hand-computed oracles.

// Root mean square difference, the Monte Carlo L2(P_X) distance when the
// points are uniform draws. std_error propagates the SE of the mean square
// through the square root.
ErrorEstimate metric_l2_px(const std::vector<double>& fhat, const std::vector<double>& f0);

// Empirical error at the design points, (n^{-1} sum |fhat - f0|^2)^{1/2}.
double metric_empirical(const std::vector<double>& fhat, const std::vector<double>& f0);

// Excess misclassification risk of the plug-in classifier sign(fhat) against
// the Bayes rule under P(Y=1|x) = sigmoid(f0(x)). Inputs are logits.
ErrorEstimate metric_misclass_excess(const std::vector<double>& fhat,
                                     const std::vector<double>& f0);

// 2 * L2 distance of the response probabilities, which dominates the excess
// risk pointwise on the same sample (so estimate <= bound deterministically).
double misclass_l2_bound(const std::vector<double>& fhat, const std::vector<double>& f0);

// Target contraction rate n^{-s/(2s+1)} (log n)^{3/2} at effective smoothness
// s = s_tilde.
double epsilon_rate(long n, double s_tilde);

struct ExperimentConfig {
  TargetFunction target;
  DataKind kind = DataKind::regression;
  PriorSpec prior;  // family selects the sampler
  ChainConfig chain;
  std::vector<long> n_grid;
  long replicates = 1;
  double sigma0 = 0.3;
  double s_tilde = 1.0;
  RateConstants constants;
  long metric_points = 2000;
  double mass_radius = 2.0;  // M in the mass-outside-(M eps_n) report
  double slope_threshold = -0.20;
  std::uint64_t seed = 1;
  std::string out_csv;  // empty: no file output; otherwise flushed row by row
  bool timing = true;

  void validate() const;
};

struct ExperimentRow {
  long n = 0;
  long replicate = 0;
  double error_l2_px = 0.0;
  double error_empirical = 0.0;
  double error_sigma_sq = 0.0;
  double error_misclass = 0.0;  // nan for regression
  double epsilon_n = 0.0;
  double ratio = 0.0;
  double seconds = 0.0;
  double mass_outside = 0.0;  // summary-only, not a CSV column
};

struct RateFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
  double theoretical = 0.0;
  bool pass = false;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  std::vector<std::string> failures;
  RateFit fit;
  bool fitted = false;  // false when fewer than two distinct n succeeded
};

// Least squares slope of log(mean error) on log n, one point per distinct n
// (replicates averaged first). Invariant to row order and to multiplying all
// errors by a constant. Throws when fewer than two distinct n are present.
RateFit fit_rate(const std::vector<ExperimentRow>& rows, double theoretical,
                 double threshold);

// One synthetic-data -> prior -> chain -> metrics cell per (n, replicate).
// Cells use Rng::child splits of the master seed, so results do not depend on
// execution order. A failing cell is recorded in `failures` and the run
// continues. When out_csv is set, rows are flushed to out_csv + ".partial"
// as they finish and the completed file is renamed into place at the end.
ExperimentResult run_contraction_experiment(const ExperimentConfig& config);

// Frozen CSV layout (shortest round-trip float formatting, byte-stable).
extern const char* kResultHeader;
std::string rows_to_csv(const std::vector<ExperimentRow>& rows);
std::string summary_to_json(const ExperimentResult& result, const ExperimentConfig& config);

}  // namespace bnet
