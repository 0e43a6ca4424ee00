#include "bnet/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

#include <json.hpp>

namespace bnet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_same_size(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("metric inputs must be nonempty and equal length");
}

// Shortest round-trip decimal form; identical bytes on every run and
// platform with the same doubles.
std::string fmt(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct CellOutcome {
  ExperimentRow row;
};

ExperimentRow run_cell(const ExperimentConfig& cfg, long n, long rep) {
  const auto t0 = std::chrono::steady_clock::now();

  Rng data_rng = Rng::child(cfg.seed, 1, std::uint64_t(n), std::uint64_t(rep));
  const Dataset data = synth_data(data_rng, cfg.target, n, cfg.sigma0, cfg.kind);

  const HyperParams hp = hyperparams_for_n(n, cfg.s_tilde, cfg.constants);
  PriorSpec spec = cfg.prior;
  if (spec.family == PriorFamily::spike_slab) spec.S = hp.shape.S;
  const ShapeBudget shape = hp.shape;

  ChainConfig cc = cfg.chain;
  cc.seed = Rng::child(cfg.seed, 2, std::uint64_t(n), std::uint64_t(rep)).bits();

  ChainResult chain;
  switch (spec.family) {
    case PriorFamily::spike_slab:
      chain = run_spike_slab_sampler(data, spec, shape, cc);
      break;
    case PriorFamily::shrinkage:
      chain = run_shrinkage_sampler(data, spec, shape, cc);
      break;
    case PriorFamily::adaptive:
      chain = run_adaptive_sampler(data, spec, shape, cc);
      break;
  }
  if (chain.samples.empty()) throw std::runtime_error("chain produced no samples");

  // Fresh evaluation points for the population metric, plus the design points
  // for the empirical one; each posterior sample is evaluated once on the
  // concatenated set.
  Rng grid_rng = Rng::child(cfg.seed, 3, std::uint64_t(n), std::uint64_t(rep));
  std::vector<std::vector<double>> pts;
  pts.reserve(std::size_t(cfg.metric_points) + data.X.size());
  for (long i = 0; i < cfg.metric_points; ++i) {
    std::vector<double> x(std::size_t(data.d));
    for (double& c : x) c = grid_rng.uniform01();
    pts.push_back(std::move(x));
  }
  const std::size_t G = pts.size();
  pts.insert(pts.end(), data.X.begin(), data.X.end());

  std::vector<double> f0vals(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) f0vals[i] = cfg.target.eval(pts[i]);
  const std::vector<double> f0g(f0vals.begin(), f0vals.begin() + long(G));
  const std::vector<double> f0X(f0vals.begin() + long(G), f0vals.end());

  const double eps = epsilon_rate(n, cfg.s_tilde);
  const std::size_t M = chain.samples.size();
  std::vector<double> mean_vals(pts.size(), 0.0);
  double sigma_sq = 0.0;
  long outside = 0;
  for (const auto& smp : chain.samples) {
    const auto vals = sample_function_values(smp, shape.L, data.d, pts);
    double dist2 = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      mean_vals[i] += vals[i];
      if (i < G) {
        const double dd = vals[i] - f0vals[i];
        dist2 += dd * dd;
      }
    }
    if (std::sqrt(dist2 / double(G)) > cfg.mass_radius * eps) ++outside;
    sigma_sq += smp.sigma * smp.sigma;
  }
  for (double& v : mean_vals) v /= double(M);
  sigma_sq /= double(M);

  const std::vector<double> mean_g(mean_vals.begin(), mean_vals.begin() + long(G));
  const std::vector<double> mean_X(mean_vals.begin() + long(G), mean_vals.end());

  ExperimentRow row;
  row.n = n;
  row.replicate = rep;
  row.error_l2_px = metric_l2_px(mean_g, f0g).value;
  row.error_empirical = metric_empirical(mean_X, f0X);
  row.error_sigma_sq = cfg.kind == DataKind::regression
                           ? std::abs(sigma_sq - cfg.sigma0 * cfg.sigma0)
                           : kNaN;
  row.error_misclass = cfg.kind == DataKind::classification
                           ? metric_misclass_excess(mean_g, f0g).value
                           : kNaN;
  row.epsilon_n = eps;
  row.ratio = row.error_l2_px / eps;
  row.mass_outside = double(outside) / double(M);
  row.seconds =
      cfg.timing
          ? std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
          : 0.0;
  return row;
}

std::string row_csv(const ExperimentRow& r) {
  std::string line;
  line += std::to_string(r.n);
  line += ',';
  line += std::to_string(r.replicate);
  for (double v : {r.error_l2_px, r.error_empirical, r.error_sigma_sq, r.error_misclass,
                   r.epsilon_n, r.ratio, r.seconds}) {
    line += ',';
    line += fmt(v);
  }
  return line;
}

}  // namespace

const char* kResultHeader =
    "n,replicate,error_l2_px,error_empirical,error_sigma_sq,error_misclass,epsilon_n,"
    "ratio,seconds";

ErrorEstimate metric_l2_px(const std::vector<double>& fhat, const std::vector<double>& f0) {
  check_same_size(fhat, f0);
  const std::size_t n = fhat.size();
  double m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = fhat[i] - f0[i];
    m2 += d * d;
  }
  m2 /= double(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = fhat[i] - f0[i];
    var += (d * d - m2) * (d * d - m2);
  }
  var /= double(n) * double(n > 1 ? n - 1 : 1);
  ErrorEstimate out;
  out.value = std::sqrt(m2);
  out.std_error = out.value > 0.0 ? std::sqrt(var) / (2.0 * out.value) : 0.0;
  return out;
}

double metric_empirical(const std::vector<double>& fhat, const std::vector<double>& f0) {
  check_same_size(fhat, f0);
  double acc = 0.0;
  for (std::size_t i = 0; i < fhat.size(); ++i) {
    const double d = fhat[i] - f0[i];
    acc += d * d;
  }
  return std::sqrt(acc / double(fhat.size()));
}

ErrorEstimate metric_misclass_excess(const std::vector<double>& fhat,
                                     const std::vector<double>& f0) {
  check_same_size(fhat, f0);
  const std::size_t n = fhat.size();
  double mean = 0.0, m2 = 0.0;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double eta = sigmoid(f0[i]);
    const double risk = fhat[i] >= 0.0 ? 1.0 - eta : eta;
    g[i] = risk - std::min(eta, 1.0 - eta);
    mean += g[i];
  }
  mean /= double(n);
  for (double v : g) m2 += (v - mean) * (v - mean);
  ErrorEstimate out;
  out.value = mean;
  out.std_error = n > 1 ? std::sqrt(m2 / (double(n) * double(n - 1))) : 0.0;
  return out;
}

double misclass_l2_bound(const std::vector<double>& fhat, const std::vector<double>& f0) {
  check_same_size(fhat, f0);
  double acc = 0.0;
  for (std::size_t i = 0; i < fhat.size(); ++i) {
    const double d = sigmoid(fhat[i]) - sigmoid(f0[i]);
    acc += d * d;
  }
  return 2.0 * std::sqrt(acc / double(fhat.size()));
}

double epsilon_rate(long n, double s_tilde) {
  if (n < 2 || !(s_tilde > 0.0)) throw std::invalid_argument("need n >= 2 and s > 0");
  const double ln = std::log(double(n));
  return std::pow(double(n), -s_tilde / (2.0 * s_tilde + 1.0)) * std::pow(ln, 1.5);
}

void ExperimentConfig::validate() const {
  if (n_grid.empty()) throw std::invalid_argument("empty n grid");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 3) throw std::invalid_argument("grid entries must be >= 3");
    if (i > 0 && n_grid[i] <= n_grid[i - 1])
      throw std::invalid_argument("n grid must be strictly increasing");
  }
  if (replicates < 1) throw std::invalid_argument("need at least one replicate");
  if (kind == DataKind::regression && !(sigma0 > 0.0))
    throw std::invalid_argument("regression noise scale must be positive");
  if (metric_points < 10) throw std::invalid_argument("too few metric points");
  if (!(mass_radius > 0.0)) throw std::invalid_argument("mass radius must be positive");
  if (!(s_tilde > 0.0)) throw std::invalid_argument("smoothness must be positive");
  prior.validate();
  chain.validate();
}

RateFit fit_rate(const std::vector<ExperimentRow>& rows, double theoretical,
                 double threshold) {
  std::map<long, std::pair<double, long>> groups;  // n -> (error sum, count)
  for (const auto& r : rows) {
    if (!std::isfinite(r.error_l2_px)) continue;
    auto& g = groups[r.n];
    g.first += r.error_l2_px;
    g.second += 1;
  }
  if (groups.size() < 2)
    throw std::invalid_argument("rate fit needs at least two distinct n values");

  std::vector<double> xs, ys;
  for (const auto& [n, g] : groups) {
    xs.push_back(std::log(double(n)));
    ys.push_back(std::log(std::max(g.first / double(g.second), 1e-300)));
  }
  const std::size_t k = xs.size();
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    xm += xs[i];
    ym += ys[i];
  }
  xm /= double(k);
  ym /= double(k);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (xs[i] - xm) * (xs[i] - xm);
    sxy += (xs[i] - xm) * (ys[i] - ym);
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.theoretical = theoretical;
  if (k > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double resid = ys[i] - ym - fit.slope * (xs[i] - xm);
      ssr += resid * resid;
    }
    fit.stderr_slope = std::sqrt(ssr / double(k - 2) / sxx);
  }
  fit.pass = fit.slope <= threshold;
  return fit;
}

ExperimentResult run_contraction_experiment(const ExperimentConfig& config) {
  config.validate();

  std::ofstream partial;
  std::string partial_path;
  if (!config.out_csv.empty()) {
    partial_path = config.out_csv + ".partial";
    partial.open(partial_path, std::ios::trunc);
    if (!partial) throw std::runtime_error("cannot open " + partial_path);
    partial << kResultHeader << '\n' << std::flush;
  }

  ExperimentResult out;
  for (long n : config.n_grid) {
    for (long rep = 0; rep < config.replicates; ++rep) {
      try {
        ExperimentRow row = run_cell(config, n, rep);
        out.rows.push_back(row);
        if (partial.is_open()) partial << row_csv(row) << '\n' << std::flush;
      } catch (const std::exception& e) {
        out.failures.push_back("n=" + std::to_string(n) + " replicate=" +
                               std::to_string(rep) + ": " + e.what());
      }
    }
  }

  std::sort(out.rows.begin(), out.rows.end(), [](const auto& a, const auto& b) {
    return a.n != b.n ? a.n < b.n : a.replicate < b.replicate;
  });

  const double exponent = -config.s_tilde / (2.0 * config.s_tilde + 1.0);
  std::map<long, long> distinct;
  for (const auto& r : out.rows) ++distinct[r.n];
  if (distinct.size() >= 2) {
    out.fit = fit_rate(out.rows, exponent, config.slope_threshold);
    out.fitted = true;
  } else {
    out.fit.theoretical = exponent;
  }

  if (!config.out_csv.empty()) {
    partial.close();
    std::ofstream final_file(config.out_csv, std::ios::trunc);
    if (!final_file) throw std::runtime_error("cannot open " + config.out_csv);
    final_file << rows_to_csv(out.rows);
    final_file.close();
    std::filesystem::remove(partial_path);
  }
  return out;
}

std::string rows_to_csv(const std::vector<ExperimentRow>& rows) {
  std::string text = kResultHeader;
  text += '\n';
  for (const auto& r : rows) {
    text += row_csv(r);
    text += '\n';
  }
  return text;
}

std::string summary_to_json(const ExperimentResult& result, const ExperimentConfig& config) {
  nlohmann::json doc;
  doc["slope"] = result.fitted ? nlohmann::json(result.fit.slope) : nlohmann::json();
  doc["stderr"] = result.fitted ? nlohmann::json(result.fit.stderr_slope) : nlohmann::json();
  doc["theoretical_exponent"] = result.fit.theoretical;
  doc["pass"] = result.fitted && result.fit.pass;
  doc["slope_threshold"] = config.slope_threshold;
  doc["rows"] = nlohmann::json::array();
  for (const auto& r : result.rows) {
    nlohmann::json jr;
    jr["n"] = r.n;
    jr["replicate"] = r.replicate;
    jr["error_l2_px"] = r.error_l2_px;
    jr["ratio"] = r.ratio;
    jr["mass_outside"] = r.mass_outside;
    doc["rows"].push_back(std::move(jr));
  }
  doc["failures"] = result.failures;
  return doc.dump(2);
}

}  // namespace bnet
