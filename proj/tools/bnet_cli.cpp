#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bnet/bspline.hpp"
#include "bnet/experiment.hpp"
#include "bnet/kernels.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct MissingConfig : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config;
  std::string out = ".";
  long long seed = -1;  // -1: take the config's seed
  int threads = 0;
  bool no_timing = false;
};

[[noreturn]] void fail(const char* kind, const std::string& message, int code) {
  json doc;
  doc["error"] = kind;
  doc["message"] = message;
  std::cerr << doc.dump() << '\n';
  std::exit(code);
}

json load_config(const Globals& g) {
  if (g.config.empty()) throw MissingConfig("no --config given");
  std::ifstream in(g.config);
  if (!in) throw MissingConfig("cannot read config file " + g.config);
  json cfg;
  in >> cfg;
  return cfg;
}

std::uint64_t pick_seed(const json& cfg, const Globals& g) {
  if (g.seed >= 0) return std::uint64_t(g.seed);
  return cfg.value("seed", std::uint64_t(1));
}

fs::path out_file(const Globals& g, const std::string& name) {
  fs::create_directories(g.out);
  return fs::path(g.out) / name;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

std::string shortest(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bnet::BesovParams besov_from_json(const json& j) {
  bnet::BesovParams p;
  p.p = j.value("p", 2.0);
  p.q = j.value("q", 2.0);
  p.m = j.value("m", 2L);
  std::vector<double> s = j.at("s").get<std::vector<double>>();
  p.s = bnet::SmoothnessVector{s};
  p.validate();
  return p;
}

// Target generators addressable from config files. Random targets draw from
// the given seed only, so the same config always yields the same function.
bnet::TargetFunction target_from_json(const json& j) {
  const std::string kind = j.value("kind", "series");
  if (kind == "inline") return bnet::TargetFunction::from_json(j.at("doc").dump());
  if (kind == "figure1-1") return bnet::figure1_function(1);
  if (kind == "figure1-2") return bnet::figure1_function(2);

  const std::uint64_t seed = j.value("seed", std::uint64_t(7));
  const long K = j.value("K", 3L);
  const double radius = j.value("radius", 1.0);

  if (kind == "series") {
    bnet::Rng rng(seed);
    return bnet::make_series(bnet::sample_besov_ball(rng, besov_from_json(j), K, radius));
  }
  if (kind == "additive" || kind == "multiplicative") {
    const long d = j.value("d", 2L);
    const double s0 = j.value("s0", 1.0);
    bnet::BesovParams p1;
    p1.p = j.value("p", 2.0);
    p1.q = j.value("q", 2.0);
    p1.m = j.value("m", 2L);
    p1.s = bnet::SmoothnessVector{{s0}};
    std::vector<bnet::SplineCoefficients> parts;
    for (long i = 0; i < d; ++i) {
      bnet::Rng rng = bnet::Rng::child(seed, std::uint64_t(i));
      parts.push_back(bnet::sample_besov_ball(rng, p1, K, radius));
    }
    return kind == "additive" ? bnet::make_additive(std::move(parts))
                              : bnet::make_multiplicative(std::move(parts));
  }
  if (kind == "rotated") {
    auto inner = target_from_json(j.at("inner"));
    return bnet::make_rotated(std::move(inner), j.value("tau", 0.0));
  }
  throw std::invalid_argument("unknown target kind '" + kind + "'");
}

bnet::PriorSpec prior_from_json(const json& j) {
  bnet::PriorSpec spec;
  const std::string family = j.value("family", "spike_slab");
  if (family == "spike_slab")
    spec.family = bnet::PriorFamily::spike_slab;
  else if (family == "shrinkage")
    spec.family = bnet::PriorFamily::shrinkage;
  else if (family == "adaptive")
    spec.family = bnet::PriorFamily::adaptive;
  else
    throw std::invalid_argument("unknown prior family '" + family + "'");

  if (j.contains("slab")) {
    const auto& s = j.at("slab");
    const std::string sk = s.value("kind", "uniform");
    if (sk == "uniform")
      spec.slab.kind = bnet::SlabKind::uniform;
    else if (sk == "gaussian")
      spec.slab.kind = bnet::SlabKind::gaussian;
    else
      throw std::invalid_argument("unknown slab kind '" + sk + "'");
    spec.slab.param = s.value("param", 1.0);
  }
  spec.S = j.value("S", spec.S);
  spec.C_v = j.value("C_v", spec.C_v);
  const std::string spike = j.value("spike", "gaussian");
  spec.spike = spike == "laplace" ? bnet::SpikeKind::laplace : bnet::SpikeKind::gaussian;
  spec.lambda_N = j.value("lambda_N", spec.lambda_N);
  spec.lambda_H = j.value("lambda_H", spec.lambda_H);
  const std::string base = j.value("base", "spike_slab");
  spec.base = base == "shrinkage" ? bnet::PriorFamily::shrinkage
                                  : bnet::PriorFamily::spike_slab;
  spec.max_D = j.value("max_D", spec.max_D);
  spec.max_S = j.value("max_S", spec.max_S);
  spec.sigma_lo = j.value("sigma_lo", spec.sigma_lo);
  spec.sigma_hi = j.value("sigma_hi", spec.sigma_hi);
  return spec;
}

bnet::ChainConfig chain_from_json(const json& j) {
  bnet::ChainConfig cc;
  cc.iterations = j.value("iterations", cc.iterations);
  cc.burn_in = j.value("burn_in", cc.burn_in);
  cc.thin = j.value("thin", cc.thin);
  if (j.contains("moves")) {
    const auto& m = j.at("moves");
    cc.moves.swap = m.value("swap", 0.0);
    cc.moves.walk = m.value("walk", 0.0);
    cc.moves.sigma = m.value("sigma", 0.0);
    cc.moves.shape = m.value("shape", 0.0);
  }
  cc.walk_step = j.value("walk_step", cc.walk_step);
  cc.sigma_step = j.value("sigma_step", cc.sigma_step);
  cc.walk_block = j.value("walk_block", cc.walk_block);
  cc.adapt_steps = j.value("adapt_steps", true);
  cc.cold_start = j.value("cold_start", false);
  return cc;
}

int cmd_synth(const Globals& g) {
  const json cfg = load_config(g);
  auto target = target_from_json(cfg.at("target"));
  const long n = cfg.at("n").get<long>();
  const double sigma0 = cfg.value("sigma0", 0.3);
  const bnet::DataKind kind = cfg.value("kind", std::string("regression")) ==
                                      std::string("classification")
                                  ? bnet::DataKind::classification
                                  : bnet::DataKind::regression;
  bnet::Rng rng(pick_seed(cfg, g));
  auto data = bnet::synth_data(rng, target, n, sigma0, kind);

  std::string text;
  for (long c = 0; c < data.d; ++c) text += "x" + std::to_string(c + 1) + ",";
  text += "y\n";
  for (long i = 0; i < data.n(); ++i) {
    for (double v : data.X[std::size_t(i)]) {
      text += shortest(v);
      text += ',';
    }
    text += shortest(data.Y[std::size_t(i)]);
    text += '\n';
  }
  const auto path = out_file(g, "synth.csv");
  write_text(path, text);

  json doc;
  doc["rows"] = data.n();
  doc["d"] = data.d;
  doc["path"] = path.string();
  std::cout << doc.dump() << '\n';
  return 0;
}

int cmd_bspline_net(const Globals& g) {
  const json cfg = load_config(g);
  const long d = cfg.value("d", 2L);
  const long m = cfg.value("m", 2L);
  bnet::GadgetBudget budget = bnet::gadget_budget(cfg.value("eps", 1e-3));
  auto build = bnet::bspline_net(d, m, budget);

  // Probe the compiled unit against the closed-form tensor spline on a fixed
  // interior lattice.
  double max_err = 0.0;
  const int grid = 7;
  std::vector<double> x(std::size_t(d), 0.0);
  std::vector<long> ix(std::size_t(d), 0);
  bnet::Workspace ws;
  for (bool done = false; !done;) {
    double ref = 1.0;
    for (long i = 0; i < d; ++i) {
      x[std::size_t(i)] = (double(ix[std::size_t(i)]) + 0.5) * double(m + 1) / grid;
      ref *= bnet::bspline_eval(m, x[std::size_t(i)]);
    }
    max_err = std::max(max_err, std::abs(build.net.forward(x, ws) - ref));
    long i = 0;
    for (; i < d; ++i) {
      if (++ix[std::size_t(i)] < grid) break;
      ix[std::size_t(i)] = 0;
    }
    done = i == d;
  }

  json doc;
  doc["d"] = build.d;
  doc["m"] = build.m;
  doc["eps_target"] = build.eps_target;
  doc["depth"] = build.net.hidden_count();
  doc["width"] = build.net.max_width();
  doc["nonzero"] = build.net.nonzero_count();
  doc["sup_weight"] = build.net.sup_weight();
  doc["depth_cap"] = build.L0;
  doc["width_cap"] = build.D0;
  doc["nonzero_cap"] = build.S0;
  doc["weight_cap"] = build.B0;
  doc["lattice_error"] = max_err;
  const auto path = out_file(g, "bspline_net.json");
  write_text(path, doc.dump(2) + "\n");
  std::cout << doc.dump() << '\n';
  return 0;
}

int cmd_approx_rate(const Globals& g) {
  const json cfg = load_config(g);
  auto params = besov_from_json(cfg.at("besov"));
  const long K = cfg.value("K", 4L);
  const double radius = cfg.value("radius", 1.0);
  const double r = cfg.value("r", 2.0);
  const auto budgets = cfg.at("budgets").get<std::vector<long>>();
  bnet::GadgetBudget gadget = bnet::gadget_budget(cfg.value("eps", 1e-3));
  const long mc_points = cfg.value("mc_points", 2000L);
  const std::uint64_t seed = pick_seed(cfg, g);

  bnet::Rng ball_rng(seed);
  auto coeffs = bnet::sample_besov_ball(ball_rng, params, K, radius);
  auto rows = bnet::approx_rate_sweep(
      coeffs, budgets, r, gadget, int(mc_points),
      static_cast<unsigned int>(bnet::Rng::child(seed, 99).bits()), !g.no_timing);

  std::string text = "N,K,selected,L,D,S,B,error_l2,error_sup,seconds\n";
  for (const auto& row : rows) {
    text += std::to_string(row.N) + "," + std::to_string(row.K) + "," +
            std::to_string(row.selected) + "," + std::to_string(row.L) + "," +
            std::to_string(row.D) + "," + std::to_string(row.S) + "," +
            shortest(row.B) + "," + shortest(row.error_l2) + "," +
            shortest(row.error_sup) + "," + shortest(row.seconds) + "\n";
  }
  const auto path = out_file(g, "approx_rate.csv");
  write_text(path, text);

  // Slope of log L2 error against log N.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& row : rows) {
    const double lx = std::log(double(row.N));
    const double ly = std::log(std::max(row.error_l2, 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double k = double(rows.size());
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  json doc;
  doc["rows"] = rows.size();
  doc["slope"] = slope;
  doc["s_tilde"] = params.s.tilde();
  doc["path"] = path.string();
  std::cout << doc.dump() << '\n';
  return 0;
}

int cmd_contract(const Globals& g) {
  const json cfg = load_config(g);
  bnet::ExperimentConfig ec;
  ec.target = target_from_json(cfg.at("target"));
  ec.kind = cfg.value("kind", std::string("regression")) == std::string("classification")
                ? bnet::DataKind::classification
                : bnet::DataKind::regression;
  ec.prior = prior_from_json(cfg.value("prior", json::object()));
  ec.chain = chain_from_json(cfg.value("chain", json::object()));
  ec.n_grid = cfg.at("n_grid").get<std::vector<long>>();
  ec.replicates = cfg.value("replicates", 1L);
  ec.sigma0 = cfg.value("sigma0", 0.3);
  ec.s_tilde = cfg.value("s_tilde", 1.0);
  if (cfg.contains("constants")) {
    const auto& c = cfg.at("constants");
    ec.constants.C_L = c.value("C_L", ec.constants.C_L);
    ec.constants.C_D = c.value("C_D", ec.constants.C_D);
    ec.constants.C_S = c.value("C_S", ec.constants.C_S);
    ec.constants.C_B = c.value("C_B", ec.constants.C_B);
  }
  ec.metric_points = cfg.value("metric_points", 2000L);
  ec.mass_radius = cfg.value("mass_radius", 2.0);
  ec.slope_threshold = cfg.value("slope_threshold", -0.20);
  ec.seed = pick_seed(cfg, g);
  ec.timing = !g.no_timing;
  ec.out_csv = out_file(g, "contract_rows.csv").string();

  auto result = bnet::run_contraction_experiment(ec);
  const std::string summary = bnet::summary_to_json(result, ec);
  write_text(out_file(g, "contract_summary.json"), summary + "\n");
  json doc;
  doc["rows"] = result.rows.size();
  doc["failures"] = result.failures.size();
  if (result.fitted) {
    doc["slope"] = result.fit.slope;
    doc["pass"] = result.fit.pass;
  }
  std::cout << doc.dump() << '\n';
  return result.failures.empty() ? 0 : 1;
}

int cmd_priorcheck(const Globals& g) {
  const json cfg = load_config(g);
  auto spec = prior_from_json(cfg.value("prior", json::object()));
  const auto n_values = cfg.at("n_values").get<std::vector<long>>();
  const double s_tilde = cfg.value("s_tilde", 1.0);
  const long d = cfg.value("d", 1L);
  bnet::RateConstants constants;
  if (cfg.contains("constants")) {
    const auto& c = cfg.at("constants");
    constants.C_L = c.value("C_L", constants.C_L);
    constants.C_D = c.value("C_D", constants.C_D);
    constants.C_S = c.value("C_S", constants.C_S);
    constants.C_B = c.value("C_B", constants.C_B);
  }

  json doc = json::array();
  bool all = true;
  for (long n : n_values) {
    auto hp = bnet::hyperparams_for_n(n, s_tilde, constants);
    auto report = bnet::check_conditions(spec, hp.shape, d, n, hp.N_n);
    json jr;
    jr["n"] = n;
    jr["N_n"] = hp.N_n;
    jr["checks"] = json::array();
    for (const auto& c : report.checks) {
      json jc;
      jc["name"] = c.name;
      jc["pass"] = c.pass;
      jc["statistic"] = std::isfinite(c.statistic) ? json(c.statistic) : json();
      jc["detail"] = c.detail;
      jr["checks"].push_back(std::move(jc));
      all = all && c.pass;
    }
    if (std::isfinite(report.smallest_C_v)) jr["smallest_C_v"] = report.smallest_C_v;
    doc.push_back(std::move(jr));
  }
  json top;
  top["reports"] = doc;
  top["all_pass"] = all;
  write_text(out_file(g, "priorcheck.json"), top.dump(2) + "\n");
  std::cout << top.dump() << '\n';
  return all ? 0 : 1;
}

int cmd_report(const Globals& g) {
  const json cfg = load_config(g);
  const std::string csv = cfg.at("csv").get<std::string>();
  std::ifstream in(csv);
  if (!in) throw std::runtime_error("cannot read rows file " + csv);
  std::string line;
  std::getline(in, line);
  if (line != bnet::kResultHeader)
    throw std::invalid_argument("unexpected CSV header in " + csv);

  std::vector<bnet::ExperimentRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9) throw std::invalid_argument("malformed CSV row: " + line);
    bnet::ExperimentRow r;
    r.n = std::stol(cells[0]);
    r.replicate = std::stol(cells[1]);
    r.error_l2_px = std::strtod(cells[2].c_str(), nullptr);
    r.error_empirical = std::strtod(cells[3].c_str(), nullptr);
    r.error_sigma_sq = std::strtod(cells[4].c_str(), nullptr);
    r.error_misclass = std::strtod(cells[5].c_str(), nullptr);
    r.epsilon_n = std::strtod(cells[6].c_str(), nullptr);
    r.ratio = std::strtod(cells[7].c_str(), nullptr);
    r.seconds = std::strtod(cells[8].c_str(), nullptr);
    rows.push_back(r);
  }

  const double s_tilde = cfg.value("s_tilde", 1.0);
  const double threshold = cfg.value("slope_threshold", -0.20);
  auto fit = bnet::fit_rate(rows, -s_tilde / (2.0 * s_tilde + 1.0), threshold);
  json doc;
  doc["slope"] = fit.slope;
  doc["stderr"] = fit.stderr_slope;
  doc["theoretical_exponent"] = fit.theoretical;
  doc["pass"] = fit.pass;
  doc["rows"] = rows.size();
  write_text(out_file(g, "report.json"), doc.dump(2) + "\n");
  std::cout << doc.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse ReLU network approximation and posterior contraction toolkit"};
  app.fallthrough();
  app.require_subcommand(1);

  Globals g;
  app.add_option("--config", g.config, "JSON configuration file");
  app.add_option("--seed", g.seed, "seed override (otherwise the config's seed)");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--threads", g.threads, "worker thread count (0 = library default)");
  app.add_flag("--no-timing", g.no_timing, "report zero in wall-clock columns");

  int (*selected)(const Globals&) = nullptr;
  app.add_subcommand("synth", "draw a synthetic dataset from a target function")
      ->callback([&] { selected = cmd_synth; });
  app.add_subcommand("bspline-net", "compile a tensor B-spline unit network")
      ->callback([&] { selected = cmd_bspline_net; });
  app.add_subcommand("approx-rate", "network-size sweep of the approximation error")
      ->callback([&] { selected = cmd_approx_rate; });
  app.add_subcommand("contract", "posterior contraction experiment over an n grid")
      ->callback([&] { selected = cmd_contract; });
  app.add_subcommand("priorcheck", "numeric verification of prior support conditions")
      ->callback([&] { selected = cmd_priorcheck; });
  app.add_subcommand("report", "rate fit and pass/fail summary from a rows CSV")
      ->callback([&] { selected = cmd_report; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);  // --help exits 0 here
  }

  if (g.threads > 0) bnet::set_threads(g.threads);

  try {
    return selected(g);
  } catch (const MissingConfig& e) {
    fail("missing_config", e.what(), 2);
  } catch (const json::exception& e) {
    fail("invalid_config", e.what(), 1);
  } catch (const std::invalid_argument& e) {
    fail("invalid_config", e.what(), 1);
  } catch (const std::exception& e) {
    fail("runtime_error", e.what(), 1);
  }
}
