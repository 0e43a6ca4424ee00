#include "bnet/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "bnet/kernels.hpp"

namespace bnet {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093453;

double log_choose(std::size_t n, std::size_t k) {
  return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
         std::lgamma(double(n - k) + 1.0);
}

double ll_from_sse(long n, double sse, double sigma) {
  return -double(n) * std::log(sigma) - sse / (2.0 * sigma * sigma) -
         0.5 * double(n) * kLog2Pi;
}

// Spike log-density at a value, scale given in logs (matches priors.cpp).
double spike_logpdf_at(SpikeKind kind, double u, double log_s) {
  const double log_abs = u == 0.0 ? kNegInf : std::log(std::abs(u));
  const double r = log_abs - log_s;
  if (kind == SpikeKind::gaussian) {
    if (2.0 * r > 709.0) return kNegInf;
    return -log_s - 0.5 * kLog2Pi - 0.5 * std::exp(2.0 * r);
  }
  if (r > 709.0) return kNegInf;
  return -log_s - std::log(2.0) - std::exp(r);
}

// Fold a real into [lo, hi] by reflection; the symmetric random walk stays
// symmetric under this map.
double reflect_into(double x, double lo, double hi) {
  const double span = hi - lo;
  double z = std::fmod(x - lo, 2.0 * span);
  if (z < 0.0) z += 2.0 * span;
  return lo + std::min(z, 2.0 * span - z);
}

// For each flat parameter index of the (L, D_from, d) shape, the flat index
// it occupies after resizing the width to D_to, or -1 when the slot is
// dropped. Layout per layer: W row-major, then b.
std::vector<long> width_remap(long L, long D_from, long D_to, long d) {
  auto dims = [&](long D) {
    std::vector<std::pair<long, long>> v;  // (in, out) per affine layer
    v.emplace_back(d, D);
    for (long l = 1; l < L; ++l) v.emplace_back(D, D);
    v.emplace_back(D, 1);
    return v;
  };
  const auto from = dims(D_from), to = dims(D_to);
  std::vector<long> map(param_count(L, D_from, d), -1);
  std::size_t base_f = 0, base_t = 0;
  for (std::size_t l = 0; l < from.size(); ++l) {
    const auto [in_f, out_f] = from[l];
    const auto [in_t, out_t] = to[l];
    for (long r = 0; r < out_f; ++r)
      for (long c = 0; c < in_f; ++c)
        if (r < out_t && c < in_t)
          map[base_f + r * in_f + c] = long(base_t) + r * in_t + c;
    for (long r = 0; r < out_f; ++r)
      if (r < out_t) map[base_f + out_f * in_f + r] = long(base_t) + out_t * in_t + r;
    base_f += std::size_t(out_f) * in_f + out_f;
    base_t += std::size_t(out_t) * in_t + out_t;
  }
  return map;
}

enum class Move { swap, walk, sigma, shape };

struct MoveStats {
  long attempts = 0;
  long accepts = 0;
  double rate() const { return attempts == 0 ? 0.0 : double(accepts) / double(attempts); }
};

struct Engine {
  const Dataset& data;
  PriorSpec spec;
  PriorFamily family;  // spike_slab or shrinkage after resolving adaptive
  bool adaptive;
  ChainConfig cfg;
  long L;
  long d;

  Rng rng;
  Network net;
  std::vector<double> theta;
  std::vector<std::uint8_t> gamma;
  std::vector<std::size_t> active;
  long D = 1;
  long S = 0;
  double sigma_v = 1.0;

  std::vector<double> fvals;
  double sse = 0.0;
  double cur_ll = 0.0;
  double slab_sum = 0.0;     // spike-and-slab active-weight log densities
  double mix_sum = 0.0;      // shrinkage per-coordinate mixture logs
  double pi2 = 0.0, ls1 = 0.0;
  double cur_hyper = 0.0;

  MoveStats warm[4], post[4];

  Engine(const Dataset& data_, const PriorSpec& spec_, const ShapeBudget& shape,
         const ChainConfig& cfg_, bool adaptive_)
      : data(data_), spec(spec_), adaptive(adaptive_), cfg(cfg_), L(shape.L),
        d(data_.d), rng(cfg_.seed) {
    family = adaptive ? spec.base : spec.family;
    auto draw = sample_prior(rng, spec, shape, d);
    D = draw.D;
    S = draw.S;
    theta = std::move(draw.theta);
    gamma = std::move(draw.gamma);
    sigma_v = draw.sigma;
    if (cfg.cold_start) {
      // Keep the drawn support pattern but start at the null model. Deep
      // canvases make raw prior draws astronomically unlikely under any data,
      // and the walk moves cannot climb out of that region in finite time.
      std::fill(theta.begin(), theta.end(), 0.0);
      sigma_v = std::clamp(1.0, spec.sigma_lo, spec.sigma_hi);
    }
    rebuild_network();
    refresh_likelihood();
    refresh_prior();
  }

  std::size_t T() const { return theta.size(); }

  void rebuild_network() {
    net = dense_network(L, D, d);
    if (net.param_total() != T()) throw std::logic_error("parameter count mismatch");
    for (std::size_t i = 0; i < T(); ++i) net.set_param(i, theta[i]);
    active.clear();
    if (family == PriorFamily::spike_slab)
      for (std::size_t i = 0; i < gamma.size(); ++i)
        if (gamma[i]) active.push_back(i);
  }

  void refresh_likelihood() {
    if (cfg.prior_only) {
      cur_ll = 0.0;
      return;
    }
    fvals = forward_batch(net, data.X);
    if (data.kind == DataKind::regression) {
      sse = 0.0;
      for (long i = 0; i < data.n(); ++i) {
        const double r = data.Y[i] - fvals[i];
        sse += r * r;
      }
      cur_ll = ll_from_sse(data.n(), sse, sigma_v);
    } else {
      cur_ll = loglik(data, fvals, sigma_v);
    }
  }

  void refresh_prior() {
    if (family == PriorFamily::spike_slab) {
      slab_sum = 0.0;
      for (std::size_t i : active) slab_sum += slab_logpdf(spec.slab, theta[i]);
    } else {
      pi2 = mixture_weights(T()).second;
      ls1 = log_sigma1(spec, L, T());
      mix_sum = 0.0;
      for (double u : theta) mix_sum += log_mixture_density(u, pi2, ls1, spec);
    }
    cur_hyper = adaptive ? hyper_term(D, S) : 0.0;
  }

  double hyper_term(long Dv, long Sv) const {
    double h = hyperprior_logpmf(HyperKind::width, Dv, spec.lambda_N, spec.max_D);
    if (family == PriorFamily::spike_slab) {
      const long cap = std::min<long>(spec.max_S, long(param_count(L, Dv, d)));
      h += hyperprior_logpmf(HyperKind::sparsity, Sv, spec.lambda_H, cap);
    }
    return h;
  }

  double theta_log_prior() const {
    if (family == PriorFamily::spike_slab) return -log_choose(T(), std::size_t(S)) + slab_sum;
    return mix_sum;
  }

  double log_posterior() const {
    return cur_ll + theta_log_prior() + cur_hyper + sigma_prior_logpdf(sigma_v, spec);
  }

  bool mh_accept(double log_alpha) {
    if (log_alpha >= 0.0) return true;
    if (log_alpha == kNegInf) return false;
    return std::log(rng.uniform01()) < log_alpha;
  }

  // Evaluates the likelihood for the parameters currently loaded in `net`,
  // leaving the cached state untouched until the caller commits.
  struct LikProbe {
    std::vector<double> fvals;
    double sse = 0.0;
    double ll = 0.0;
  };

  LikProbe probe_likelihood() {
    LikProbe p;
    if (cfg.prior_only) return p;
    p.fvals = forward_batch(net, data.X);
    if (data.kind == DataKind::regression) {
      for (long i = 0; i < data.n(); ++i) {
        const double r = data.Y[i] - p.fvals[i];
        p.sse += r * r;
      }
      p.ll = ll_from_sse(data.n(), p.sse, sigma_v);
    } else {
      p.ll = loglik(data, p.fvals, sigma_v);
    }
    return p;
  }

  void commit_likelihood(LikProbe&& p) {
    if (cfg.prior_only) return;
    fvals = std::move(p.fvals);
    sse = p.sse;
    cur_ll = p.ll;
  }

  // Move 1: exchange one active index for an inactive one, slab proposal on
  // the incoming weight. Proposal densities appear in both directions; with a
  // slab proposal they cancel against the prior, but the ledger stays general.
  bool do_swap() {
    const std::size_t nact = active.size(), ninact = T() - nact;
    if (nact == 0 || ninact == 0) return false;
    const std::size_t a_pos = rng.index(nact);
    const std::size_t a = active[a_pos];
    std::size_t b = 0;
    {
      std::size_t skip = rng.index(ninact);
      for (std::size_t i = 0; i < T(); ++i)
        if (!gamma[i] && skip-- == 0) {
          b = i;
          break;
        }
    }
    const double theta_a = theta[a];
    const double theta_b = slab_sample(spec.slab, rng);
    const double lp_out = slab_logpdf(spec.slab, theta_a);
    const double lp_in = slab_logpdf(spec.slab, theta_b);

    theta[a] = 0.0;
    theta[b] = theta_b;
    net.set_param(a, 0.0);
    net.set_param(b, theta_b);
    auto probe = probe_likelihood();
    const double log_alpha = (probe.ll - cur_ll) + (lp_in - lp_out) + (lp_out - lp_in);
    if (mh_accept(log_alpha)) {
      gamma[a] = 0;
      gamma[b] = 1;
      active[a_pos] = b;
      slab_sum += lp_in - lp_out;
      commit_likelihood(std::move(probe));
      return true;
    }
    theta[a] = theta_a;
    theta[b] = 0.0;
    net.set_param(a, theta_a);
    net.set_param(b, 0.0);
    return false;
  }

  // Move 2: Gaussian random walk on a random block of coordinates (the
  // active ones under spike-and-slab, any under shrinkage).
  bool do_walk(double step) {
    const bool masked = family == PriorFamily::spike_slab;
    const std::size_t pool = masked ? active.size() : T();
    if (pool == 0) return false;
    const std::size_t k = std::min<std::size_t>(std::size_t(cfg.walk_block), pool);
    std::vector<std::size_t> picks = rng.sample_without_replacement(pool, k);
    std::vector<std::size_t> idx(k);
    std::vector<double> old_v(k);
    double dlp = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      idx[j] = masked ? active[picks[j]] : picks[j];
      old_v[j] = theta[idx[j]];
      const double nv = old_v[j] + step * rng.normal();
      if (masked)
        dlp += slab_logpdf(spec.slab, nv) - slab_logpdf(spec.slab, old_v[j]);
      else
        dlp += log_mixture_density(nv, pi2, ls1, spec) -
               log_mixture_density(old_v[j], pi2, ls1, spec);
      theta[idx[j]] = nv;
      net.set_param(idx[j], nv);
    }
    auto probe = probe_likelihood();
    if (mh_accept((probe.ll - cur_ll) + dlp)) {
      (masked ? slab_sum : mix_sum) += dlp;
      commit_likelihood(std::move(probe));
      return true;
    }
    for (std::size_t j = 0; j < k; ++j) {
      theta[idx[j]] = old_v[j];
      net.set_param(idx[j], old_v[j]);
    }
    return false;
  }

  // Move 3: reflected random walk for sigma. Only the Gaussian likelihood
  // depends on it, and only through cached residuals.
  bool do_sigma(double step) {
    const double prop = reflect_into(sigma_v + step * rng.normal(), spec.sigma_lo,
                                     spec.sigma_hi);
    double dll = 0.0;
    if (!cfg.prior_only)
      dll = ll_from_sse(data.n(), sse, prop) - ll_from_sse(data.n(), sse, sigma_v);
    if (mh_accept(dll)) {
      sigma_v = prop;
      cur_ll += dll;
      return true;
    }
    return false;
  }

  // Move 4a: width change by zero-padding / last-column dropping. For the
  // spike-and-slab base the new slots are exact zeros (atoms of the prior),
  // so only the mask count and hyperprior terms enter the ratio and the
  // realized function is unchanged. For the shrinkage base the padded slots
  // are drawn from the spike, reversible-jump style, at the wider shape's
  // spike scale.
  bool do_width_move() {
    const long D_new = D + (rng.uniform01() < 0.5 ? 1 : -1);
    if (D_new < 1 || D_new > spec.max_D) return false;
    const std::size_t T_new = param_count(L, D_new, d);
    const auto map = width_remap(L, D, D_new, d);

    std::vector<double> theta_new(T_new, 0.0);
    std::vector<std::uint8_t> gamma_new;
    double log_alpha = hyper_term(D_new, S) - cur_hyper;

    if (family == PriorFamily::spike_slab) {
      gamma_new.assign(T_new, 0);
      for (std::size_t i = 0; i < T(); ++i) {
        if (map[i] < 0) {
          if (gamma[i]) return false;  // dropping an active weight is unreachable in reverse
        } else {
          theta_new[std::size_t(map[i])] = theta[i];
          gamma_new[std::size_t(map[i])] = gamma[i];
        }
      }
      if (std::size_t(S) > T_new) return false;
      log_alpha += -log_choose(T_new, std::size_t(S)) + log_choose(T(), std::size_t(S));
      if (!mh_accept(log_alpha)) return false;
      // Zero rows keep the function bitwise identical; likelihood carries over.
      D = D_new;
      theta = std::move(theta_new);
      gamma = std::move(gamma_new);
      rebuild_network();
      cur_hyper = hyper_term(D, S);
      return true;
    }

    // Continuous base: spike scale of the wider of the two shapes prices the
    // appearing or vanishing coordinates.
    const double ls_wide = log_sigma1(spec, L, std::max(T(), T_new));
    double log_q = 0.0;
    if (D_new > D) {
      std::vector<std::uint8_t> filled(T_new, 0);
      for (std::size_t i = 0; i < T(); ++i)
        if (map[i] >= 0) {
          theta_new[std::size_t(map[i])] = theta[i];
          filled[std::size_t(map[i])] = 1;
        }
      const double s_wide = std::exp(ls_wide);
      for (std::size_t j = 0; j < T_new; ++j)
        if (!filled[j]) {
          const double z = spec.spike == SpikeKind::gaussian ? rng.normal() : rng.laplace();
          theta_new[j] = s_wide * z;
          log_q += spike_logpdf_at(spec.spike, theta_new[j], ls_wide);
        }
      log_alpha -= log_q;  // forward proposal density
    } else {
      for (std::size_t i = 0; i < T(); ++i)
        if (map[i] >= 0)
          theta_new[std::size_t(map[i])] = theta[i];
        else
          log_q += spike_logpdf_at(spec.spike, theta[i], ls_wide);
      log_alpha += log_q;  // reverse move would redraw the dropped values
    }

    const double pi2_new = mixture_weights(T_new).second;
    const double ls1_new = log_sigma1(spec, L, T_new);
    double mix_new = 0.0;
    for (double u : theta_new) mix_new += log_mixture_density(u, pi2_new, ls1_new, spec);
    log_alpha += mix_new - mix_sum;

    const auto saved_theta = theta;
    const long saved_D = D;
    D = D_new;
    theta = std::move(theta_new);
    rebuild_network();
    auto probe = probe_likelihood();
    log_alpha += probe.ll - cur_ll;
    if (mh_accept(log_alpha)) {
      pi2 = pi2_new;
      ls1 = ls1_new;
      mix_sum = mix_new;
      cur_hyper = hyper_term(D, S);
      commit_likelihood(std::move(probe));
      return true;
    }
    D = saved_D;
    theta = saved_theta;
    rebuild_network();
    return false;
  }

  // Move 4b: sparsity change, spike-and-slab base only. Growth draws the new
  // weight from the slab; both proposal directions enter the ratio.
  bool do_sparsity_move() {
    const bool grow = rng.uniform01() < 0.5;
    const long cap = std::min<long>(spec.max_S, long(T()));
    if (grow) {
      if (S + 1 > cap) return false;
      const std::size_t ninact = T() - active.size();
      if (ninact == 0) return false;
      std::size_t b = 0;
      {
        std::size_t skip = rng.index(ninact);
        for (std::size_t i = 0; i < T(); ++i)
          if (!gamma[i] && skip-- == 0) {
            b = i;
            break;
          }
      }
      const double theta_b = slab_sample(spec.slab, rng);
      const double lp_in = slab_logpdf(spec.slab, theta_b);
      theta[b] = theta_b;
      net.set_param(b, theta_b);
      auto probe = probe_likelihood();
      double log_alpha = (probe.ll - cur_ll) + lp_in + hyper_term(D, S + 1) - cur_hyper;
      log_alpha += -log_choose(T(), std::size_t(S + 1)) + log_choose(T(), std::size_t(S));
      log_alpha += -std::log(double(S + 1)) - (lp_in - std::log(double(ninact)));
      if (mh_accept(log_alpha)) {
        gamma[b] = 1;
        active.push_back(b);
        ++S;
        slab_sum += lp_in;
        cur_hyper = hyper_term(D, S);
        commit_likelihood(std::move(probe));
        return true;
      }
      theta[b] = 0.0;
      net.set_param(b, 0.0);
      return false;
    }
    if (S - 1 < 1) return false;
    const std::size_t a_pos = rng.index(active.size());
    const std::size_t a = active[a_pos];
    const double theta_a = theta[a];
    const double lp_out = slab_logpdf(spec.slab, theta_a);
    theta[a] = 0.0;
    net.set_param(a, 0.0);
    auto probe = probe_likelihood();
    double log_alpha = (probe.ll - cur_ll) - lp_out + hyper_term(D, S - 1) - cur_hyper;
    log_alpha += -log_choose(T(), std::size_t(S - 1)) + log_choose(T(), std::size_t(S));
    log_alpha += (lp_out - std::log(double(T() - active.size() + 1))) + std::log(double(S));
    if (mh_accept(log_alpha)) {
      gamma[a] = 0;
      active.erase(active.begin() + long(a_pos));
      --S;
      slab_sum -= lp_out;
      cur_hyper = hyper_term(D, S);
      commit_likelihood(std::move(probe));
      return true;
    }
    theta[a] = theta_a;
    net.set_param(a, theta_a);
    return false;
  }

  ChainResult run() {
    ChainResult out;
    double walk_step = cfg.walk_step;
    double sigma_step = cfg.sigma_step;
    MoveStats tune_walk, tune_sigma;

    const double p_swap = cfg.moves.swap;
    const double p_walk = p_swap + cfg.moves.walk;
    const double p_sigma = p_walk + cfg.moves.sigma;

    for (long it = 0; it < cfg.iterations; ++it) {
      const bool warm_phase = it < cfg.burn_in;
      const double u = rng.uniform01();
      Move mv;
      if (u < p_swap)
        mv = Move::swap;
      else if (u < p_walk)
        mv = Move::walk;
      else if (u < p_sigma)
        mv = Move::sigma;
      else
        mv = Move::shape;
      // Classification has no noise scale to sample.
      if (mv == Move::sigma && data.kind == DataKind::classification) mv = Move::walk;

      bool accepted = false;
      switch (mv) {
        case Move::swap:
          accepted = do_swap();
          break;
        case Move::walk:
          accepted = do_walk(walk_step);
          if (warm_phase) {
            ++tune_walk.attempts;
            tune_walk.accepts += accepted;
          }
          break;
        case Move::sigma:
          accepted = do_sigma(sigma_step);
          if (warm_phase) {
            ++tune_sigma.attempts;
            tune_sigma.accepts += accepted;
          }
          break;
        case Move::shape:
          if (family == PriorFamily::spike_slab && rng.uniform01() < 0.5)
            accepted = do_sparsity_move();
          else
            accepted = do_width_move();
          break;
      }
      MoveStats& s = (warm_phase ? warm : post)[int(mv)];
      ++s.attempts;
      s.accepts += accepted;

      // Step-size tuning toward 0.3 acceptance, burn-in only; frozen after.
      if (warm_phase && cfg.adapt_steps) {
        if (tune_walk.attempts >= 50) {
          walk_step = std::clamp(walk_step * std::exp(tune_walk.rate() - 0.3), 1e-8, 1e2);
          tune_walk = {};
        }
        if (tune_sigma.attempts >= 50) {
          sigma_step = std::clamp(sigma_step * std::exp(tune_sigma.rate() - 0.3), 1e-8, 1e2);
          tune_sigma = {};
        }
      }

      if (it >= cfg.burn_in && (it - cfg.burn_in) % cfg.thin == 0) {
        PosteriorSample smp;
        smp.theta = theta;
        smp.gamma = gamma;
        smp.sigma = sigma_v;
        smp.log_posterior = log_posterior();
        smp.D = D;
        smp.S = family == PriorFamily::spike_slab ? S : long(T());
        out.samples.push_back(std::move(smp));
      }
    }

    out.accept_swap = post[int(Move::swap)].rate();
    out.accept_walk = post[int(Move::walk)].rate();
    out.accept_sigma = post[int(Move::sigma)].rate();
    out.accept_shape = post[int(Move::shape)].rate();
    out.walk_step_final = walk_step;
    out.sigma_step_final = sigma_step;
    return out;
  }
};

void require_probs(const MoveProbs& m, bool allow_swap, bool allow_shape) {
  if (!allow_swap && m.swap != 0.0)
    throw std::invalid_argument("swap moves do not apply to this sampler");
  if (!allow_shape && m.shape != 0.0)
    throw std::invalid_argument("shape moves require the adaptive sampler");
}

}  // namespace

void Dataset::validate() const {
  if (d < 1) throw std::invalid_argument("dataset dimension must be >= 1");
  if (X.size() != Y.size()) throw std::invalid_argument("X and Y row counts differ");
  for (const auto& row : X)
    if (long(row.size()) != d) throw std::invalid_argument("ragged design matrix");
  if (kind == DataKind::classification)
    for (double y : Y)
      if (y != 0.0 && y != 1.0)
        throw std::invalid_argument("classification labels must be 0 or 1");
}

Dataset synth_data(Rng& rng, const TargetFunction& f0, long n, double sigma0,
                   DataKind kind) {
  if (n < 1) throw std::invalid_argument("need at least one observation");
  if (kind == DataKind::regression && !(sigma0 > 0.0))
    throw std::invalid_argument("regression noise scale must be positive");
  Dataset data;
  data.d = f0.d;
  data.kind = kind;
  data.X.reserve(std::size_t(n));
  data.Y.reserve(std::size_t(n));
  std::vector<double> x(std::size_t(f0.d));
  for (long i = 0; i < n; ++i) {
    for (double& c : x) c = rng.uniform01();
    const double f = f0.eval(x);
    data.X.push_back(x);
    if (kind == DataKind::regression)
      data.Y.push_back(f + sigma0 * rng.normal());
    else
      data.Y.push_back(rng.uniform01() < sigmoid(f) ? 1.0 : 0.0);
  }
  return data;
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double log_sigmoid(double t) {
  if (t >= 0.0) return -std::log1p(std::exp(-t));
  return t - std::log1p(std::exp(t));
}

double loglik(const Dataset& data, const std::vector<double>& fvals, double sigma) {
  data.validate();
  if (fvals.size() != std::size_t(data.n()))
    throw std::invalid_argument("fitted values do not match the dataset");
  if (data.kind == DataKind::regression) {
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    double sse = 0.0;
    for (long i = 0; i < data.n(); ++i) {
      const double r = data.Y[i] - fvals[i];
      sse += r * r;
    }
    return ll_from_sse(data.n(), sse, sigma);
  }
  double total = 0.0;
  for (long i = 0; i < data.n(); ++i)
    total += data.Y[i] == 1.0 ? log_sigmoid(fvals[i]) : log_sigmoid(-fvals[i]);
  return total;
}

Network dense_network(long L, long D, long d) {
  if (L < 0 || D < 1 || d < 1) throw std::invalid_argument("invalid network shape");
  Network net;
  net.d = int(d);
  if (L == 0) {
    net.layers.emplace_back(int(d), 1);
    return net;
  }
  net.layers.emplace_back(int(d), int(D));
  for (long l = 1; l < L; ++l) net.layers.emplace_back(int(D), int(D));
  net.layers.emplace_back(int(D), 1);
  return net;
}

void ChainConfig::validate() const {
  if (iterations < 1 || burn_in < 0 || burn_in >= iterations)
    throw std::invalid_argument("need 0 <= burn_in < iterations");
  if (thin < 1) throw std::invalid_argument("thin must be >= 1");
  if (walk_block < 1) throw std::invalid_argument("walk block must be >= 1");
  if (!(walk_step > 0.0) || !(sigma_step > 0.0))
    throw std::invalid_argument("step sizes must be positive");
  const double sum = moves.swap + moves.walk + moves.sigma + moves.shape;
  if (moves.swap < 0.0 || moves.walk < 0.0 || moves.sigma < 0.0 || moves.shape < 0.0 ||
      std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("move probabilities must be nonnegative and sum to 1");
}

ChainResult run_spike_slab_sampler(const Dataset& data, const PriorSpec& spec,
                                   const ShapeBudget& shape, const ChainConfig& config) {
  data.validate();
  spec.validate();
  shape.validate();
  config.validate();
  if (spec.family != PriorFamily::spike_slab)
    throw std::invalid_argument("prior family must be spike-and-slab");
  require_probs(config.moves, true, false);
  Engine eng(data, spec, shape, config, false);
  return eng.run();
}

ChainResult run_shrinkage_sampler(const Dataset& data, const PriorSpec& spec,
                                  const ShapeBudget& shape, const ChainConfig& config) {
  data.validate();
  spec.validate();
  shape.validate();
  config.validate();
  if (spec.family != PriorFamily::shrinkage)
    throw std::invalid_argument("prior family must be shrinkage");
  require_probs(config.moves, false, false);
  Engine eng(data, spec, shape, config, false);
  return eng.run();
}

ChainResult run_adaptive_sampler(const Dataset& data, const PriorSpec& spec,
                                 const ShapeBudget& shape, const ChainConfig& config) {
  data.validate();
  spec.validate();
  shape.validate();
  config.validate();
  if (spec.family != PriorFamily::adaptive)
    throw std::invalid_argument("prior family must be adaptive");
  if (shape.L < 1) throw std::invalid_argument("adaptive sampler needs depth >= 1");
  require_probs(config.moves, spec.base == PriorFamily::spike_slab, true);
  Engine eng(data, spec, shape, config, true);
  return eng.run();
}

std::vector<double> sample_function_values(const PosteriorSample& sample, long L, long d,
                                           const std::vector<std::vector<double>>& pts) {
  Network net = dense_network(L, sample.D, d);
  if (net.param_total() != sample.theta.size())
    throw std::invalid_argument("sample does not match the stated shape");
  for (std::size_t i = 0; i < sample.theta.size(); ++i) net.set_param(i, sample.theta[i]);
  return forward_batch(net, pts);
}

PosteriorSummary posterior_summary(const std::vector<PosteriorSample>& samples, long L,
                                   long d, const std::vector<std::vector<double>>& grid) {
  if (samples.empty()) throw std::invalid_argument("no posterior samples");
  const std::size_t M = samples.size(), G = grid.size();

  // One network canvas per distinct width keeps re-dimensioning off the
  // per-sample path.
  std::map<long, Network> canvas;
  std::vector<double> vals(M * G);
  Workspace ws;
  for (std::size_t s = 0; s < M; ++s) {
    auto it = canvas.find(samples[s].D);
    if (it == canvas.end())
      it = canvas.emplace(samples[s].D, dense_network(L, samples[s].D, d)).first;
    Network& net = it->second;
    if (net.param_total() != samples[s].theta.size())
      throw std::invalid_argument("sample does not match the stated shape");
    for (std::size_t i = 0; i < samples[s].theta.size(); ++i)
      net.set_param(i, samples[s].theta[i]);
    for (std::size_t g = 0; g < G; ++g) vals[s * G + g] = net.forward(grid[g], ws);
  }

  PosteriorSummary out;
  out.mean.resize(G);
  out.q10.resize(G);
  out.q50.resize(G);
  out.q90.resize(G);
  std::vector<double> col(M);
  for (std::size_t g = 0; g < G; ++g) {
    double acc = 0.0;
    for (std::size_t s = 0; s < M; ++s) {
      col[s] = vals[s * G + g];
      acc += col[s];
    }
    out.mean[g] = acc / double(M);
    std::sort(col.begin(), col.end());
    auto quant = [&](double q) {
      const double pos = q * double(M - 1);
      const std::size_t lo = std::size_t(pos);
      const std::size_t hi = std::min(lo + 1, M - 1);
      const double frac = pos - double(lo);
      return col[lo] * (1.0 - frac) + col[hi] * frac;
    };
    out.q10[g] = quant(0.10);
    out.q50[g] = quant(0.50);
    out.q90[g] = quant(0.90);
  }
  double sacc = 0.0;
  for (const auto& s : samples) sacc += s.sigma;
  out.mean_sigma = sacc / double(M);
  return out;
}

}  // namespace bnet
