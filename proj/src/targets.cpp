#include "bnet/targets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace bnet {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Sound sup-norm overestimate for a spline series: at any point, at most
// (m+1)^d basis functions per level are nonzero and each is bounded by one.
double series_bound(const SplineCoefficients& c) {
  const double overlap = std::pow(c.params.m + 1.0, c.dim());
  double total = 0.0;
  long level = -1;
  double level_max = 0.0;
  for (const auto& [idx, a] : c.entries) {
    if (idx.k != level) {
      total += overlap * level_max;
      level = idx.k;
      level_max = 0.0;
    }
    level_max = std::max(level_max, std::abs(a));
  }
  total += overlap * level_max;
  return total;
}

// Grid sup of a univariate series, dense enough for normalization decisions.
double grid_sup_univariate(const SplineCoefficients& c) {
  double sup = 0.0;
  std::vector<double> x(1);
  for (int i = 0; i <= 2000; ++i) {
    x[0] = i / 2000.0;
    sup = std::max(sup, std::abs(expansion_eval(c, x)));
  }
  return sup;
}

void require_univariate(const std::vector<SplineCoefficients>& g, const char* who) {
  if (g.empty()) throw std::invalid_argument(std::string(who) + ": empty factor list");
  for (const auto& c : g)
    if (c.dim() != 1)
      throw std::invalid_argument(std::string(who) + ": factors must be univariate");
}

const char* kind_name(TargetKind k) {
  switch (k) {
    case TargetKind::spline_series: return "spline_series";
    case TargetKind::additive: return "additive";
    case TargetKind::multiplicative: return "multiplicative";
    case TargetKind::rotated: return "rotated";
    case TargetKind::piecewise: return "piecewise";
    case TargetKind::figure1_f1: return "figure1_f1";
    case TargetKind::figure1_f2: return "figure1_f2";
    case TargetKind::composite_chain: return "composite_chain";
  }
  throw std::logic_error("unknown target kind");
}

TargetKind kind_from_name(const std::string& name) {
  for (TargetKind k : {TargetKind::spline_series, TargetKind::additive,
                       TargetKind::multiplicative, TargetKind::rotated,
                       TargetKind::piecewise, TargetKind::figure1_f1,
                       TargetKind::figure1_f2, TargetKind::composite_chain}) {
    if (name == kind_name(k)) return k;
  }
  throw std::invalid_argument("target doc: unknown kind " + name);
}

}  // namespace

SplineCoefficients sample_besov_ball(Rng& rng, const BesovParams& params, long K,
                                     double radius) {
  params.validate();
  if (!(radius > 0.0)) throw std::invalid_argument("sample_besov_ball: radius must be positive");
  if (K < 0) throw std::invalid_argument("sample_besov_ball: negative level cap");

  SplineCoefficients out;
  out.params = params;
  for (long k = 0; k <= K; ++k) {
    const double count = static_cast<double>(index_set_size(params, k));
    const double scale =
        std::ldexp(1.0, static_cast<int>(-k)) *
        (std::isinf(params.p) ? 1.0 : std::pow(count, -1.0 / params.p));
    for (auto& j : enumerate_index_set(params, k)) {
      const double mag = 0.5 + 0.5 * rng.uniform01();
      out.entries.emplace(SplineIndex{k, std::move(j)}, rng.sign() * mag * scale);
    }
  }
  const double norm = sequence_norm(out);
  const double factor = radius / norm;
  for (auto& [idx, a] : out.entries) a *= factor;
  return out;
}

bool Box::contains(const std::vector<double>& x) const {
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  return true;
}

double TargetFunction::eval(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != d)
    throw std::invalid_argument("target eval: wrong input dimension");
  switch (kind) {
    case TargetKind::spline_series:
      return expansion_eval(components[0], x);
    case TargetKind::additive: {
      double acc = 0.0;
      std::vector<double> xi(1);
      for (int i = 0; i < d; ++i) {
        xi[0] = x[static_cast<std::size_t>(i)];
        acc += expansion_eval(components[static_cast<std::size_t>(i)], xi);
      }
      return scale * acc;
    }
    case TargetKind::multiplicative: {
      double acc = 1.0;
      std::vector<double> xi(1);
      for (int i = 0; i < d; ++i) {
        xi[0] = x[static_cast<std::size_t>(i)];
        acc *= expansion_eval(components[static_cast<std::size_t>(i)], xi);
      }
      return scale * acc;
    }
    case TargetKind::rotated: {
      std::vector<double> y(static_cast<std::size_t>(d));
      for (int r = 0; r < d; ++r) {
        double acc = b[static_cast<std::size_t>(r)];
        for (int c = 0; c < d; ++c)
          acc += A[static_cast<std::size_t>(r) * d + c] * x[static_cast<std::size_t>(c)];
        y[static_cast<std::size_t>(r)] = acc;
      }
      return inner->eval(y);
    }
    case TargetKind::piecewise: {
      double acc = 0.0;
      for (std::size_t i = 0; i < boxes.size(); ++i)
        if (boxes[i].contains(x)) acc += expansion_eval(components[i], x);
      return acc;
    }
    case TargetKind::figure1_f1:
      return (x[0] >= 0.5 ? 1.0 : 0.0) + std::sin(2.0 * kPi * x[1]);
    case TargetKind::figure1_f2:
      return std::abs(x[0] - 0.5) + (x[1] - 0.5) * (x[1] - 0.5);
    case TargetKind::composite_chain: {
      std::vector<double> v = x;
      for (std::size_t h = 0; h < chain.size(); ++h) {
        std::vector<double> next(chain[h].size());
        for (std::size_t j = 0; j < chain[h].size(); ++j) {
          const ChainComponent& comp = chain[h][j];
          std::vector<double> in(comp.inputs.size());
          for (std::size_t t = 0; t < comp.inputs.size(); ++t)
            in[t] = v[static_cast<std::size_t>(comp.inputs[t])];
          double val = expansion_eval(comp.series, in);
          if (h + 1 < chain.size()) val = std::clamp(val, 0.0, 1.0);
          next[j] = val;
        }
        v = std::move(next);
      }
      return v[0];
    }
  }
  throw std::logic_error("unknown target kind");
}

TargetFunction make_series(SplineCoefficients series) {
  TargetFunction f;
  f.kind = TargetKind::spline_series;
  f.d = series.dim();
  f.bound = series_bound(series);
  f.components.push_back(std::move(series));
  return f;
}

TargetFunction make_additive(std::vector<SplineCoefficients> g) {
  require_univariate(g, "make_additive");
  TargetFunction f;
  f.kind = TargetKind::additive;
  f.d = static_cast<int>(g.size());
  double sup_sum = 0.0;
  for (const auto& c : g) sup_sum += grid_sup_univariate(c);
  f.scale = sup_sum > 1.0 ? 1.0 / sup_sum : 1.0;
  f.bound = std::min(sup_sum, 1.0);
  f.components = std::move(g);
  return f;
}

TargetFunction make_multiplicative(std::vector<SplineCoefficients> g) {
  require_univariate(g, "make_multiplicative");
  TargetFunction f;
  f.kind = TargetKind::multiplicative;
  f.d = static_cast<int>(g.size());
  double sup_prod = 1.0;
  for (const auto& c : g) sup_prod *= grid_sup_univariate(c);
  f.scale = sup_prod > 1.0 ? 1.0 / sup_prod : 1.0;
  f.bound = std::min(sup_prod, 1.0);
  f.components = std::move(g);
  return f;
}

TargetFunction make_rotated(TargetFunction g, double tau) {
  if (g.d < 2) throw std::invalid_argument("make_rotated: needs d >= 2");
  const int d = g.d;
  TargetFunction f;
  f.kind = TargetKind::rotated;
  f.d = d;
  f.tau = tau;
  f.bound = g.bound;
  const double root = 1.0 / std::sqrt(static_cast<double>(d));
  f.A.assign(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 2; i < d; ++i) f.A[static_cast<std::size_t>(i) * d + i] = root;
  f.A[0] = std::cos(tau) * root;
  f.A[1] = -std::sin(tau) * root;
  f.A[static_cast<std::size_t>(d)] = std::sin(tau) * root;
  f.A[static_cast<std::size_t>(d) + 1] = std::cos(tau) * root;
  // b = (I - A) c keeps the center fixed-point structure: the image is the
  // cube contracted by 1/sqrt(d) about its center, hence inside the cube.
  f.b.assign(static_cast<std::size_t>(d), 0.0);
  for (int r = 0; r < d; ++r) {
    double ac = 0.0;
    for (int c = 0; c < d; ++c) ac += f.A[static_cast<std::size_t>(r) * d + c] * 0.5;
    f.b[static_cast<std::size_t>(r)] = 0.5 - ac;
  }
  f.inner = std::make_shared<TargetFunction>(std::move(g));
  return f;
}

TargetFunction make_piecewise(std::vector<Box> boxes, std::vector<SplineCoefficients> g) {
  if (boxes.size() != g.size() || boxes.empty())
    throw std::invalid_argument("make_piecewise: need one series per box");
  const int d = g.front().dim();
  for (const auto& c : g)
    if (c.dim() != d) throw std::invalid_argument("make_piecewise: mixed dimensions");
  for (const auto& box : boxes) {
    if (static_cast<int>(box.lo.size()) != d || static_cast<int>(box.hi.size()) != d)
      throw std::invalid_argument("make_piecewise: box dimension mismatch");
    for (int i = 0; i < d; ++i) {
      const double lo = box.lo[static_cast<std::size_t>(i)];
      const double hi = box.hi[static_cast<std::size_t>(i)];
      if (!(lo <= hi) || lo < 0.0 || hi > 1.0)
        throw std::invalid_argument("make_piecewise: box leaves the unit cube");
    }
  }
  TargetFunction f;
  f.kind = TargetKind::piecewise;
  f.d = d;
  double total = 0.0;
  for (const auto& c : g) total += series_bound(c);
  f.bound = total;
  f.boxes = std::move(boxes);
  f.components = std::move(g);
  return f;
}

TargetFunction figure1_function(int which) {
  TargetFunction f;
  f.d = 2;
  if (which == 1) {
    f.kind = TargetKind::figure1_f1;
    f.bound = 2.0;
  } else if (which == 2) {
    f.kind = TargetKind::figure1_f2;
    f.bound = 0.75;
  } else {
    throw std::invalid_argument("figure1_function: which must be 1 or 2");
  }
  return f;
}

TargetFunction make_composite_chain(std::vector<long> d_chain,
                                    std::vector<std::vector<ChainComponent>> layers) {
  if (d_chain.size() < 2 || layers.size() + 1 != d_chain.size())
    throw std::invalid_argument("make_composite_chain: layer count mismatch");
  if (d_chain.front() < 1 || d_chain.back() != 1)
    throw std::invalid_argument("make_composite_chain: need d^(0) >= 1 and d^(H) = 1");
  for (std::size_t h = 0; h < layers.size(); ++h) {
    if (static_cast<long>(layers[h].size()) != d_chain[h + 1])
      throw std::invalid_argument("make_composite_chain: wrong component count in a layer");
    for (const ChainComponent& comp : layers[h]) {
      if (comp.inputs.empty() ||
          static_cast<int>(comp.inputs.size()) != comp.series.dim())
        throw std::invalid_argument("make_composite_chain: component arity mismatch");
      for (int idx : comp.inputs)
        if (idx < 0 || idx >= d_chain[h])
          throw std::invalid_argument("make_composite_chain: input index out of range");
    }
  }
  TargetFunction f;
  f.kind = TargetKind::composite_chain;
  f.d = static_cast<int>(d_chain.front());
  f.bound = series_bound(layers.back().front().series);
  f.d_chain = std::move(d_chain);
  f.chain = std::move(layers);
  return f;
}

CompositeRateParams composite_rate_params(const std::vector<long>& d_circ,
                                          const std::vector<long>& t_circ,
                                          const std::vector<SmoothnessVector>& s_circ,
                                          double p) {
  const std::size_t H = t_circ.size();
  if (H == 0 || d_circ.size() != H + 1 || s_circ.size() != H)
    throw std::invalid_argument("composite_rate_params: inconsistent layer counts");
  if (d_circ.front() < 1 || d_circ.back() != 1)
    throw std::invalid_argument("composite_rate_params: need d^(0) >= 1, d^(H) = 1");
  if (!(p > 0.0)) throw std::invalid_argument("composite_rate_params: p must be positive");

  CompositeRateParams out;
  for (std::size_t h = 0; h < H; ++h) {
    if (t_circ[h] < 1 || t_circ[h] > d_circ[h])
      throw std::invalid_argument("composite_rate_params: arity outside [1, d^(h-1)]");
    if (s_circ[h].dim() != t_circ[h])
      throw std::invalid_argument("composite_rate_params: smoothness dimension != arity");
    s_circ[h].validate();
    out.s_tilde.push_back(s_circ[h].tilde());
    out.t_star_layer.push_back(s_circ[h].min() / s_circ[h].tilde());
  }
  for (std::size_t h = 0; h < H; ++h) {
    double eff = out.s_tilde[h];
    for (std::size_t k = h + 1; k < H; ++k) {
      const double loss = std::isinf(p) ? 0.0 : out.t_star_layer[k] / p;
      const double factor = std::min(s_circ[k].min() - loss, 1.0);
      if (!(factor > 0.0))
        throw std::domain_error("composite_rate_params: nonpositive layer factor");
      eff *= factor;
    }
    out.s_tilde_star_layer.push_back(eff);
  }
  out.h_star = 1;
  for (std::size_t h = 1; h < H; ++h)
    if (out.s_tilde_star_layer[h] < out.s_tilde_star_layer[static_cast<std::size_t>(out.h_star - 1)])
      out.h_star = static_cast<int>(h) + 1;
  out.s_tilde_star = out.s_tilde_star_layer[static_cast<std::size_t>(out.h_star - 1)];
  out.t_star = out.t_star_layer[static_cast<std::size_t>(out.h_star - 1)];
  return out;
}

// --- serialization ---------------------------------------------------------

namespace {

nlohmann::json coeffs_to_doc(const SplineCoefficients& c) {
  return nlohmann::json::parse(c.to_json());
}

SplineCoefficients coeffs_from_doc(const nlohmann::json& doc) {
  return SplineCoefficients::from_json(doc.dump());
}

nlohmann::json target_to_doc(const TargetFunction& f) {
  nlohmann::json doc;
  doc["kind"] = kind_name(f.kind);
  doc["d"] = f.d;
  doc["bound"] = f.bound;
  doc["scale"] = f.scale;
  switch (f.kind) {
    case TargetKind::spline_series:
      doc["series"] = coeffs_to_doc(f.components[0]);
      break;
    case TargetKind::additive:
    case TargetKind::multiplicative: {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& c : f.components) arr.push_back(coeffs_to_doc(c));
      doc["factors"] = std::move(arr);
      break;
    }
    case TargetKind::rotated:
      doc["tau"] = f.tau;
      doc["A"] = f.A;
      doc["b"] = f.b;
      doc["inner"] = target_to_doc(*f.inner);
      break;
    case TargetKind::piecewise: {
      nlohmann::json bx = nlohmann::json::array();
      for (const auto& box : f.boxes) bx.push_back({{"lo", box.lo}, {"hi", box.hi}});
      doc["boxes"] = std::move(bx);
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& c : f.components) arr.push_back(coeffs_to_doc(c));
      doc["pieces"] = std::move(arr);
      break;
    }
    case TargetKind::figure1_f1:
    case TargetKind::figure1_f2:
      break;
    case TargetKind::composite_chain: {
      doc["d_chain"] = f.d_chain;
      nlohmann::json lys = nlohmann::json::array();
      for (const auto& layer : f.chain) {
        nlohmann::json comps = nlohmann::json::array();
        for (const auto& comp : layer)
          comps.push_back({{"inputs", comp.inputs}, {"series", coeffs_to_doc(comp.series)}});
        lys.push_back(std::move(comps));
      }
      doc["layers"] = std::move(lys);
      break;
    }
  }
  return doc;
}

TargetFunction target_from_doc(const nlohmann::json& doc) {
  TargetFunction f;
  f.kind = kind_from_name(doc.at("kind").get<std::string>());
  f.d = doc.at("d").get<int>();
  f.bound = doc.at("bound").get<double>();
  f.scale = doc.at("scale").get<double>();
  switch (f.kind) {
    case TargetKind::spline_series:
      f.components.push_back(coeffs_from_doc(doc.at("series")));
      break;
    case TargetKind::additive:
    case TargetKind::multiplicative:
      for (const auto& sub : doc.at("factors")) f.components.push_back(coeffs_from_doc(sub));
      break;
    case TargetKind::rotated:
      f.tau = doc.at("tau").get<double>();
      f.A = doc.at("A").get<std::vector<double>>();
      f.b = doc.at("b").get<std::vector<double>>();
      if (f.A.size() != static_cast<std::size_t>(f.d) * f.d ||
          f.b.size() != static_cast<std::size_t>(f.d))
        throw std::invalid_argument("target doc: affine payload shape mismatch");
      f.inner = std::make_shared<TargetFunction>(target_from_doc(doc.at("inner")));
      break;
    case TargetKind::piecewise:
      for (const auto& sub : doc.at("boxes")) {
        Box box;
        box.lo = sub.at("lo").get<std::vector<double>>();
        box.hi = sub.at("hi").get<std::vector<double>>();
        f.boxes.push_back(std::move(box));
      }
      for (const auto& sub : doc.at("pieces")) f.components.push_back(coeffs_from_doc(sub));
      if (f.boxes.size() != f.components.size())
        throw std::invalid_argument("target doc: boxes and pieces differ in count");
      break;
    case TargetKind::figure1_f1:
    case TargetKind::figure1_f2:
      break;
    case TargetKind::composite_chain: {
      f.d_chain = doc.at("d_chain").get<std::vector<long>>();
      for (const auto& jl : doc.at("layers")) {
        std::vector<ChainComponent> layer;
        for (const auto& jc : jl) {
          ChainComponent comp;
          comp.inputs = jc.at("inputs").get<std::vector<int>>();
          comp.series = coeffs_from_doc(jc.at("series"));
          layer.push_back(std::move(comp));
        }
        f.chain.push_back(std::move(layer));
      }
      break;
    }
  }
  return f;
}

}  // namespace

std::string TargetFunction::to_json(int indent) const {
  return target_to_doc(*this).dump(indent);
}

TargetFunction TargetFunction::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw std::invalid_argument(std::string("target doc: ") + err.what());
  }
  try {
    return target_from_doc(doc);
  } catch (const nlohmann::json::exception& err) {
    throw std::invalid_argument(std::string("target doc: ") + err.what());
  }
}

}  // namespace bnet
