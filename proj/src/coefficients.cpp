#include "bnet/coefficients.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "bnet/bspline.hpp"

namespace bnet {

std::vector<long> level_exponents(const BesovParams& params, long k) {
  double s_min = params.s.min();
  std::vector<long> e;
  e.reserve(params.s.s.size());
  for (double si : params.s.s) e.push_back(level_exponent(k, s_min, si));
  return e;
}

std::size_t index_set_size(const BesovParams& params, long k, std::size_t cap) {
  if (k < 0) throw std::invalid_argument("index_set_size: level must be >= 0");
  params.validate();
  auto e = level_exponents(params, k);
  std::size_t total = 1;
  for (long ei : e) {
    if (ei >= 40) throw std::length_error("index_set_size: level exponent too large");
    // |{-m, ..., 2^e}| = 2^e + m + 1 per axis.
    std::size_t axis = (std::size_t(1) << ei) + static_cast<std::size_t>(params.m) + 1;
    if (total > cap / axis) throw std::length_error("index_set_size: cap exceeded");
    total *= axis;
  }
  return total;
}

std::vector<std::vector<long>> enumerate_index_set(const BesovParams& params, long k,
                                                   std::size_t cap) {
  std::size_t total = index_set_size(params, k, cap);
  auto e = level_exponents(params, k);
  const int d = params.dim();

  std::vector<long> lo(static_cast<std::size_t>(d), -static_cast<long>(params.m));
  std::vector<long> hi(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) hi[static_cast<std::size_t>(i)] = long(1) << e[static_cast<std::size_t>(i)];

  std::vector<std::vector<long>> out;
  out.reserve(total);
  std::vector<long> j(lo);
  while (true) {
    out.push_back(j);
    int axis = d - 1;
    while (axis >= 0) {
      if (++j[static_cast<std::size_t>(axis)] <= hi[static_cast<std::size_t>(axis)]) break;
      j[static_cast<std::size_t>(axis)] = lo[static_cast<std::size_t>(axis)];
      --axis;
    }
    if (axis < 0) break;
  }
  return out;
}

double tensor_basis_eval(const BesovParams& params, const SplineIndex& idx,
                         const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != params.dim() ||
      static_cast<int>(idx.j.size()) != params.dim())
    throw std::invalid_argument("tensor_basis_eval: dimension mismatch");
  auto e = level_exponents(params, idx.k);
  double v = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double t = std::ldexp(x[i], static_cast<int>(e[i])) - static_cast<double>(idx.j[i]);
    v *= bspline_eval(params.m, t);
    if (v == 0.0) return 0.0;
  }
  return v;
}

double sequence_norm(const SplineCoefficients& coeffs) {
  const BesovParams& prm = coeffs.params;
  prm.validate();
  if (coeffs.entries.empty()) return 0.0;
  const double s_min = prm.s.min();
  const bool p_inf = std::isinf(prm.p);
  const bool q_inf = std::isinf(prm.q);

  double outer = 0.0;  // sum of q-th powers, or running max for q = inf
  auto it = coeffs.entries.begin();
  while (it != coeffs.entries.end()) {
    long k = it->first.k;
    double inner = 0.0;  // sum of p-th powers, or running max
    for (; it != coeffs.entries.end() && it->first.k == k; ++it) {
      double a = std::abs(it->second);
      if (p_inf) {
        inner = std::max(inner, a);
      } else {
        inner += std::pow(a, prm.p);
      }
    }
    double level_lp = p_inf ? inner : std::pow(inner, 1.0 / prm.p);

    double exp_sum = 0.0;
    if (!p_inf) {
      for (long ei : level_exponents(prm, k)) exp_sum += static_cast<double>(ei);
    }
    double weight = std::exp2(static_cast<double>(k) * s_min -
                              (p_inf ? 0.0 : exp_sum / prm.p));
    double term = weight * level_lp;
    if (q_inf) {
      outer = std::max(outer, term);
    } else {
      outer += std::pow(term, prm.q);
    }
  }
  return q_inf ? outer : std::pow(outer, 1.0 / prm.q);
}

double expansion_eval(const SplineCoefficients& coeffs, const std::vector<double>& x) {
  const BesovParams& prm = coeffs.params;
  if (static_cast<int>(x.size()) != prm.dim())
    throw std::invalid_argument("expansion_eval: dimension mismatch");
  const double support_hi = static_cast<double>(prm.m + 1);

  double acc = 0.0;
  long cur_k = -1;
  std::vector<long> e;
  std::vector<double> scaled(x.size());
  for (const auto& [idx, alpha] : coeffs.entries) {
    if (idx.k != cur_k) {
      cur_k = idx.k;
      e = level_exponents(prm, cur_k);
      for (std::size_t i = 0; i < x.size(); ++i)
        scaled[i] = std::ldexp(x[i], static_cast<int>(e[i]));
    }
    double v = alpha;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double t = scaled[i] - static_cast<double>(idx.j[i]);
      if (t <= 0.0 || t >= support_hi) {
        v = 0.0;
        break;
      }
      v *= bspline_eval(prm.m, t);
    }
    acc += v;
  }
  return acc;
}

// --- serialization ---------------------------------------------------------

namespace {

nlohmann::json extended_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double extended_from_json(const nlohmann::json& v, const char* field) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string& s = v.get_ref<const std::string&>();
    if (s == "inf" || s == "Infinity") return kInf;
    if (s == "-inf" || s == "-Infinity") return -kInf;
  }
  throw std::invalid_argument(std::string("coefficient doc: bad value for ") + field);
}

}  // namespace

std::string SplineCoefficients::to_json(int indent) const {
  nlohmann::json doc;
  doc["p"] = extended_to_json(params.p);
  doc["q"] = extended_to_json(params.q);
  doc["m"] = params.m;
  doc["s"] = params.s.s;
  nlohmann::json list = nlohmann::json::array();
  for (const auto& [idx, alpha] : entries) {
    nlohmann::json e;
    e["k"] = idx.k;
    e["j"] = idx.j;
    e["alpha"] = alpha;
    list.push_back(std::move(e));
  }
  doc["entries"] = std::move(list);
  return doc.dump(indent);
}

SplineCoefficients SplineCoefficients::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw std::invalid_argument(std::string("coefficient doc: ") + err.what());
  }
  SplineCoefficients out;
  try {
    out.params.p = extended_from_json(doc.at("p"), "p");
    out.params.q = extended_from_json(doc.at("q"), "q");
    out.params.m = doc.at("m").get<int>();
    out.params.s.s = doc.at("s").get<std::vector<double>>();
    for (const auto& e : doc.at("entries")) {
      SplineIndex idx;
      idx.k = e.at("k").get<long>();
      idx.j = e.at("j").get<std::vector<long>>();
      if (static_cast<int>(idx.j.size()) != out.params.dim())
        throw std::invalid_argument("coefficient doc: entry dimension mismatch");
      if (idx.k < 0) throw std::invalid_argument("coefficient doc: negative level");
      out.entries[idx] = e.at("alpha").get<double>();
    }
  } catch (const nlohmann::json::exception& err) {
    throw std::invalid_argument(std::string("coefficient doc: ") + err.what());
  }
  out.params.validate();
  return out;
}

}  // namespace bnet
