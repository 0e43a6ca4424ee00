#include "bnet/network.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace bnet {

int Network::max_width() const {
  int w = 0;
  for (int l = 0; l + 1 < static_cast<int>(layers.size()); ++l)
    w = std::max(w, layers[static_cast<std::size_t>(l)].out);
  return w;
}

std::vector<int> Network::hidden_widths() const {
  std::vector<int> w;
  for (int l = 0; l + 1 < static_cast<int>(layers.size()); ++l)
    w.push_back(layers[static_cast<std::size_t>(l)].out);
  return w;
}

std::size_t Network::param_total() const {
  std::size_t t = 0;
  for (const auto& l : layers) t += l.W.size() + l.b.size();
  return t;
}

std::size_t Network::nonzero_count() const {
  std::size_t s = 0;
  for (const auto& l : layers) {
    for (double v : l.W) s += (v != 0.0);
    for (double v : l.b) s += (v != 0.0);
  }
  return s;
}

double Network::sup_weight() const {
  double b = 0.0;
  for (const auto& l : layers) {
    for (double v : l.W) b = std::max(b, std::abs(v));
    for (double v : l.b) b = std::max(b, std::abs(v));
  }
  return b;
}

void Network::validate() const {
  if (layers.empty()) throw std::invalid_argument("network has no layers");
  if (layers.front().in != d) throw std::invalid_argument("network input width mismatch");
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    if (layers[l].out != layers[l + 1].in)
      throw std::invalid_argument("network layer widths do not chain");
  }
  for (const auto& l : layers) {
    if (l.W.size() != static_cast<std::size_t>(l.in) * static_cast<std::size_t>(l.out) ||
        l.b.size() != static_cast<std::size_t>(l.out))
      throw std::invalid_argument("network layer storage mismatch");
  }
  if (!mask.empty() && mask.size() != param_total())
    throw std::invalid_argument("network mask length mismatch");
  if (clip && output_dim() != 1)
    throw std::invalid_argument("clipped network must have scalar output");
}

std::vector<double> Network::forward_vec(const std::vector<double>& x, Workspace& ws) const {
  ws.a.assign(x.begin(), x.end());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const Layer& lay = layers[l];
    ws.z.assign(lay.b.begin(), lay.b.end());
    const double* W = lay.W.data();
    for (int r = 0; r < lay.out; ++r) {
      const double* row = W + static_cast<std::size_t>(r) * lay.in;
      double acc = ws.z[static_cast<std::size_t>(r)];
      for (int c = 0; c < lay.in; ++c) acc += row[c] * ws.a[static_cast<std::size_t>(c)];
      ws.z[static_cast<std::size_t>(r)] = acc;
    }
    if (l + 1 < layers.size()) {
      for (double& v : ws.z) v = v > 0.0 ? v : 0.0;
    }
    ws.a.swap(ws.z);
  }
  return ws.a;
}

double Network::forward(const std::vector<double>& x, Workspace& ws) const {
  forward_vec(x, ws);
  double v = ws.a[0];
  if (clip) v = std::clamp(v, -1.0, 1.0);
  return v;
}

double Network::forward(const std::vector<double>& x) const {
  Workspace ws;
  return forward(x, ws);
}

std::vector<double> Network::forward_vec(const std::vector<double>& x) const {
  Workspace ws;
  return forward_vec(x, ws);
}

double Network::get_param(std::size_t idx) const {
  for (const auto& l : layers) {
    if (idx < l.W.size()) return l.W[idx];
    idx -= l.W.size();
    if (idx < l.b.size()) return l.b[idx];
    idx -= l.b.size();
  }
  throw std::out_of_range("network parameter index");
}

void Network::set_param(std::size_t idx, double v) {
  for (auto& l : layers) {
    if (idx < l.W.size()) {
      l.W[idx] = v;
      return;
    }
    idx -= l.W.size();
    if (idx < l.b.size()) {
      l.b[idx] = v;
      return;
    }
    idx -= l.b.size();
  }
  throw std::out_of_range("network parameter index");
}

void Network::set_mask(std::vector<std::uint8_t> m) {
  if (m.size() != param_total())
    throw std::invalid_argument("set_mask: length must equal parameter count");
  mask = std::move(m);
  std::size_t idx = 0;
  for (auto& l : layers) {
    for (double& v : l.W) {
      if (!mask[idx++]) v = 0.0;
    }
    for (double& v : l.b) {
      if (!mask[idx++]) v = 0.0;
    }
  }
}

std::size_t param_count(long L, long D, long d) {
  if (L < 0 || D < 1 || d < 1) throw std::invalid_argument("param_count: bad shape");
  if (L == 0) return static_cast<std::size_t>(d) + 1;
  std::size_t t = static_cast<std::size_t>(D) * (static_cast<std::size_t>(d) + 1);
  t += static_cast<std::size_t>(L - 1) * static_cast<std::size_t>(D) *
       (static_cast<std::size_t>(D) + 1);
  t += static_cast<std::size_t>(D) + 1;
  return t;
}

Network clip_gadget(double F) {
  if (!(F > 0.0)) throw std::invalid_argument("clip_gadget: F must be positive");
  Network net;
  net.d = 1;
  Layer l1(1, 2);
  l1.w(0, 0) = 1.0 / F;
  l1.b[0] = 1.0;
  l1.w(1, 0) = 1.0 / F;
  l1.b[1] = -1.0;
  Layer l2(2, 1);
  l2.w(0, 0) = F;
  l2.w(0, 1) = -F;
  l2.b[0] = -F;
  net.layers = {l1, l2};
  return net;
}

Network clip01_gadget(int dim) {
  if (dim < 1) throw std::invalid_argument("clip01_gadget: dim must be >= 1");
  Network net;
  net.d = dim;
  Layer l1(dim, 2 * dim);
  for (int i = 0; i < dim; ++i) {
    l1.w(2 * i, i) = 1.0;
    l1.w(2 * i + 1, i) = 1.0;
    l1.b[static_cast<std::size_t>(2 * i + 1)] = -1.0;
  }
  Layer l2(2 * dim, dim);
  for (int i = 0; i < dim; ++i) {
    l2.w(i, 2 * i) = 1.0;
    l2.w(i, 2 * i + 1) = -1.0;
  }
  net.layers = {l1, l2};
  return net;
}

void rescale_weights(Network& net, double target_B) {
  net.validate();
  if (!(target_B > 0.0)) throw std::invalid_argument("rescale_weights: target must be positive");

  const std::size_t n = net.layers.size();
  std::vector<double> wmax(n, 0.0);
  for (std::size_t l = 0; l < n; ++l)
    for (double v : net.layers[l].W) wmax[l] = std::max(wmax[l], std::abs(v));

  // Geometric mean over layers that have any weight at all; all-zero layers
  // cannot be moved and keep factor 1.
  double log_sum = 0.0;
  std::size_t active = 0;
  for (double m : wmax) {
    if (m > 0.0) {
      log_sum += std::log(m);
      ++active;
    }
  }
  if (active > 0) {
    double G = std::exp(log_sum / static_cast<double>(active));
    double cum = 1.0;
    for (std::size_t l = 0; l < n; ++l) {
      double c = wmax[l] > 0.0 ? G / wmax[l] : 1.0;
      cum *= c;
      for (double& v : net.layers[l].W) v *= c;
      for (double& v : net.layers[l].b) v *= cum;
    }
  }

  double achieved = net.sup_weight();
  if (achieved > target_B) throw RescaleInfeasible(achieved);
}

// --- serialization ---------------------------------------------------------

std::string Network::to_json(int indent) const {
  validate();
  nlohmann::json doc;
  doc["d"] = d;
  doc["L"] = hidden_count();
  doc["widths"] = hidden_widths();
  doc["clip"] = clip;
  nlohmann::json lys = nlohmann::json::array();
  for (const auto& l : layers) {
    nlohmann::json jl;
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < l.out; ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < l.in; ++c) row.push_back(l.w(r, c));
      rows.push_back(std::move(row));
    }
    jl["W"] = std::move(rows);
    jl["b"] = l.b;
    lys.push_back(std::move(jl));
  }
  doc["layers"] = std::move(lys);
  if (!mask.empty()) {
    std::vector<int> m(mask.begin(), mask.end());
    doc["mask"] = m;
  }
  return doc.dump(indent);
}

Network Network::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw std::invalid_argument(std::string("network doc: ") + err.what());
  }
  Network net;
  try {
    net.d = doc.at("d").get<int>();
    net.clip = doc.at("clip").get<bool>();
    for (const auto& jl : doc.at("layers")) {
      const auto& rows = jl.at("W");
      Layer l;
      l.out = static_cast<int>(rows.size());
      l.in = l.out > 0 ? static_cast<int>(rows.at(0).size()) : 0;
      l.W.reserve(static_cast<std::size_t>(l.in) * static_cast<std::size_t>(l.out));
      for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != l.in)
          throw std::invalid_argument("network doc: ragged weight rows");
        for (const auto& v : row) l.W.push_back(v.get<double>());
      }
      l.b = jl.at("b").get<std::vector<double>>();
      net.layers.push_back(std::move(l));
    }
    if (doc.contains("mask")) {
      auto m = doc.at("mask").get<std::vector<int>>();
      std::vector<std::uint8_t> mm(m.size());
      for (std::size_t i = 0; i < m.size(); ++i) mm[i] = m[i] ? 1 : 0;
      net.set_mask(std::move(mm));
    }
  } catch (const nlohmann::json::exception& err) {
    throw std::invalid_argument(std::string("network doc: ") + err.what());
  }
  net.validate();
  const int declared_L = doc.at("L").get<int>();
  if (declared_L != net.hidden_count())
    throw std::invalid_argument("network doc: declared depth does not match layers");
  return net;
}

}  // namespace bnet
