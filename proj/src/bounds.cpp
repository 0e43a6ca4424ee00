#include "bnet/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace bnet {

double lipschitz_param_bound(double eps, long affine_count, long D, double B) {
  if (!(eps >= 0.0) || affine_count < 1 || D < 1)
    throw std::invalid_argument("lipschitz_param_bound: bad arguments");
  double A = static_cast<double>(affine_count);
  double Bv = std::max(B, 1.0);
  // In logs so large depths do not overflow before the final exp.
  double lg = std::log(A) + (A - 1.0) * std::log(Bv) + A * std::log(static_cast<double>(D) + 1.0);
  return eps * std::exp(lg);
}

CoveringBound covering_bound(double eps, const ShapeBudget& shape, double margin_a) {
  shape.validate();
  CoveringBound out;
  if (!(eps > 0.0)) return out;

  double L = static_cast<double>(shape.L);
  double D = static_cast<double>(shape.D);
  double Bv = std::max(shape.B, 1.0);
  double inner = std::log(2.0) + std::log(L) + L * std::log(Bv) +
                 2.0 * L * std::log(D + 1.0) - std::log(eps);
  out.log_value = (static_cast<double>(shape.S) + 1.0) * inner;
  out.valid = shape.L >= 3 && shape.D >= 3;

  if (margin_a > 0.0) {
    double log_floor = std::log(2.0 * margin_a) + std::log(L) + (L - 1.0) * std::log(Bv) +
                       L * std::log(D + 1.0);
    out.margin_floor = std::exp(log_floor);
    out.valid = out.valid && std::log(eps) >= log_floor;
  }
  return out;
}

double vc_covering_bound(long L, long S, double eps, double K, double p, double C1, double C2) {
  if (L < 1 || S < 2 || !(eps > 0.0) || !(K > 0.0) || !(p > 0.0))
    throw std::invalid_argument("vc_covering_bound: bad arguments");
  double Ld = static_cast<double>(L);
  double Sd = static_cast<double>(S);
  double ratio = std::log(K) - p * std::log(eps);
  if (!(ratio > 0.0)) throw std::invalid_argument("vc_covering_bound: requires K > eps^p");
  return C1 * Ld * Sd * std::log(Sd) * ratio + std::log(C2 * Ld * Sd * std::log(Sd));
}

}  // namespace bnet
