#include "bnet/kernels.hpp"

#include "bnet/network.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bnet {

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

double pairwise_sum(const double* v, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double acc = v[0];
    for (std::size_t i = 1; i < n; ++i) acc += v[i];
    return acc;
  }
  std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

std::vector<double> expansion_eval_batch_serial(const SplineCoefficients& coeffs,
                                                const std::vector<std::vector<double>>& pts) {
  std::vector<double> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = expansion_eval(coeffs, pts[i]);
  return out;
}

std::vector<double> expansion_eval_batch(const SplineCoefficients& coeffs,
                                         const std::vector<std::vector<double>>& pts) {
  std::vector<double> out(pts.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(pts.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = expansion_eval(coeffs, pts[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<double> forward_batch_serial(const Network& net,
                                         const std::vector<std::vector<double>>& pts) {
  std::vector<double> out(pts.size());
  Workspace ws;
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = net.forward(pts[i], ws);
  return out;
}

std::vector<double> forward_batch(const Network& net,
                                  const std::vector<std::vector<double>>& pts) {
  std::vector<double> out(pts.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(pts.size());
#pragma omp parallel
  {
    Workspace ws;  // scratch is per-thread, outputs are per-point slots
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
      out[static_cast<std::size_t>(i)] = net.forward(pts[static_cast<std::size_t>(i)], ws);
  }
  return out;
}

}  // namespace bnet
