#pragma once

#include <vector>

#include "bnet/coefficients.hpp"

namespace bnet {

struct Network;

// Batch kernels. Each has a serial reference implementation and an OpenMP
// variant; the parallel form writes one output slot per point (no shared
// accumulators), so results are bitwise identical for any thread count.
// Reductions over the filled buffers use fixed-order pairwise summation.

void set_threads(int n);  // no-op when built without OpenMP
int max_threads();

// Fixed-order pairwise sum; deterministic and more accurate than sequential.
double pairwise_sum(const double* v, std::size_t n);
double pairwise_sum(const std::vector<double>& v);

std::vector<double> expansion_eval_batch_serial(const SplineCoefficients& coeffs,
                                                const std::vector<std::vector<double>>& pts);
std::vector<double> expansion_eval_batch(const SplineCoefficients& coeffs,
                                         const std::vector<std::vector<double>>& pts);

std::vector<double> forward_batch_serial(const Network& net,
                                         const std::vector<std::vector<double>>& pts);
std::vector<double> forward_batch(const Network& net,
                                  const std::vector<std::vector<double>>& pts);

}  // namespace bnet
