#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bnet/besov.hpp"

namespace bnet {

// Position of one tensor-product B-spline in the multiresolution system:
// level k >= 0 and one shift j_i per axis. At level k, axis i is resolved at
// scale 2^{e_i(k)} with e_i(k) = level_exponent(k, s_min, s_i), and the
// admissible shifts are j_i in {-m, ..., 2^{e_i(k)}}.
struct SplineIndex {
  long k = 0;
  std::vector<long> j;

  auto operator<=>(const SplineIndex&) const = default;
};

// Sparse coefficient set (alpha_{k,j}) for a tensor B-spline expansion,
// together with the space parameters it is measured against. Entries are kept
// in a sorted map so iteration order, serialization order, and every derived
// quantity are canonical.
struct SplineCoefficients {
  BesovParams params;
  std::map<SplineIndex, double> entries;

  int dim() const { return params.dim(); }

  // Serialization to the coefficient document format (JSON). Values survive a
  // round trip bit-exactly; infinite p or q serialize as the string "inf".
  std::string to_json(int indent = -1) const;
  static SplineCoefficients from_json(const std::string& text);
};

// Per-axis level exponents e_i(k) for the given parameters.
std::vector<long> level_exponents(const BesovParams& params, long k);

// Size of J_i(k) per axis is 2^{e_i(k)} + m + 1; this returns the product
// over axes, throwing std::length_error above `cap`.
std::size_t index_set_size(const BesovParams& params, long k,
                           std::size_t cap = std::size_t(1) << 26);

// All shift vectors j in J(k), in lexicographic order.
std::vector<std::vector<long>> enumerate_index_set(const BesovParams& params, long k,
                                                   std::size_t cap = std::size_t(1) << 26);

// Value of the tensor basis function M_{k,j} at x: product over axes of
// bspline_eval(m, 2^{e_i(k)} x_i - j_i).
double tensor_basis_eval(const BesovParams& params, const SplineIndex& idx,
                         const std::vector<double>& x);

// Weighted sequence norm of the coefficient set:
//   { sum_k [ 2^{w(k)} ( sum_{j} |alpha_{k,j}|^p )^{1/p} ]^q }^{1/q}
// with w(k) = k*s_min - (sum_i e_i(k))/p, and the usual sup modifications for
// p or q infinite. At k = 0 the weight is exactly 0. Absent entries are zero.
double sequence_norm(const SplineCoefficients& coeffs);

// Pointwise value of the expansion sum_{k,j} alpha_{k,j} M_{k,j}(x). Compact
// support is used to skip entries whose basis function vanishes at x.
double expansion_eval(const SplineCoefficients& coeffs, const std::vector<double>& x);

}  // namespace bnet
