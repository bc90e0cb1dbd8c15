#pragma once

// Aggregation rules over an allocation matrix (voters x projects).
//
// The column kernels are templates over any Eigen dense expression so they
// work on blocks, maps and non-double scalars; the typed entry points below
// wrap them with the domain invariants.

#include "retrovote/types.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace retrovote {

template <typename Derived>
auto column_sums(const Eigen::MatrixBase<Derived>& a) {
  return a.colwise().sum().transpose().eval();
}

template <typename Derived>
auto quadratic_scores(const Eigen::MatrixBase<Derived>& a) {
  return a.cwiseSqrt().colwise().sum().transpose().eval();
}

template <typename Derived>
auto column_means(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  return (a.colwise().sum().transpose() / static_cast<Scalar>(a.rows())).eval();
}

/// Median of a sequence; even lengths average the two central order statistics.
/// Reorders `values`.
template <typename Scalar>
Scalar median_in_place(std::vector<Scalar>& values) {
  const auto n = values.size();
  const auto upper = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), upper, values.end());
  if (n % 2 == 1) return *upper;
  const Scalar lower = *std::max_element(values.begin(), upper);
  return (lower + *upper) / Scalar(2);
}

/// Per-column median over every row, zeros included.
template <typename Derived>
auto column_medians(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(a.cols());
  std::vector<Scalar> buffer(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index p = 0; p < a.cols(); ++p) {
    for (Eigen::Index v = 0; v < a.rows(); ++v) buffer[static_cast<std::size_t>(v)] = a(v, p);
    out(p) = median_in_place(buffer);
  }
  return out;
}

/// A(i, j) = M(i, j) * w_i. Budget-exempt preferences yield a budget-exempt
/// allocation.
AllocationMatrix effective_allocations(const PreferenceMatrix& preferences, const WeightVector& weights);

MechanismScores aggregate(MechanismKind kind, const AllocationMatrix& allocations);

/// tokens_j = T * R_j / sum(R).
FundingAllocation to_funding(const MechanismScores& scores, double total_tokens);

}  // namespace retrovote
