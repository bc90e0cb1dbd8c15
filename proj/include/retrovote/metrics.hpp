#pragma once

// Percentage normalization and the Pairwise Manipulation Score (PMS).

#include "retrovote/types.hpp"

#include <Eigen/Dense>

namespace retrovote {

/// 100 * v / sum(v). Throws DegenerateDistribution when nothing is positive.
template <typename Derived>
auto to_percentages(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Scalar total = v.sum();
  if (!(total > Scalar(0))) {
    throw Error(ErrorKind::DegenerateDistribution, "distribution has no positive mass");
  }
  return (v * (Scalar(100) / total)).eval();
}

/// PMS(baseline, attacked) = 100 * |p1 - p2|^2 / |p1|^2 on percentage vectors.
/// Asymmetric: the baseline supplies the denominator.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar pms(const Eigen::MatrixBase<DerivedA>& baseline,
                              const Eigen::MatrixBase<DerivedB>& attacked) {
  using Scalar = typename DerivedA::Scalar;
  if (baseline.size() != attacked.size()) {
    throw Error(ErrorKind::DimensionMismatch, "PMS needs equal-length distributions");
  }
  const auto p1 = to_percentages(baseline);
  const auto p2 = to_percentages(attacked);
  return Scalar(100) * (p1 - p2).squaredNorm() / p1.squaredNorm();
}

inline double pms(const MechanismScores& baseline, const MechanismScores& attacked) {
  return pms(baseline.scores(), attacked.scores());
}

struct PmsScore {
  double value;
  MechanismKind mechanism;
  Scenario scenario;
};

}  // namespace retrovote
