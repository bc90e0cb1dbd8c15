#include "retrovote/mechanisms.hpp"

namespace retrovote {

AllocationMatrix effective_allocations(const PreferenceMatrix& preferences, const WeightVector& weights) {
  if (preferences.n_voters() != weights.size()) {
    throw Error(ErrorKind::DimensionMismatch, "preference rows (" + std::to_string(preferences.n_voters()) +
                                                  ") differ from weight count (" +
                                                  std::to_string(weights.size()) + ")");
  }
  Matrix a = weights.weights().asDiagonal() * preferences.entries();
  return AllocationMatrix(std::move(a), weights.weights(), preferences.is_budget_exempt());
}

MechanismScores aggregate(MechanismKind kind, const AllocationMatrix& allocations) {
  const Matrix& a = allocations.entries();
  if (a.rows() == 0 || a.cols() == 0) throw Error(ErrorKind::EmptyMatrix, "allocation matrix is empty");
  switch (kind) {
    case MechanismKind::ControlSum: return MechanismScores(column_sums(a), kind);
    case MechanismKind::Quadratic: return MechanismScores(quadratic_scores(a), kind);
    case MechanismKind::Mean: return MechanismScores(column_means(a), kind);
    case MechanismKind::Median: return MechanismScores(column_medians(a), kind);
  }
  throw Error(ErrorKind::InvariantViolation, "unknown mechanism");
}

FundingAllocation to_funding(const MechanismScores& scores, double total_tokens) {
  const double sum = scores.scores().sum();
  if (!(sum > 0.0)) throw Error(ErrorKind::DegenerateScores, "all mechanism scores are zero");
  return FundingAllocation(scores.scores() * (total_tokens / sum), total_tokens);
}

}  // namespace retrovote
