#pragma once

// Attack transforms on preference matrices, plus closed-form oracles and
// brute-force verifiers for the collusion and phantom-vote results.

#include "retrovote/prefgen.hpp"
#include "retrovote/types.hpp"

#include <span>
#include <vector>

namespace retrovote {

/// argmax over a row, ties broken by the lower project index.
Eigen::Index top_project(const PreferenceMatrix& m, Eigen::Index voter);

/// Minimum viable attack for `mechanism` under `kind`.
///
/// Voter attacks take the lowest-index voters. Project attacks pick the
/// colluding group by the configured selection rule and recruit every voter
/// whose top project is in the group. `rng` is only consulted for RandomPair.
AttackSpec select_attack(const SimulationConfig& config, const PreferenceMatrix& m, MechanismKind mechanism,
                         AttackKind kind, Rng* rng = nullptr);

PreferenceMatrix apply_voter_attack(MechanismKind mechanism, const PreferenceMatrix& m, const WeightVector& w,
                                    const AttackSpec& spec, double epsilon);

PreferenceMatrix apply_project_attack(MechanismKind mechanism, const PreferenceMatrix& m, const WeightVector& w,
                                      const AttackSpec& spec, double epsilon, BudgetMode mode);

// --- quadratic collusion ---------------------------------------------------

struct CollusionOutcome {
  double honest_utility;
  double collusion_utility;
  double gain_ratio;
};

/// Two voters with `tokens` each, splitting half to each other's project.
CollusionOutcome quadratic_collusion_oracle(double tokens);

struct SplitSearch {
  double best_split;
  double best_utility;
};

/// Grid search of sqrt(x) + sqrt(T - x) over x in [0, T] with `steps` intervals.
SplitSearch quadratic_split_grid_search(double tokens, int steps = 10000);

// --- phantom votes ---------------------------------------------------------

double mean_phantom_ratio(int n, int k);

/// Mean of `allocs` extended with k copies of epsilon.
double mean_phantom_empirical(std::span<const double> allocs, int k, double epsilon);

/// Positive honest allocations (sorted ascending) and adversary count.
class PhantomOracleInput {
 public:
  PhantomOracleInput(std::vector<double> nonzero_allocations, int k);
  const std::vector<double>& allocations() const noexcept { return allocs_; }
  int k() const noexcept { return k_; }

 private:
  std::vector<double> allocs_;
  int k_;
};

struct PhantomBound {
  double bound_value;
  // 1-based order-statistic index of the bound.
  int bound_index;
  // Largest 1-based index whose order statistic is <= the honest median.
  int median_index;
  // Set when the index fell below 1; the bound is then the smallest allocation.
  bool saturated;
};

/// Upper bound a^(m - ceil(k/2) + 1) on the post-attack median.
PhantomBound median_phantom_bound(const PhantomOracleInput& input);

/// Median of `allocs` extended with k copies of epsilon.
double median_phantom_empirical(std::span<const double> allocs, int k, double epsilon);

}  // namespace retrovote
