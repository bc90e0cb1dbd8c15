#pragma once

// Shared domain types for a retroactive funding round.
//
// Matrices are Eigen dense types with voters along rows and projects along
// columns. Every type validates its invariants on construction and is
// immutable afterwards.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace retrovote {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Absolute tolerance used for every invariant check.
inline constexpr double kTolerance = 1e-9;

enum class ErrorKind {
  InvalidConfig,
  ParseError,
  NegativeEntry,
  DimensionMismatch,
  DegenerateRow,
  EmptyMatrix,
  DegenerateScores,
  DegenerateDistribution,
  NotEnoughVoters,
  NotEnoughProjects,
  InfeasibleEpsilon,
  TooFewColluders,
  IterationFailed,
  InvariantViolation,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by validate_config; `invariant()` names the rule that failed.
class InvalidConfig : public Error {
 public:
  InvalidConfig(std::string invariant, const std::string& detail)
      : Error(ErrorKind::InvalidConfig, invariant + ": " + detail),
        invariant_(std::move(invariant)) {}
  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

enum class MechanismKind { ControlSum, Quadratic, Mean, Median };
enum class Scenario { Baseline, VoterAttack, ProjectAttack };
enum class AttackKind { None, VoterAttack, ProjectAttack };

std::string_view to_string(MechanismKind kind);
std::string_view to_string(Scenario scenario);
MechanismKind parse_mechanism(std::string_view name);
Scenario parse_scenario(std::string_view name);

/// N x P row-stochastic matrix of voter preference shares.
///
/// A budget-exempt matrix skips the row-sum invariant; it is produced only by
/// the literal project attack, whose rows intentionally overspend.
class PreferenceMatrix {
 public:
  explicit PreferenceMatrix(Matrix entries);
  static PreferenceMatrix budget_exempt(Matrix entries);

  const Matrix& entries() const noexcept { return entries_; }
  Eigen::Index n_voters() const noexcept { return entries_.rows(); }
  Eigen::Index n_projects() const noexcept { return entries_.cols(); }
  bool is_budget_exempt() const noexcept { return budget_exempt_; }

  double operator()(Eigen::Index voter, Eigen::Index project) const {
    return entries_(voter, project);
  }

  friend bool operator==(const PreferenceMatrix& a, const PreferenceMatrix& b) {
    return a.budget_exempt_ == b.budget_exempt_ && a.entries_ == b.entries_;
  }

 private:
  PreferenceMatrix(Matrix entries, bool exempt);
  Matrix entries_;
  bool budget_exempt_ = false;
};

/// Per-voter voting power; sums to the normalization constant c.
class WeightVector {
 public:
  WeightVector(Vector weights, double normalization_constant);

  const Vector& weights() const noexcept { return weights_; }
  double normalization_constant() const noexcept { return constant_; }
  Eigen::Index size() const noexcept { return weights_.size(); }
  double operator[](Eigen::Index voter) const { return weights_(voter); }

 private:
  Vector weights_;
  double constant_;
};

/// Effective token allocations, A(i, j) = M(i, j) * w_i.
class AllocationMatrix {
 public:
  /// Checks non-negativity and, unless budget exempt, row i <= budget(i).
  AllocationMatrix(Matrix entries, const Vector& budgets, bool budget_exempt = false);

  /// Unchecked budget; only non-negativity is enforced.
  static AllocationMatrix unbudgeted(Matrix entries);

  const Matrix& entries() const noexcept { return entries_; }
  Eigen::Index n_voters() const noexcept { return entries_.rows(); }
  Eigen::Index n_projects() const noexcept { return entries_.cols(); }
  bool is_budget_exempt() const noexcept { return budget_exempt_; }

 private:
  AllocationMatrix() = default;
  Matrix entries_;
  bool budget_exempt_ = false;
};

/// Raw per-project aggregate R_p of one mechanism.
class MechanismScores {
 public:
  MechanismScores(Vector scores, MechanismKind mechanism);

  const Vector& scores() const noexcept { return scores_; }
  MechanismKind mechanism() const noexcept { return mechanism_; }
  Eigen::Index size() const noexcept { return scores_.size(); }

 private:
  Vector scores_;
  MechanismKind mechanism_;
};

/// Tokens per project, summing to the round total T.
class FundingAllocation {
 public:
  FundingAllocation(Vector tokens, double total);

  const Vector& tokens() const noexcept { return tokens_; }
  double total() const noexcept { return total_; }

 private:
  Vector tokens_;
  double total_;
};

enum class DistributionKind { Pareto, Uniform, Gaussian };

/// Standard Pareto has support [1, inf); Lomax is the same law shifted to
/// [0, inf), which is what numpy's `pareto` draws.
enum class ParetoVariant { Standard, Lomax };

struct DistributionSpec {
  DistributionKind kind = DistributionKind::Pareto;
  double alpha = 2.5;
  ParetoVariant variant = ParetoVariant::Lomax;
  double mu = 1.0;
  double sigma = 0.25;

  static DistributionSpec pareto(double alpha, ParetoVariant variant = ParetoVariant::Lomax) {
    return {DistributionKind::Pareto, alpha, variant, 1.0, 0.25};
  }
  static DistributionSpec uniform() { return {DistributionKind::Uniform, 2.5, ParetoVariant::Lomax, 1.0, 0.25}; }
  static DistributionSpec gaussian(double mu = 1.0, double sigma = 0.25) {
    return {DistributionKind::Gaussian, 2.5, ParetoVariant::Lomax, mu, sigma};
  }

  friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;
};

enum class ProjectSelection { TopBySupporters, RandomPair };
enum class BudgetMode { BudgetPreserving, Literal };

struct VoterAttackConfig {
  // Attackers used against mean and median.
  int attacker_count = 1;
  // Colluders used against quadratic, grouped into consecutive pairs.
  int quadratic_attacker_count = 2;

  friend bool operator==(const VoterAttackConfig&, const VoterAttackConfig&) = default;
};

struct ProjectAttackConfig {
  int colluding_count = 2;
  ProjectSelection selection = ProjectSelection::TopBySupporters;
  BudgetMode budget_mode = BudgetMode::BudgetPreserving;

  friend bool operator==(const ProjectAttackConfig&, const ProjectAttackConfig&) = default;
};

struct SimulationConfig {
  int n_voters = 133;
  int n_projects = 374;
  double total_tokens = 1.0;
  int iterations = 10000;
  std::uint64_t seed = 42;
  DistributionSpec distribution{};
  double epsilon = 0.01;
  double normalization_constant = 1000.0;
  VoterAttackConfig voter_attack{};
  ProjectAttackConfig project_attack{};

  friend bool operator==(const SimulationConfig&, const SimulationConfig&) = default;
};

/// Returns the config unchanged or throws InvalidConfig naming the violated
/// invariant.
SimulationConfig validate_config(const SimulationConfig& config);

struct AttackSpec {
  AttackKind kind = AttackKind::None;
  std::vector<Eigen::Index> attacker_voters;
  std::vector<Eigen::Index> colluding_projects;
  std::vector<Eigen::Index> supporters;
};

std::string_view to_string(DistributionKind kind);
std::string_view to_string(ParetoVariant variant);
std::string_view to_string(ProjectSelection selection);
std::string_view to_string(BudgetMode mode);

DistributionKind parse_distribution_kind(std::string_view name);
ParetoVariant parse_pareto_variant(std::string_view name);
ProjectSelection parse_selection(std::string_view name);
BudgetMode parse_budget_mode(std::string_view name);

}  // namespace retrovote
