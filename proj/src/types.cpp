#include "retrovote/types.hpp"

#include <cmath>
#include <sstream>

namespace retrovote {

namespace {

void require_finite_non_negative(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw Error(ErrorKind::InvariantViolation, std::string(what) + " has non-finite entries");
  }
  if (m.size() > 0 && m.minCoeff() < 0.0) {
    throw Error(ErrorKind::NegativeEntry, std::string(what) + " has negative entries");
  }
}

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view name, const std::pair<std::string_view, Enum> (&table)[N],
                const char* what) {
  for (const auto& [key, value] : table) {
    if (key == name) return value;
  }
  throw Error(ErrorKind::ParseError, std::string("unknown ") + what + " '" + std::string(name) + "'");
}

constexpr std::pair<std::string_view, MechanismKind> kMechanisms[] = {
    {"control_sum", MechanismKind::ControlSum},
    {"quadratic", MechanismKind::Quadratic},
    {"mean", MechanismKind::Mean},
    {"median", MechanismKind::Median},
};
constexpr std::pair<std::string_view, Scenario> kScenarios[] = {
    {"baseline", Scenario::Baseline},
    {"voter_attack", Scenario::VoterAttack},
    {"project_attack", Scenario::ProjectAttack},
};
constexpr std::pair<std::string_view, DistributionKind> kDistributions[] = {
    {"pareto", DistributionKind::Pareto},
    {"uniform", DistributionKind::Uniform},
    {"gaussian", DistributionKind::Gaussian},
};
constexpr std::pair<std::string_view, ParetoVariant> kVariants[] = {
    {"standard", ParetoVariant::Standard},
    {"lomax", ParetoVariant::Lomax},
};
constexpr std::pair<std::string_view, ProjectSelection> kSelections[] = {
    {"top_by_supporters", ProjectSelection::TopBySupporters},
    {"random_pair", ProjectSelection::RandomPair},
};
constexpr std::pair<std::string_view, BudgetMode> kBudgetModes[] = {
    {"budget_preserving", BudgetMode::BudgetPreserving},
    {"literal", BudgetMode::Literal},
};

template <typename Enum, std::size_t N>
std::string_view name_of(Enum value, const std::pair<std::string_view, Enum> (&table)[N]) {
  for (const auto& [key, v] : table) {
    if (v == value) return key;
  }
  return "unknown";
}

}  // namespace

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NegativeEntry: return "NegativeEntry";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateRow: return "DegenerateRow";
    case ErrorKind::EmptyMatrix: return "EmptyMatrix";
    case ErrorKind::DegenerateScores: return "DegenerateScores";
    case ErrorKind::DegenerateDistribution: return "DegenerateDistribution";
    case ErrorKind::NotEnoughVoters: return "NotEnoughVoters";
    case ErrorKind::NotEnoughProjects: return "NotEnoughProjects";
    case ErrorKind::InfeasibleEpsilon: return "InfeasibleEpsilon";
    case ErrorKind::TooFewColluders: return "TooFewColluders";
    case ErrorKind::IterationFailed: return "IterationFailed";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

std::string_view to_string(MechanismKind kind) { return name_of(kind, kMechanisms); }
std::string_view to_string(Scenario scenario) { return name_of(scenario, kScenarios); }
std::string_view to_string(DistributionKind kind) { return name_of(kind, kDistributions); }
std::string_view to_string(ParetoVariant variant) { return name_of(variant, kVariants); }
std::string_view to_string(ProjectSelection selection) { return name_of(selection, kSelections); }
std::string_view to_string(BudgetMode mode) { return name_of(mode, kBudgetModes); }

MechanismKind parse_mechanism(std::string_view name) { return parse_enum(name, kMechanisms, "mechanism"); }
Scenario parse_scenario(std::string_view name) { return parse_enum(name, kScenarios, "scenario"); }
DistributionKind parse_distribution_kind(std::string_view name) {
  return parse_enum(name, kDistributions, "distribution");
}
ParetoVariant parse_pareto_variant(std::string_view name) {
  return parse_enum(name, kVariants, "pareto variant");
}
ProjectSelection parse_selection(std::string_view name) {
  return parse_enum(name, kSelections, "project selection");
}
BudgetMode parse_budget_mode(std::string_view name) { return parse_enum(name, kBudgetModes, "budget mode"); }

// ---------------------------------------------------------------------------

PreferenceMatrix::PreferenceMatrix(Matrix entries) : PreferenceMatrix(std::move(entries), false) {}

PreferenceMatrix PreferenceMatrix::budget_exempt(Matrix entries) {
  return PreferenceMatrix(std::move(entries), true);
}

PreferenceMatrix::PreferenceMatrix(Matrix entries, bool exempt)
    : entries_(std::move(entries)), budget_exempt_(exempt) {
  if (entries_.rows() < 1 || entries_.cols() < 1) {
    throw Error(ErrorKind::EmptyMatrix, "preference matrix must have at least one voter and project");
  }
  require_finite_non_negative(entries_, "preference matrix");
  if (budget_exempt_) return;
  if (entries_.maxCoeff() > 1.0 + kTolerance) {
    throw Error(ErrorKind::InvariantViolation, "preference entries must lie in [0, 1]");
  }
  const Vector sums = entries_.rowwise().sum();
  for (Eigen::Index v = 0; v < sums.size(); ++v) {
    if (std::abs(sums(v) - 1.0) > kTolerance) {
      std::ostringstream os;
      os << "preference row " << v << " sums to " << sums(v) << ", expected 1";
      throw Error(ErrorKind::InvariantViolation, os.str());
    }
  }
}

WeightVector::WeightVector(Vector weights, double normalization_constant)
    : weights_(std::move(weights)), constant_(normalization_constant) {
  if (weights_.size() < 1) throw Error(ErrorKind::EmptyMatrix, "weight vector is empty");
  if (!(constant_ > 0.0)) throw Error(ErrorKind::InvariantViolation, "normalization constant must be positive");
  if (!weights_.allFinite() || weights_.minCoeff() <= 0.0) {
    throw Error(ErrorKind::InvariantViolation, "voter weights must be positive");
  }
  if (std::abs(weights_.sum() - constant_) > kTolerance * constant_) {
    throw Error(ErrorKind::InvariantViolation, "voter weights must sum to the normalization constant");
  }
}

AllocationMatrix::AllocationMatrix(Matrix entries, const Vector& budgets, bool budget_exempt)
    : entries_(std::move(entries)), budget_exempt_(budget_exempt) {
  require_finite_non_negative(entries_, "allocation matrix");
  if (budgets.size() != entries_.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "budget vector length differs from voter count");
  }
  if (budget_exempt_) return;
  const Vector spent = entries_.rowwise().sum();
  for (Eigen::Index v = 0; v < spent.size(); ++v) {
    if (spent(v) > budgets(v) + kTolerance) {
      std::ostringstream os;
      os << "voter " << v << " allocates " << spent(v) << " over budget " << budgets(v);
      throw Error(ErrorKind::InvariantViolation, os.str());
    }
  }
}

AllocationMatrix AllocationMatrix::unbudgeted(Matrix entries) {
  AllocationMatrix a;
  require_finite_non_negative(entries, "allocation matrix");
  a.entries_ = std::move(entries);
  a.budget_exempt_ = true;
  return a;
}

MechanismScores::MechanismScores(Vector scores, MechanismKind mechanism)
    : scores_(std::move(scores)), mechanism_(mechanism) {
  if (!scores_.allFinite() || (scores_.size() > 0 && scores_.minCoeff() < 0.0)) {
    throw Error(ErrorKind::InvariantViolation, "mechanism scores must be finite and non-negative");
  }
}

FundingAllocation::FundingAllocation(Vector tokens, double total)
    : tokens_(std::move(tokens)), total_(total) {
  if (!(total_ > 0.0)) throw Error(ErrorKind::InvariantViolation, "funding total must be positive");
  if (!tokens_.allFinite() || (tokens_.size() > 0 && tokens_.minCoeff() < 0.0)) {
    throw Error(ErrorKind::InvariantViolation, "funding tokens must be non-negative");
  }
  if (std::abs(tokens_.sum() - total_) > kTolerance * total_) {
    throw Error(ErrorKind::InvariantViolation, "funding tokens must sum to the total");
  }
}

// ---------------------------------------------------------------------------

SimulationConfig validate_config(const SimulationConfig& config) {
  auto fail = [](const char* invariant, const std::string& detail) {
    throw InvalidConfig(invariant, detail);
  };
  if (config.n_voters < 1) fail("n_voters_positive", "n_voters must be at least 1");
  if (config.n_projects < 1) fail("n_projects_positive", "n_projects must be at least 1");
  if (!(config.total_tokens > 0.0) || !std::isfinite(config.total_tokens)) {
    fail("total_tokens_positive", "total_tokens must be positive");
  }
  if (config.iterations < 1) fail("iterations_positive", "iterations must be at least 1");
  if (!(config.epsilon > 0.0) || !std::isfinite(config.epsilon)) {
    fail("epsilon_positive", "epsilon must be positive");
  }
  if (!(config.normalization_constant > 0.0) || !std::isfinite(config.normalization_constant)) {
    fail("normalization_constant_positive", "normalization constant must be positive");
  }

  const auto& dist = config.distribution;
  if (dist.kind == DistributionKind::Pareto && !(dist.alpha > 1.0)) {
    fail("pareto_alpha_gt_1", "Pareto shape alpha must exceed 1");
  }
  if (dist.kind == DistributionKind::Gaussian && !(dist.sigma > 0.0 && std::isfinite(dist.mu))) {
    fail("gaussian_sigma_positive", "Gaussian sigma must be positive");
  }

  // Equal weights, so the minimum weight is c / N.
  const double min_weight = config.normalization_constant / config.n_voters;
  const double reserved = config.epsilon * (config.n_projects - 1);
  if (!(reserved < min_weight)) {
    std::ostringstream os;
    os << "epsilon * (n_projects - 1) = " << reserved << " must be below the minimum voter weight "
       << min_weight;
    fail("epsilon_feasible", os.str());
  }

  const auto& va = config.voter_attack;
  if (va.attacker_count < 1 || va.attacker_count > config.n_voters) {
    fail("attacker_count_range", "attacker_count must lie in [1, n_voters]");
  }
  if (va.quadratic_attacker_count < 2 || va.quadratic_attacker_count % 2 != 0) {
    fail("quadratic_attacker_count_even", "quadratic colluders form pairs; count must be even and >= 2");
  }
  if (config.project_attack.colluding_count < 2) {
    fail("colluding_count_min", "colluding_count must be at least 2");
  }
  return config;
}

}  // namespace retrovote
