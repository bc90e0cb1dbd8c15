#include "retrovote/attacks.hpp"

#include "retrovote/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace retrovote {

namespace {

void check_voter(const PreferenceMatrix& m, Eigen::Index v) {
  if (v < 0 || v >= m.n_voters()) {
    throw Error(ErrorKind::DimensionMismatch, "voter index " + std::to_string(v) + " out of range");
  }
}

void check_dims(const PreferenceMatrix& m, const WeightVector& w) {
  if (m.n_voters() != w.size()) {
    throw Error(ErrorKind::DimensionMismatch, "preference rows differ from weight count");
  }
}

// Second-ranked project of `voter` once `excluded` is removed.
Eigen::Index top_project_excluding(const PreferenceMatrix& m, Eigen::Index voter, Eigen::Index excluded) {
  Eigen::Index best = -1;
  for (Eigen::Index p = 0; p < m.n_projects(); ++p) {
    if (p == excluded) continue;
    if (best < 0 || m(voter, p) > m(voter, best)) best = p;
  }
  return best;
}

PreferenceMatrix rewrap(const PreferenceMatrix& original, Matrix out, bool exempt = false) {
  if (exempt || original.is_budget_exempt()) return PreferenceMatrix::budget_exempt(std::move(out));
  return PreferenceMatrix(std::move(out));
}

// Row with `share` on each target and `rest` everywhere else.
void write_row(Matrix& out, Eigen::Index voter, std::span<const Eigen::Index> targets, double share,
               double rest) {
  out.row(voter).setConstant(rest);
  for (auto p : targets) out(voter, p) = share;
}

}  // namespace

Eigen::Index top_project(const PreferenceMatrix& m, Eigen::Index voter) {
  check_voter(m, voter);
  Eigen::Index best = 0;
  // maxCoeff returns the first maximal index, which is the lower-index tie break.
  m.entries().row(voter).maxCoeff(&best);
  return best;
}

AttackSpec select_attack(const SimulationConfig& config, const PreferenceMatrix& m, MechanismKind mechanism,
                         AttackKind kind, Rng* rng) {
  AttackSpec spec;
  spec.kind = kind;
  const Eigen::Index n = m.n_voters();
  const Eigen::Index p_count = m.n_projects();

  if (kind == AttackKind::VoterAttack) {
    const int count = mechanism == MechanismKind::Quadratic ? config.voter_attack.quadratic_attacker_count
                                                            : config.voter_attack.attacker_count;
    if (count < 0) throw Error(ErrorKind::InvariantViolation, "negative attacker count");
    if (mechanism == MechanismKind::Quadratic && count % 2 != 0) {
      throw Error(ErrorKind::TooFewColluders, "quadratic colluders must come in pairs");
    }
    if (count > n) {
      throw Error(ErrorKind::NotEnoughVoters, "attack needs " + std::to_string(count) + " voters, round has " +
                                                  std::to_string(n));
    }
    spec.attacker_voters.resize(static_cast<std::size_t>(count));
    std::iota(spec.attacker_voters.begin(), spec.attacker_voters.end(), Eigen::Index{0});
    return spec;
  }

  if (kind == AttackKind::ProjectAttack) {
    const int count = config.project_attack.colluding_count;
    if (count < 2) throw Error(ErrorKind::TooFewColluders, "project collusion needs at least 2 projects");
    if (count > p_count) {
      throw Error(ErrorKind::NotEnoughProjects, "attack needs " + std::to_string(count) +
                                                    " projects, round has " + std::to_string(p_count));
    }
    std::vector<Eigen::Index> tops(static_cast<std::size_t>(n));
    for (Eigen::Index v = 0; v < n; ++v) tops[static_cast<std::size_t>(v)] = top_project(m, v);

    std::vector<Eigen::Index> chosen;
    if (config.project_attack.selection == ProjectSelection::TopBySupporters) {
      std::vector<int> supporters(static_cast<std::size_t>(p_count), 0);
      for (auto t : tops) ++supporters[static_cast<std::size_t>(t)];
      std::vector<Eigen::Index> order(static_cast<std::size_t>(p_count));
      std::iota(order.begin(), order.end(), Eigen::Index{0});
      std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return supporters[static_cast<std::size_t>(a)] > supporters[static_cast<std::size_t>(b)];
      });
      chosen.assign(order.begin(), order.begin() + count);
    } else {
      if (rng == nullptr) throw Error(ErrorKind::InvariantViolation, "RandomPair selection needs an rng stream");
      std::vector<Eigen::Index> pool(static_cast<std::size_t>(p_count));
      std::iota(pool.begin(), pool.end(), Eigen::Index{0});
      // Partial Fisher-Yates.
      for (int i = 0; i < count; ++i) {
        std::uniform_int_distribution<Eigen::Index> pick(i, p_count - 1);
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(*rng))]);
      }
      chosen.assign(pool.begin(), pool.begin() + count);
    }
    std::sort(chosen.begin(), chosen.end());
    spec.colluding_projects = chosen;
    for (Eigen::Index v = 0; v < n; ++v) {
      if (std::binary_search(chosen.begin(), chosen.end(), tops[static_cast<std::size_t>(v)])) {
        spec.supporters.push_back(v);
      }
    }
  }
  return spec;
}

PreferenceMatrix apply_voter_attack(MechanismKind mechanism, const PreferenceMatrix& m, const WeightVector& w,
                                    const AttackSpec& spec, double epsilon) {
  check_dims(m, w);
  if (spec.attacker_voters.empty()) return m;
  if (spec.kind != AttackKind::VoterAttack) {
    throw Error(ErrorKind::InvariantViolation, "apply_voter_attack needs a voter attack spec");
  }
  const Eigen::Index p_count = m.n_projects();
  Matrix out = m.entries();

  if (mechanism == MechanismKind::Quadratic) {
    if (spec.attacker_voters.size() % 2 != 0) {
      throw Error(ErrorKind::TooFewColluders, "quadratic colluders must come in pairs");
    }
    for (std::size_t i = 0; i < spec.attacker_voters.size(); i += 2) {
      const auto first = spec.attacker_voters[i];
      const auto second = spec.attacker_voters[i + 1];
      check_voter(m, first);
      check_voter(m, second);
      const Eigen::Index p = top_project(m, first);
      Eigen::Index q = top_project(m, second);
      if (q == p) q = top_project_excluding(m, second, p);
      if (q < 0) {
        // Single-project round: nothing to split.
        const Eigen::Index only[] = {p};
        write_row(out, first, only, 1.0, 0.0);
        write_row(out, second, only, 1.0, 0.0);
        continue;
      }
      const Eigen::Index pair[] = {p, q};
      write_row(out, first, pair, 0.5, 0.0);
      write_row(out, second, pair, 0.5, 0.0);
    }
    return rewrap(m, std::move(out));
  }

  const double reserved = epsilon * static_cast<double>(p_count - 1);
  for (auto v : spec.attacker_voters) {
    check_voter(m, v);
    const double weight = w[v];
    if (!(reserved < weight)) {
      throw Error(ErrorKind::InfeasibleEpsilon, "epsilon * (P - 1) exceeds attacker " + std::to_string(v) +
                                                    "'s weight");
    }
    const Eigen::Index target[] = {top_project(m, v)};
    write_row(out, v, target, (weight - reserved) / weight, epsilon / weight);
  }
  return rewrap(m, std::move(out));
}

PreferenceMatrix apply_project_attack(MechanismKind mechanism, const PreferenceMatrix& m, const WeightVector& w,
                                      const AttackSpec& spec, double epsilon, BudgetMode mode) {
  check_dims(m, w);
  if (spec.kind == AttackKind::None) return m;
  if (spec.kind != AttackKind::ProjectAttack) {
    throw Error(ErrorKind::InvariantViolation, "apply_project_attack needs a project attack spec");
  }
  const auto& group = spec.colluding_projects;
  if (group.size() < 2) throw Error(ErrorKind::TooFewColluders, "project collusion needs at least 2 projects");
  for (auto p : group) {
    if (p < 0 || p >= m.n_projects()) throw Error(ErrorKind::DimensionMismatch, "colluding project out of range");
  }
  const auto group_size = static_cast<double>(group.size());
  const auto p_count = static_cast<double>(m.n_projects());
  Matrix out = m.entries();

  if (mechanism == MechanismKind::Quadratic) {
    for (auto v : spec.supporters) {
      check_voter(m, v);
      write_row(out, v, group, 1.0 / group_size, 0.0);
    }
    return rewrap(m, std::move(out));
  }

  const bool literal = mode == BudgetMode::Literal;
  const double reserved = epsilon * (literal ? p_count - 1.0 : p_count - group_size);
  for (auto v : spec.supporters) {
    check_voter(m, v);
    const double weight = w[v];
    if (!(reserved < weight)) {
      throw Error(ErrorKind::InfeasibleEpsilon, "epsilon reservation exceeds supporter " + std::to_string(v) +
                                                    "'s weight");
    }
    const double share = literal ? (weight - reserved) / weight : (weight - reserved) / (group_size * weight);
    write_row(out, v, group, share, epsilon / weight);
  }
  return rewrap(m, std::move(out), literal);
}

// ---------------------------------------------------------------------------

CollusionOutcome quadratic_collusion_oracle(double tokens) {
  if (!(tokens > 0.0)) throw Error(ErrorKind::InvariantViolation, "tokens must be positive");
  const double honest = std::sqrt(tokens);
  const double collusion = 2.0 * std::sqrt(tokens / 2.0);
  return {honest, collusion, collusion / honest};
}

SplitSearch quadratic_split_grid_search(double tokens, int steps) {
  if (!(tokens > 0.0) || steps < 1) throw Error(ErrorKind::InvariantViolation, "need tokens > 0 and steps >= 1");
  SplitSearch best{0.0, -1.0};
  for (int i = 0; i <= steps; ++i) {
    const double x = tokens * static_cast<double>(i) / static_cast<double>(steps);
    const double u = std::sqrt(x) + std::sqrt(std::max(0.0, tokens - x));
    if (u > best.best_utility) best = {x, u};
  }
  return best;
}

double mean_phantom_ratio(int n, int k) {
  if (n < 1 || k < 0) throw Error(ErrorKind::InvariantViolation, "need n >= 1 and k >= 0");
  return static_cast<double>(n) / static_cast<double>(n + k);
}

double mean_phantom_empirical(std::span<const double> allocs, int k, double epsilon) {
  if (allocs.empty() || k < 0 || !(epsilon > 0.0)) {
    throw Error(ErrorKind::InvariantViolation, "need non-empty allocations, k >= 0 and epsilon > 0");
  }
  const double total = std::accumulate(allocs.begin(), allocs.end(), 0.0) + k * epsilon;
  return total / static_cast<double>(allocs.size() + static_cast<std::size_t>(k));
}

PhantomOracleInput::PhantomOracleInput(std::vector<double> nonzero_allocations, int k)
    : allocs_(std::move(nonzero_allocations)), k_(k) {
  if (allocs_.empty()) throw Error(ErrorKind::EmptyMatrix, "phantom oracle needs allocations");
  if (k_ < 0) throw Error(ErrorKind::InvariantViolation, "adversary count must be non-negative");
  for (double a : allocs_) {
    if (!(a > 0.0)) throw Error(ErrorKind::InvariantViolation, "phantom oracle allocations must be positive");
  }
  std::sort(allocs_.begin(), allocs_.end());
}

PhantomBound median_phantom_bound(const PhantomOracleInput& input) {
  const auto& a = input.allocations();
  const int n = static_cast<int>(a.size());
  std::vector<double> scratch = a;
  const double median = median_in_place(scratch);
  const int m = static_cast<int>(std::upper_bound(a.begin(), a.end(), median) - a.begin());
  int index = m - (input.k() + 1) / 2 + 1;
  bool saturated = false;
  if (index < 1) {
    index = 1;
    saturated = true;
  }
  // k = 0 with every allocation at or below the median (n = 1, or ties).
  index = std::min(index, n);
  return {a[static_cast<std::size_t>(index - 1)], index, m, saturated};
}

double median_phantom_empirical(std::span<const double> allocs, int k, double epsilon) {
  if (allocs.empty() || k < 0) throw Error(ErrorKind::InvariantViolation, "need allocations and k >= 0");
  std::vector<double> extended(allocs.begin(), allocs.end());
  if (k > 0 && !(epsilon < *std::min_element(extended.begin(), extended.end()))) {
    throw Error(ErrorKind::InvariantViolation, "epsilon must be below every honest allocation");
  }
  extended.insert(extended.end(), static_cast<std::size_t>(k), epsilon);
  return median_in_place(extended);
}

}  // namespace retrovote
