#include "retrovote/attacks.hpp"
#include "retrovote/mechanisms.hpp"

#include "doctest.h"
#include "test_helpers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace retrovote;

namespace {

// Brute-force oracles kept apart from the library's median/mean helpers.
double brute_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double brute_phantom_median(const std::vector<double>& allocs, int k, double eps) {
  std::vector<double> v = allocs;
  for (int i = 0; i < k; ++i) v.push_back(eps);
  return brute_median(v);
}

// One voter per row, all-in on `top[v]`, with a small share elsewhere.
PreferenceMatrix favourites(const std::vector<Eigen::Index>& top, Eigen::Index projects) {
  Matrix m = Matrix::Constant(static_cast<Eigen::Index>(top.size()), projects, 0.01);
  for (std::size_t v = 0; v < top.size(); ++v) m(static_cast<Eigen::Index>(v), top[v]) = 1.0;
  for (Eigen::Index v = 0; v < m.rows(); ++v) m.row(v) /= m.row(v).sum();
  return PreferenceMatrix(m);
}

AttackSpec voter_spec(std::vector<Eigen::Index> attackers) {
  AttackSpec s;
  s.kind = AttackKind::VoterAttack;
  s.attacker_voters = std::move(attackers);
  return s;
}

AttackSpec project_spec(std::vector<Eigen::Index> group, std::vector<Eigen::Index> supporters) {
  AttackSpec s;
  s.kind = AttackKind::ProjectAttack;
  s.colluding_projects = std::move(group);
  s.supporters = std::move(supporters);
  return s;
}

}  // namespace

TEST_SUITE("attacks") {
  TEST_CASE("quadratic voter attack recruits the first pair") {
    std::mt19937_64 rng(1);
    const PreferenceMatrix m(testing::random_stochastic(rng, 6, 5));
    const auto spec = select_attack(SimulationConfig{}, m, MechanismKind::Quadratic, AttackKind::VoterAttack);
    CHECK(spec.kind == AttackKind::VoterAttack);
    CHECK(spec.attacker_voters == std::vector<Eigen::Index>{0, 1});
    const auto mean_spec = select_attack(SimulationConfig{}, m, MechanismKind::Mean, AttackKind::VoterAttack);
    CHECK(mean_spec.attacker_voters == std::vector<Eigen::Index>{0});
  }

  TEST_CASE("project attack picks the most supported projects") {
    std::vector<Eigen::Index> top = {7, 7, 7, 7, 7, 2, 2, 2, 2, 2};
    const auto m = favourites(top, 10);
    const auto spec = select_attack(SimulationConfig{}, m, MechanismKind::Mean, AttackKind::ProjectAttack);
    CHECK(spec.colluding_projects == std::vector<Eigen::Index>{2, 7});
    std::vector<Eigen::Index> everyone(10);
    std::iota(everyone.begin(), everyone.end(), 0);
    CHECK(spec.supporters == everyone);
  }

  TEST_CASE("supporter ties break toward lower project indices") {
    // One supporter each for projects 4, 1, 3: the pair is {1, 3}.
    const auto m = favourites({4, 1, 3}, 5);
    const auto spec = select_attack(SimulationConfig{}, m, MechanismKind::Median, AttackKind::ProjectAttack);
    CHECK(spec.colluding_projects == std::vector<Eigen::Index>{1, 3});
    CHECK(spec.supporters == std::vector<Eigen::Index>{1, 2});
  }

  TEST_CASE("random pair selection is seeded") {
    std::mt19937_64 prefs(2);
    const PreferenceMatrix m(testing::random_stochastic(prefs, 8, 20));
    SimulationConfig c;
    c.project_attack.selection = ProjectSelection::RandomPair;
    Rng a = iteration_stream(5, 1);
    Rng b = iteration_stream(5, 1);
    const auto sa = select_attack(c, m, MechanismKind::Mean, AttackKind::ProjectAttack, &a);
    const auto sb = select_attack(c, m, MechanismKind::Mean, AttackKind::ProjectAttack, &b);
    CHECK(sa.colluding_projects == sb.colluding_projects);
    CHECK(sa.colluding_projects.size() == 2);
    CHECK(sa.colluding_projects[0] != sa.colluding_projects[1]);
    CHECK_THROWS_AS(select_attack(c, m, MechanismKind::Mean, AttackKind::ProjectAttack), Error);
  }

  TEST_CASE("selection error paths") {
    const PreferenceMatrix single(Matrix::Constant(1, 3, 1.0 / 3.0));
    try {
      select_attack(SimulationConfig{}, single, MechanismKind::Quadratic, AttackKind::VoterAttack);
      FAIL("expected NotEnoughVoters");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NotEnoughVoters);
    }
    const PreferenceMatrix one_project(Matrix::Constant(3, 1, 1.0));
    try {
      select_attack(SimulationConfig{}, one_project, MechanismKind::Mean, AttackKind::ProjectAttack);
      FAIL("expected NotEnoughProjects");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NotEnoughProjects);
    }
  }

  TEST_CASE("mean voter attack concentrates on the favourite") {
    Matrix raw(1, 3);
    raw << 0.5, 0.3, 0.2;
    const PreferenceMatrix m(raw);
    const auto w = build_weight_vector(1, 1.0);
    const auto attacked = apply_voter_attack(MechanismKind::Mean, m, w, voter_spec({0}), 0.01);
    CHECK(attacked(0, 0) == doctest::Approx(0.98).epsilon(1e-12));
    CHECK(attacked(0, 1) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(attacked(0, 2) == doctest::Approx(0.01).epsilon(1e-12));
  }

  TEST_CASE("quadratic colluders split evenly across both favourites") {
    const auto m = favourites({3, 1, 0}, 4);
    const auto w = build_weight_vector(3, 30.0);
    const auto attacked = apply_voter_attack(MechanismKind::Quadratic, m, w, voter_spec({0, 1}), 0.01);
    for (Eigen::Index v : {0, 1}) {
      CHECK(attacked(v, 1) == 0.5);
      CHECK(attacked(v, 3) == 0.5);
      CHECK(attacked(v, 0) == 0.0);
      CHECK(attacked(v, 2) == 0.0);
    }
    CHECK(attacked.entries().row(2) == m.entries().row(2));

    // Effective allocation 0.5 * w_v on each target, contributing sqrt(0.5 w_v).
    const auto a = effective_allocations(attacked, w);
    CHECK(a.entries()(0, 1) == doctest::Approx(0.5 * w[0]));
  }

  TEST_CASE("colliding favourites fall back to the second colluder's runner-up") {
    Matrix raw(2, 3);
    raw << 0.6, 0.3, 0.1,
           0.5, 0.1, 0.4;
    const PreferenceMatrix m(raw);
    const auto attacked =
        apply_voter_attack(MechanismKind::Quadratic, m, build_weight_vector(2, 2.0), voter_spec({0, 1}), 0.01);
    CHECK(attacked(1, 0) == 0.5);
    CHECK(attacked(1, 2) == 0.5);
    CHECK(attacked(0, 1) == 0.0);
  }

  TEST_CASE("empty attacker set is a no-op") {
    std::mt19937_64 rng(3);
    const PreferenceMatrix m(testing::random_stochastic(rng, 4, 4));
    const auto w = build_weight_vector(4, 4.0);
    CHECK(apply_voter_attack(MechanismKind::Mean, m, w, voter_spec({}), 0.01) == m);
    CHECK(apply_voter_attack(MechanismKind::Quadratic, m, w, AttackSpec{}, 0.01) == m);
  }

  TEST_CASE("infeasible epsilon is rejected") {
    const PreferenceMatrix m(Matrix::Constant(1, 200, 1.0 / 200));
    const auto w = build_weight_vector(1, 1.0);
    try {
      apply_voter_attack(MechanismKind::Mean, m, w, voter_spec({0}), 0.01);
      FAIL("expected InfeasibleEpsilon");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InfeasibleEpsilon);
    }
  }

  TEST_CASE("quadratic project attack splits supporters across the group") {
    const auto m = favourites({0, 1, 2}, 4);
    const auto w = build_weight_vector(3, 3.0);
    const auto attacked = apply_project_attack(MechanismKind::Quadratic, m, w, project_spec({0, 1}, {0, 1}),
                                               0.01, BudgetMode::BudgetPreserving);
    CHECK(attacked(0, 0) == 0.5);
    CHECK(attacked(0, 1) == 0.5);
    CHECK(attacked(1, 2) == 0.0);
    CHECK(attacked.entries().row(2) == m.entries().row(2));
    CHECK_FALSE(attacked.is_budget_exempt());
  }

  TEST_CASE("budget preserving project attack") {
    // (1 - (4 - 2) * 0.01) / 2 = 0.49 on each colluder, 0.01 elsewhere.
    const auto m = favourites({0, 3}, 4);
    const auto w = build_weight_vector(2, 2.0);
    const auto attacked = apply_project_attack(MechanismKind::Mean, m, w, project_spec({0, 1}, {0}), 0.01,
                                               BudgetMode::BudgetPreserving);
    CHECK(attacked(0, 0) == doctest::Approx(0.49).epsilon(1e-12));
    CHECK(attacked(0, 1) == doctest::Approx(0.49).epsilon(1e-12));
    CHECK(attacked(0, 2) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(attacked(0, 3) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(attacked.entries().row(1) == m.entries().row(1));
    CHECK_FALSE(attacked.is_budget_exempt());
  }

  TEST_CASE("literal project attack overspends and is flagged") {
    const auto m = favourites({0, 3}, 4);
    const auto w = build_weight_vector(2, 2.0);
    const auto attacked = apply_project_attack(MechanismKind::Median, m, w, project_spec({0, 1}, {0}), 0.01,
                                               BudgetMode::Literal);
    CHECK(attacked.is_budget_exempt());
    // w - (P - 1) eps = 0.97 effective tokens on each colluding project.
    const auto a = effective_allocations(attacked, w);
    CHECK(a.is_budget_exempt());
    CHECK(a.entries()(0, 0) == doctest::Approx(0.97).epsilon(1e-12));
    CHECK(a.entries()(0, 1) == doctest::Approx(0.97).epsilon(1e-12));
    CHECK(a.entries()(0, 2) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(attacked.entries().row(1) == m.entries().row(1));
  }

  TEST_CASE("project attack needs two colluders") {
    const auto m = favourites({0, 1}, 3);
    try {
      apply_project_attack(MechanismKind::Mean, m, build_weight_vector(2, 2.0), project_spec({0}, {0}), 0.01,
                           BudgetMode::BudgetPreserving);
      FAIL("expected TooFewColluders");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::TooFewColluders);
    }
  }

  TEST_CASE("property: attacks keep rows stochastic and are idempotent") {
    std::mt19937_64 rng(4);
    SimulationConfig config;
    for (int trial = 0; trial < 40; ++trial) {
      const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 12);
      const Eigen::Index p = 3 + static_cast<Eigen::Index>(rng() % 20);
      const PreferenceMatrix m(testing::random_stochastic(rng, n, p));
      const auto w = build_weight_vector(n, 100.0);
      for (auto mech : {MechanismKind::Quadratic, MechanismKind::Mean, MechanismKind::Median}) {
        const auto vs = select_attack(config, m, mech, AttackKind::VoterAttack);
        const auto once = apply_voter_attack(mech, m, w, vs, 0.01);
        CHECK_FALSE(once.is_budget_exempt());
        CHECK(apply_voter_attack(mech, once, w, vs, 0.01) == once);

        const auto ps = select_attack(config, m, mech, AttackKind::ProjectAttack);
        for (auto mode : {BudgetMode::BudgetPreserving, BudgetMode::Literal}) {
          const auto p1 = apply_project_attack(mech, m, w, ps, 0.01, mode);
          const bool exempt = mode == BudgetMode::Literal && mech != MechanismKind::Quadratic;
          CHECK(p1.is_budget_exempt() == exempt);
          if (!exempt) {
            const Vector sums = p1.entries().rowwise().sum();
            CHECK((sums.array() - 1.0).abs().maxCoeff() <= 1e-9);
          }
          CHECK(apply_project_attack(mech, p1, w, ps, 0.01, mode) == p1);
        }
      }
    }
  }

  // --- oracles ---------------------------------------------------------

  TEST_CASE("quadratic collusion oracle") {
    const auto hundred = quadratic_collusion_oracle(100.0);
    CHECK(hundred.honest_utility == 10.0);
    CHECK(hundred.collusion_utility == doctest::Approx(14.142136).epsilon(1e-7));
    CHECK(hundred.gain_ratio == doctest::Approx(1.4142136).epsilon(1e-7));
    CHECK(std::abs(quadratic_collusion_oracle(1.0).gain_ratio - std::sqrt(2.0)) <= 1e-12);
    const auto two = quadratic_collusion_oracle(2.0);
    CHECK(two.collusion_utility == 2.0);
    CHECK(two.honest_utility == std::sqrt(2.0));
    CHECK_THROWS_AS(quadratic_collusion_oracle(0.0), Error);
  }

  TEST_CASE("grid search finds the even split") {
    for (double t : {1.0, 2.0, 100.0, 1e6}) {
      const auto best = quadratic_split_grid_search(t);
      CHECK(std::abs(best.best_split - t / 2.0) <= t / 1e4);
      CHECK(std::abs(best.best_utility - std::sqrt(2.0) * std::sqrt(t)) <= 1e-6);
    }
  }

  TEST_CASE("mean phantom ratio") {
    CHECK(mean_phantom_ratio(4, 1) == 0.8);
    CHECK(mean_phantom_ratio(7, 0) == 1.0);
    CHECK(mean_phantom_ratio(100, 900) == 0.1);
    CHECK_THROWS_AS(mean_phantom_ratio(0, 1), Error);
  }

  TEST_CASE("mean phantom empirical") {
    const std::vector<double> tens = {10, 10, 10, 10};
    CHECK(mean_phantom_empirical(tens, 1, 1e-9) == doctest::Approx(8.0).epsilon(1e-9));
    CHECK(mean_phantom_empirical(tens, 0, 1e-9) == 10.0);
    const std::vector<double> hundred = {100};
    CHECK(mean_phantom_empirical(hundred, 3, 1e-9) == doctest::Approx(25.0).epsilon(1e-9));
    CHECK(mean_phantom_empirical(hundred, 3, 1e-9) / 100.0 ==
          doctest::Approx(mean_phantom_ratio(1, 3)).epsilon(1e-9));
  }

  TEST_CASE("property: mean phantom empirical converges to n / (n + k)") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> alloc(0.1, 100.0);
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 1 + static_cast<int>(rng() % 50);
      const int k = static_cast<int>(rng() % 50);
      std::vector<double> a(static_cast<std::size_t>(n));
      for (auto& x : a) x = alloc(rng);
      const double eps = 1e-12;
      const double ratio = mean_phantom_empirical(a, k, eps) / mean_phantom_empirical(a, 0, eps);
      CHECK(std::abs(ratio - mean_phantom_ratio(n, k)) <= 1e-6);
    }
  }

  TEST_CASE("median phantom bound examples") {
    const auto odd = median_phantom_bound(PhantomOracleInput({10, 20, 30, 40, 50}, 2));
    CHECK(odd.median_index == 3);
    CHECK(odd.bound_index == 3);
    CHECK(odd.bound_value == 30.0);
    CHECK_FALSE(odd.saturated);
    CHECK(median_phantom_empirical(std::vector<double>{10, 20, 30, 40, 50}, 2, 1e-9) == 20.0);

    const auto even = median_phantom_bound(PhantomOracleInput({10, 20, 30, 40}, 2));
    CHECK(even.median_index == 2);
    CHECK(even.bound_value == 20.0);
    CHECK(median_phantom_empirical(std::vector<double>{10, 20, 30, 40}, 2, 1e-9) == 15.0);

    const auto none = median_phantom_bound(PhantomOracleInput({10, 20, 30, 40, 50}, 0));
    CHECK(none.bound_index == 4);
    CHECK(none.bound_value == 40.0);
    CHECK(median_phantom_empirical(std::vector<double>{10, 20, 30, 40, 50}, 0, 1e-9) == 30.0);
  }

  TEST_CASE("median phantom empirical examples") {
    CHECK(median_phantom_empirical(std::vector<double>{100, 100, 100, 100}, 1, 1e-12) == 100.0);
    CHECK(median_phantom_empirical(std::vector<double>{10, 20, 30, 40, 50}, 4, 1e-9) == 10.0);
    CHECK_THROWS_AS(median_phantom_empirical(std::vector<double>{1, 2}, 1, 5.0), Error);
  }

  TEST_CASE("median phantom bound saturates below the smallest allocation") {
    const auto b = median_phantom_bound(PhantomOracleInput({10, 20, 30}, 10));
    CHECK(b.saturated);
    CHECK(b.bound_index == 1);
    CHECK(b.bound_value == 10.0);
    CHECK(median_phantom_empirical(std::vector<double>{10, 20, 30}, 10, 1e-9) <= b.bound_value);
  }

  TEST_CASE("phantom oracle input sorts and validates") {
    const PhantomOracleInput in({3, 1, 2}, 1);
    CHECK(in.allocations() == std::vector<double>{1, 2, 3});
    CHECK_THROWS_AS(PhantomOracleInput({1, 0}, 1), Error);
    CHECK_THROWS_AS(PhantomOracleInput({}, 1), Error);
    CHECK_THROWS_AS(PhantomOracleInput({1}, -1), Error);
  }

  TEST_CASE("property: phantom median never exceeds the bound in any parity case") {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> level(1, 20);
    int covered[2][2] = {};
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = 1 + static_cast<int>(rng() % 40);
      const int k = static_cast<int>(rng() % 40);
      std::vector<double> a(static_cast<std::size_t>(n));
      // Coarse levels produce ties, which move m above n / 2.
      for (auto& x : a) x = level(rng) * 5.0;
      ++covered[n % 2][k % 2];
      const auto bound = median_phantom_bound(PhantomOracleInput(a, k));
      CHECK(brute_phantom_median(a, k, 1e-9) <= bound.bound_value + 1e-9);
    }
    for (auto& row : covered) {
      for (int c : row) CHECK(c > 0);
    }
  }
}
