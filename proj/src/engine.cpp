#include "retrovote/engine.hpp"

#include "retrovote/attacks.hpp"
#include "retrovote/mechanisms.hpp"
#include "retrovote/metrics.hpp"
#include "retrovote/prefgen.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

namespace retrovote {

std::size_t cell_index(MechanismKind mechanism, Scenario scenario) {
  std::size_t row = 0;
  switch (mechanism) {
    case MechanismKind::Quadratic: row = 0; break;
    case MechanismKind::Mean: row = 1; break;
    case MechanismKind::Median: row = 2; break;
    case MechanismKind::ControlSum:
      throw Error(ErrorKind::InvariantViolation, "control sum has no report cells");
  }
  return row * kScenarios.size() + static_cast<std::size_t>(scenario);
}

Histogram build_histogram(std::span<const double> values, int bins) {
  Histogram h;
  if (values.empty()) return h;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) {
    h.edges = {lo, hi};
    h.counts = {values.size()};
    return h;
  }
  const double width = (hi - lo) / bins;
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i < bins; ++i) h.edges[static_cast<std::size_t>(i)] = lo + width * i;
  h.edges.back() = hi;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    auto bin = static_cast<int>((v - lo) / width);
    bin = std::clamp(bin, 0, bins - 1);
    ++h.counts[static_cast<std::size_t>(bin)];
  }
  return h;
}

SummaryStats summarize(std::span<const double> values) {
  SummaryStats s;
  if (values.empty()) return s;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(n - 1));
  }
  s.min = sorted.front();
  s.max = sorted.back();
  auto percentile = [&](double q) {
    const double pos = q * static_cast<double>(n - 1);
    const auto below = static_cast<std::size_t>(std::floor(pos));
    const auto above = std::min(below + 1, n - 1);
    const double frac = pos - static_cast<double>(below);
    return sorted[below] + (sorted[above] - sorted[below]) * frac;
  };
  s.p5 = percentile(0.05);
  s.p50 = percentile(0.50);
  s.p95 = percentile(0.95);
  return s;
}

IterationRecord run_iteration(const SimulationConfig& config, std::uint64_t iteration_index,
                              const PreferenceMatrix* fixed_preferences) {
  try {
    Rng rng = iteration_stream(config.seed, iteration_index);
    const PreferenceMatrix m = fixed_preferences != nullptr
                                   ? *fixed_preferences
                                   : sample_preference_matrix(config.n_voters, config.n_projects,
                                                              config.distribution, rng);
    const WeightVector w = build_weight_vector(m.n_voters(), config.normalization_constant);
    const AllocationMatrix honest = effective_allocations(m, w);
    const MechanismScores control = aggregate(MechanismKind::ControlSum, honest);

    // One colluding group per iteration so every mechanism faces the same coalition.
    const AttackSpec project_spec =
        select_attack(config, m, MechanismKind::ControlSum, AttackKind::ProjectAttack, &rng);

    IterationRecord record;
    record.iteration = iteration_index;
    for (auto mechanism : kReportedMechanisms) {
      const MechanismScores baseline = aggregate(mechanism, honest);
      record.scores[cell_index(mechanism, Scenario::Baseline)] = pms(control, baseline);

      const AttackSpec voter_spec = select_attack(config, m, mechanism, AttackKind::VoterAttack);
      const PreferenceMatrix voter_attacked = apply_voter_attack(mechanism, m, w, voter_spec, config.epsilon);
      record.scores[cell_index(mechanism, Scenario::VoterAttack)] =
          pms(baseline, aggregate(mechanism, effective_allocations(voter_attacked, w)));

      const PreferenceMatrix project_attacked = apply_project_attack(
          mechanism, m, w, project_spec, config.epsilon, config.project_attack.budget_mode);
      record.scores[cell_index(mechanism, Scenario::ProjectAttack)] =
          pms(baseline, aggregate(mechanism, effective_allocations(project_attacked, w)));
    }
    return record;
  } catch (const IterationFailed&) {
    throw;
  } catch (const Error& e) {
    throw IterationFailed(iteration_index, e.kind(), e.what());
  }
}

SimulationReport run_simulation(const SimulationConfig& requested, const RunOptions& options) {
  SimulationConfig config = requested;
  if (options.preferences) {
    config.n_voters = static_cast<int>(options.preferences->n_voters());
    config.n_projects = static_cast<int>(options.preferences->n_projects());
  }
  config = validate_config(config);

  const auto started = std::chrono::steady_clock::now();
  const auto total = static_cast<std::size_t>(config.iterations);
  std::vector<std::optional<IterationRecord>> records(total);
  std::vector<std::string> errors(total);

  unsigned workers = options.workers != 0 ? options.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, total));

  const PreferenceMatrix* fixed = options.preferences ? &*options.preferences : nullptr;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      try {
        records[i] = run_iteration(config, i, fixed);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
  }

  SimulationReport report;
  report.config = config;
  report.imported_preferences = fixed != nullptr;
  for (std::size_t i = 0; i < total; ++i) {
    if (records[i]) {
      ++report.completed_iterations;
    } else {
      ++report.failed_iterations;
      report.failures.push_back(errors[i]);
    }
  }
  if (report.failed_iterations * 100 > total) {
    throw Error(ErrorKind::IterationFailed, std::to_string(report.failed_iterations) + " of " +
                                                std::to_string(total) +
                                                " iterations failed; first: " + report.failures.front());
  }

  for (auto mechanism : kReportedMechanisms) {
    for (auto scenario : kScenarios) {
      const auto idx = cell_index(mechanism, scenario);
      CellReport& cell = report.cells[idx];
      cell.mechanism = mechanism;
      cell.scenario = scenario;
      cell.scores.reserve(report.completed_iterations);
      for (const auto& r : records) {
        if (r) cell.scores.push_back(r->scores[idx]);
      }
      cell.stats = summarize(cell.scores);
      cell.histogram = build_histogram(cell.scores);
    }
  }
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace retrovote
