#pragma once

// Monte Carlo campaign: per iteration, sample preferences, score every
// mechanism honestly and under both attacks, and summarize the PMS
// distributions per (mechanism, scenario) cell.

#include "retrovote/types.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace retrovote {

inline constexpr std::array<MechanismKind, 3> kReportedMechanisms = {
    MechanismKind::Quadratic, MechanismKind::Mean, MechanismKind::Median};
inline constexpr std::array<Scenario, 3> kScenarios = {Scenario::Baseline, Scenario::VoterAttack,
                                                       Scenario::ProjectAttack};
inline constexpr std::size_t kCellCount = kReportedMechanisms.size() * kScenarios.size();
inline constexpr int kHistogramBins = 50;

/// Row-major cell position: mechanism major, scenario minor.
std::size_t cell_index(MechanismKind mechanism, Scenario scenario);

struct IterationRecord {
  std::uint64_t iteration = 0;
  std::array<double, kCellCount> scores{};

  double at(MechanismKind mechanism, Scenario scenario) const { return scores[cell_index(mechanism, scenario)]; }
  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

class IterationFailed : public Error {
 public:
  IterationFailed(std::uint64_t index, ErrorKind cause, const std::string& what)
      : Error(ErrorKind::IterationFailed, "iteration " + std::to_string(index) + ": " + what),
        index_(index),
        cause_(cause) {}
  std::uint64_t index() const noexcept { return index_; }
  ErrorKind cause() const noexcept { return cause_; }

 private:
  std::uint64_t index_;
  ErrorKind cause_;
};

struct Histogram {
  std::vector<double> edges;  // length bins + 1
  std::vector<std::uint64_t> counts;
};

/// Equal-width bins over [min, max]; a single distinct value gets one bin.
Histogram build_histogram(std::span<const double> values, int bins = kHistogramBins);

struct SummaryStats {
  double mean = 0, std = 0, min = 0, max = 0, p5 = 0, p50 = 0, p95 = 0;
};

/// Sample standard deviation; percentiles interpolate linearly between order
/// statistics.
SummaryStats summarize(std::span<const double> values);

struct CellReport {
  MechanismKind mechanism;
  Scenario scenario;
  std::vector<double> scores;  // ordered by iteration index
  SummaryStats stats;
  Histogram histogram;
};

struct SimulationReport {
  SimulationConfig config;
  std::array<CellReport, kCellCount> cells;
  std::uint64_t completed_iterations = 0;
  std::uint64_t failed_iterations = 0;
  std::vector<std::string> failures;
  bool imported_preferences = false;
  double runtime_seconds = 0.0;

  const CellReport& cell(MechanismKind mechanism, Scenario scenario) const {
    return cells[cell_index(mechanism, scenario)];
  }
};

struct RunOptions {
  // 0 picks the hardware concurrency.
  unsigned workers = 0;
  // Imported preferences replace per-iteration sampling.
  std::optional<PreferenceMatrix> preferences;
};

/// One iteration. Does not validate the config; errors surface as
/// IterationFailed carrying the index.
IterationRecord run_iteration(const SimulationConfig& config, std::uint64_t iteration_index,
                              const PreferenceMatrix* fixed_preferences = nullptr);

/// Validates, runs every iteration and merges in index order. Throws
/// IterationFailed when more than 1% of iterations fail.
SimulationReport run_simulation(const SimulationConfig& config, const RunOptions& options = {});

}  // namespace retrovote
