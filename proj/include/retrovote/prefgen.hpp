#pragma once

#include "retrovote/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace retrovote {

using Rng = std::mt19937_64;

/// Independent generator for one Monte Carlo iteration. The stream depends only
/// on (seed, index), so iterations can run in any order on any worker.
Rng iteration_stream(std::uint64_t seed, std::uint64_t index);

/// Single draw of the raw (unnormalized) preference intensity.
double sample_intensity(const DistributionSpec& dist, Rng& rng);

/// Rows are drawn i.i.d. from `dist` and normalized to sum to 1. Gaussian draws
/// are clamped at 0; an all-zero row is resampled up to 100 times before
/// DegenerateRow is thrown.
PreferenceMatrix sample_preference_matrix(Eigen::Index n_voters, Eigen::Index n_projects,
                                          const DistributionSpec& dist, Rng& rng);

struct PreferenceTable {
  std::vector<std::string> project_ids;
  PreferenceMatrix preferences;
};

struct Dimensions {
  Eigen::Index n_voters;
  Eigen::Index n_projects;
};

/// CSV: header row of project ids, then one row of non-negative decimals per
/// voter. Rows are re-normalized to sum to 1.
PreferenceTable read_preference_table(std::istream& in,
                                      std::optional<Dimensions> expected = std::nullopt);

PreferenceMatrix load_preference_matrix(const std::filesystem::path& path,
                                        std::optional<Dimensions> expected = std::nullopt);

/// Equal-weight regime: every voter holds c / N.
WeightVector build_weight_vector(Eigen::Index n_voters, double normalization_constant);

}  // namespace retrovote
