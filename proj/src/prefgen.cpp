#include "retrovote/prefgen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace retrovote {

namespace {

constexpr int kMaxRowResamples = 100;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_cell(std::string_view cell, std::size_t line_no) {
  double value = 0.0;
  const auto* begin = cell.data();
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value, std::chars_format::fixed);
  if (cell.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw Error(ErrorKind::ParseError,
                "line " + std::to_string(line_no) + ": malformed cell '" + std::string(cell) + "'");
  }
  return value;
}

}  // namespace

Rng iteration_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

double sample_intensity(const DistributionSpec& dist, Rng& rng) {
  switch (dist.kind) {
    case DistributionKind::Pareto: {
      // Inverse CDF with 1 - u in (0, 1] so the draw stays finite.
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const double x = std::pow(1.0 - u, -1.0 / dist.alpha);
      return dist.variant == ParetoVariant::Lomax ? x - 1.0 : x;
    }
    case DistributionKind::Uniform:
      return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    case DistributionKind::Gaussian:
      return std::max(0.0, std::normal_distribution<double>(dist.mu, dist.sigma)(rng));
  }
  return 0.0;
}

PreferenceMatrix sample_preference_matrix(Eigen::Index n_voters, Eigen::Index n_projects,
                                          const DistributionSpec& dist, Rng& rng) {
  if (n_voters < 1 || n_projects < 1) {
    throw Error(ErrorKind::EmptyMatrix, "need at least one voter and one project");
  }
  Matrix m(n_voters, n_projects);
  for (Eigen::Index v = 0; v < n_voters; ++v) {
    double total = 0.0;
    for (int attempt = 0; attempt <= kMaxRowResamples; ++attempt) {
      for (Eigen::Index p = 0; p < n_projects; ++p) m(v, p) = sample_intensity(dist, rng);
      total = m.row(v).sum();
      if (total > 0.0) break;
    }
    if (!(total > 0.0)) {
      throw Error(ErrorKind::DegenerateRow, "voter " + std::to_string(v) + " row stayed all-zero after " +
                                                std::to_string(kMaxRowResamples) + " resamples");
    }
    m.row(v) /= total;
  }
  return PreferenceMatrix(std::move(m));
}

PreferenceTable read_preference_table(std::istream& in, std::optional<Dimensions> expected) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> ids;
  while (ids.empty() && std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    for (auto cell : split_cells(line)) ids.emplace_back(cell);
  }
  if (ids.empty()) throw Error(ErrorKind::ParseError, "missing header row of project ids");
  // Strip a UTF-8 byte order mark.
  if (ids.front().rfind("\xEF\xBB\xBF", 0) == 0) ids.front().erase(0, 3);

  const auto n_projects = static_cast<Eigen::Index>(ids.size());
  std::vector<double> values;
  Eigen::Index n_voters = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_cells(line);
    if (static_cast<Eigen::Index>(cells.size()) != n_projects) {
      throw Error(ErrorKind::DimensionMismatch, "line " + std::to_string(line_no) + " has " +
                                                    std::to_string(cells.size()) + " cells, header has " +
                                                    std::to_string(n_projects));
    }
    double row_sum = 0.0;
    for (auto cell : cells) {
      const double v = parse_cell(cell, line_no);
      if (v < 0.0) {
        throw Error(ErrorKind::NegativeEntry, "line " + std::to_string(line_no) + ": negative preference");
      }
      row_sum += v;
      values.push_back(v);
    }
    if (!(row_sum > 0.0)) {
      throw Error(ErrorKind::DegenerateRow, "line " + std::to_string(line_no) + ": all-zero row");
    }
    ++n_voters;
  }
  if (n_voters == 0) throw Error(ErrorKind::ParseError, "no voter rows");
  if (expected && (expected->n_voters != n_voters || expected->n_projects != n_projects)) {
    throw Error(ErrorKind::DimensionMismatch, "table is " + std::to_string(n_voters) + "x" +
                                                  std::to_string(n_projects) + ", expected " +
                                                  std::to_string(expected->n_voters) + "x" +
                                                  std::to_string(expected->n_projects));
  }

  Matrix m = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), n_voters, n_projects);
  const Vector sums = m.rowwise().sum();
  m = sums.cwiseInverse().asDiagonal() * m;
  return {std::move(ids), PreferenceMatrix(std::move(m))};
}

PreferenceMatrix load_preference_matrix(const std::filesystem::path& path, std::optional<Dimensions> expected) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open preference file " + path.string());
  return read_preference_table(in, expected).preferences;
}

WeightVector build_weight_vector(Eigen::Index n_voters, double normalization_constant) {
  if (n_voters < 1 || !(normalization_constant > 0.0)) {
    throw Error(ErrorKind::InvariantViolation, "weight vector needs n_voters >= 1 and c > 0");
  }
  return WeightVector(Vector::Constant(n_voters, normalization_constant / static_cast<double>(n_voters)),
                      normalization_constant);
}

}  // namespace retrovote
