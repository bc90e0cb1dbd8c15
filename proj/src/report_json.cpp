#include "retrovote/report_json.hpp"

#include <initializer_list>
#include <string>

namespace retrovote {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorKind::ParseError, where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool found = false;
    for (auto k : known) found = found || k == key;
    if (!found) throw Error(ErrorKind::ParseError, "unknown field '" + where + "." + key + "'");
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) throw Error(ErrorKind::ParseError, "");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw Error(ErrorKind::ParseError, "");
    }
    out = it->get<T>();
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, "field '" + where + "." + key + "' has the wrong type");
  }
}

template <typename Enum, typename Parse>
void read_enum(const json& obj, const char* key, Enum& out, Parse parse, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_string()) throw Error(ErrorKind::ParseError, "field '" + where + "." + key + "' must be a string");
  out = parse(it->get<std::string>());
}

json stats_to_json(const SummaryStats& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"min", s.min}, {"max", s.max},
          {"p5", s.p5},     {"p50", s.p50}, {"p95", s.p95}};
}

SummaryStats stats_from_json(const json& j) {
  SummaryStats s;
  s.mean = j.at("mean").get<double>();
  s.std = j.at("std").get<double>();
  s.min = j.at("min").get<double>();
  s.max = j.at("max").get<double>();
  s.p5 = j.at("p5").get<double>();
  s.p50 = j.at("p50").get<double>();
  s.p95 = j.at("p95").get<double>();
  return s;
}

}  // namespace

json config_to_json(const SimulationConfig& c) {
  return {
      {"n_voters", c.n_voters},
      {"n_projects", c.n_projects},
      {"total_tokens", c.total_tokens},
      {"iterations", c.iterations},
      {"seed", c.seed},
      {"distribution",
       {{"kind", to_string(c.distribution.kind)},
        {"alpha", c.distribution.alpha},
        {"variant", to_string(c.distribution.variant)},
        {"mu", c.distribution.mu},
        {"sigma", c.distribution.sigma}}},
      {"epsilon", c.epsilon},
      {"normalization_constant", c.normalization_constant},
      {"voter_attack",
       {{"attacker_count", c.voter_attack.attacker_count},
        {"quadratic_attacker_count", c.voter_attack.quadratic_attacker_count}}},
      {"project_attack",
       {{"colluding_count", c.project_attack.colluding_count},
        {"selection", to_string(c.project_attack.selection)},
        {"budget_mode", to_string(c.project_attack.budget_mode)}}},
  };
}

SimulationConfig config_from_json(const json& doc) {
  SimulationConfig c;
  reject_unknown(doc,
                 {"n_voters", "n_projects", "total_tokens", "iterations", "seed", "distribution", "epsilon",
                  "normalization_constant", "voter_attack", "project_attack"},
                 "config");
  read_field(doc, "n_voters", c.n_voters, "config");
  read_field(doc, "n_projects", c.n_projects, "config");
  read_field(doc, "total_tokens", c.total_tokens, "config");
  read_field(doc, "iterations", c.iterations, "config");
  if (auto it = doc.find("seed"); it != doc.end() && !it->is_number_unsigned()) {
    throw Error(ErrorKind::ParseError, "field 'config.seed' must be a non-negative integer");
  }
  read_field(doc, "seed", c.seed, "config");
  read_field(doc, "epsilon", c.epsilon, "config");
  read_field(doc, "normalization_constant", c.normalization_constant, "config");

  if (auto it = doc.find("distribution"); it != doc.end()) {
    reject_unknown(*it, {"kind", "alpha", "variant", "mu", "sigma"}, "distribution");
    read_enum(*it, "kind", c.distribution.kind, parse_distribution_kind, "distribution");
    read_field(*it, "alpha", c.distribution.alpha, "distribution");
    read_enum(*it, "variant", c.distribution.variant, parse_pareto_variant, "distribution");
    read_field(*it, "mu", c.distribution.mu, "distribution");
    read_field(*it, "sigma", c.distribution.sigma, "distribution");
  }
  if (auto it = doc.find("voter_attack"); it != doc.end()) {
    reject_unknown(*it, {"attacker_count", "quadratic_attacker_count"}, "voter_attack");
    read_field(*it, "attacker_count", c.voter_attack.attacker_count, "voter_attack");
    read_field(*it, "quadratic_attacker_count", c.voter_attack.quadratic_attacker_count, "voter_attack");
  }
  if (auto it = doc.find("project_attack"); it != doc.end()) {
    reject_unknown(*it, {"colluding_count", "selection", "budget_mode"}, "project_attack");
    read_field(*it, "colluding_count", c.project_attack.colluding_count, "project_attack");
    read_enum(*it, "selection", c.project_attack.selection, parse_selection, "project_attack");
    read_enum(*it, "budget_mode", c.project_attack.budget_mode, parse_budget_mode, "project_attack");
  }
  return c;
}

json report_to_json(const SimulationReport& report, bool include_scores) {
  json cells = json::array();
  for (const auto& cell : report.cells) {
    json c = {
        {"mechanism", to_string(cell.mechanism)},
        {"scenario", to_string(cell.scenario)},
        {"stats", stats_to_json(cell.stats)},
        {"histogram", {{"edges", cell.histogram.edges}, {"counts", cell.histogram.counts}}},
    };
    if (include_scores) c["scores"] = cell.scores;
    cells.push_back(std::move(c));
  }
  return {
      {"schema_version", kSchemaVersion},
      {"config", config_to_json(report.config)},
      {"metadata",
       {{"pareto_variant", to_string(report.config.distribution.variant)},
        {"pareto_scale", 1.0},
        {"budget_mode", to_string(report.config.project_attack.budget_mode)},
        {"baseline_reference", "control_sum"},
        {"imported_preferences", report.imported_preferences},
        {"histogram_bins", kHistogramBins}}},
      {"completed_iterations", report.completed_iterations},
      {"failed_iterations", report.failed_iterations},
      {"failures", report.failures},
      {"runtime_seconds", report.runtime_seconds},
      {"cells", std::move(cells)},
  };
}

SimulationReport report_from_json(const json& doc) {
  try {
    if (doc.at("schema_version").get<std::string>() != kSchemaVersion) {
      throw Error(ErrorKind::ParseError, "unsupported schema_version");
    }
    SimulationReport r;
    r.config = config_from_json(doc.at("config"));
    r.completed_iterations = doc.at("completed_iterations").get<std::uint64_t>();
    r.failed_iterations = doc.at("failed_iterations").get<std::uint64_t>();
    r.failures = doc.at("failures").get<std::vector<std::string>>();
    r.runtime_seconds = doc.at("runtime_seconds").get<double>();
    r.imported_preferences = doc.at("metadata").at("imported_preferences").get<bool>();
    const auto& cells = doc.at("cells");
    if (!cells.is_array() || cells.size() != kCellCount) {
      throw Error(ErrorKind::ParseError, "report must contain " + std::to_string(kCellCount) + " cells");
    }
    for (const auto& c : cells) {
      const auto mechanism = parse_mechanism(c.at("mechanism").get<std::string>());
      const auto scenario = parse_scenario(c.at("scenario").get<std::string>());
      CellReport& cell = r.cells[cell_index(mechanism, scenario)];
      cell.mechanism = mechanism;
      cell.scenario = scenario;
      cell.stats = stats_from_json(c.at("stats"));
      cell.histogram.edges = c.at("histogram").at("edges").get<std::vector<double>>();
      cell.histogram.counts = c.at("histogram").at("counts").get<std::vector<std::uint64_t>>();
      if (auto it = c.find("scores"); it != c.end()) cell.scores = it->get<std::vector<double>>();
    }
    return r;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("malformed report: ") + e.what());
  }
}

}  // namespace retrovote
