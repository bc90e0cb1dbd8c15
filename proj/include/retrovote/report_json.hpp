#pragma once

// JSON documents for simulate requests and reports (schema version "1").

#include "retrovote/engine.hpp"
#include "retrovote/types.hpp"

#include "json.hpp"

namespace retrovote {

inline constexpr const char* kSchemaVersion = "1";

nlohmann::json config_to_json(const SimulationConfig& config);

/// Missing fields take the defaults of SimulationConfig; unknown fields and
/// wrongly typed values raise ParseError. Does not validate invariants.
SimulationConfig config_from_json(const nlohmann::json& doc);

/// Per-iteration scores are included only when `include_scores` is set.
nlohmann::json report_to_json(const SimulationReport& report, bool include_scores = false);
SimulationReport report_from_json(const nlohmann::json& doc);

}  // namespace retrovote
