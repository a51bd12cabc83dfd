#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pickbench/protocol.hpp"

namespace pickbench {

/// One row per trial. Absent phases are empty fields; numbers use
/// csv::number. Wrench traces go to the JSON form only.
void write_trials_csv(std::ostream& os, std::span<const TrialRecord> records);

/// Throws SchemaError (with the line number) on malformed rows or rows that
/// break a record invariant.
std::vector<TrialRecord> read_trials_csv(std::istream& is);

nlohmann::json scenario_to_json(const ScenarioSpec& s);
ScenarioSpec scenario_from_json(const nlohmann::json& j);

nlohmann::json trials_to_json(std::span<const TrialRecord> records);
std::vector<TrialRecord> trials_from_json(const nlohmann::json& j);

}  // namespace pickbench
