#include "pickbench/records_io.hpp"

#include <cerrno>
#include <cstdlib>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "pickbench/csv.hpp"
#include "pickbench/error.hpp"

namespace pickbench {

using nlohmann::json;

namespace {

const std::vector<std::string>& trial_header() {
  static const std::vector<std::string> h{
      "object",      "pick",         "angle_deg",      "config",       "repetition",
      "seed",        "initialisation_s", "approach_s", "grasping_s",   "transport_s",
      "placement_s", "outcome",      "items_captured", "items_placed", "note"};
  return h;
}

std::uint64_t to_u64(const std::string& field, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(field.c_str(), &end, 10);
  if (field.empty() || field[0] == '-' || end != field.c_str() + field.size() || errno == ERANGE) {
    throw Error(ErrorCode::SchemaError,
                "row " + std::to_string(line) + ", column 'seed': not a seed: '" + field + "'");
  }
  return v;
}

template <class Fn>
auto at_row(std::size_t line, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    const std::string msg = e.what();
    if (msg.find("row ") != std::string::npos) throw;
    throw Error(ErrorCode::SchemaError, "row " + std::to_string(line) + ": " + msg);
  }
}

}  // namespace

void write_trials_csv(std::ostream& os, std::span<const TrialRecord> records) {
  os << csv::join(trial_header()) << '\n';
  for (const auto& r : records) {
    const auto& s = r.scenario;
    std::vector<std::string> f{std::string(to_string(s.object_type)),
                               std::string(to_string(s.pick_type)),
                               std::to_string(s.approach_angle_deg),
                               std::string(to_string(s.gripper_config)),
                               std::to_string(s.repetition),
                               std::to_string(s.seed)};
    for (const auto& d : r.phase_durations) f.push_back(d ? csv::number(*d) : "");
    f.emplace_back(to_string(r.outcome));
    f.push_back(std::to_string(r.items_captured));
    f.push_back(std::to_string(r.items_placed));
    f.push_back(r.note);
    os << csv::join(f) << '\n';
  }
}

std::vector<TrialRecord> read_trials_csv(std::istream& is) {
  const auto& header = trial_header();
  const auto table = csv::read(is, header);
  std::vector<TrialRecord> out;
  out.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    const std::size_t line = table.line_numbers[i];
    TrialRecord r = at_row(line, [&] {
      TrialRecord r;
      r.scenario.object_type = parse_object(f[0]);
      r.scenario.pick_type = parse_pick(f[1]);
      r.scenario.approach_angle_deg = static_cast<int>(csv::to_int(f[2], header[2], line));
      r.scenario.gripper_config = parse_spread(f[3]);
      r.scenario.repetition = static_cast<int>(csv::to_int(f[4], header[4], line));
      r.scenario.seed = to_u64(f[5], line);
      for (int p = 0; p < kPhaseCount; ++p) {
        if (!f[6 + p].empty()) r.phase_durations[p] = csv::to_double(f[6 + p], header[6 + p], line);
      }
      r.outcome = parse_outcome(f[11]);
      r.items_captured = static_cast<int>(csv::to_int(f[12], header[12], line));
      r.items_placed = static_cast<int>(csv::to_int(f[13], header[13], line));
      r.note = f[14];
      r.validate();
      return r;
    });
    out.push_back(std::move(r));
  }
  return out;
}

json scenario_to_json(const ScenarioSpec& s) {
  return {{"object", to_string(s.object_type)},
          {"pick", to_string(s.pick_type)},
          {"angle_deg", s.approach_angle_deg},
          {"config", to_string(s.gripper_config)},
          {"repetition", s.repetition},
          {"seed", s.seed}};
}

ScenarioSpec scenario_from_json(const json& j) {
  ScenarioSpec s;
  s.object_type = parse_object(j.at("object").get<std::string>());
  s.pick_type = parse_pick(j.at("pick").get<std::string>());
  s.approach_angle_deg = j.at("angle_deg").get<int>();
  s.gripper_config = parse_spread(j.at("config").get<std::string>());
  s.repetition = j.at("repetition").get<int>();
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

json trials_to_json(std::span<const TrialRecord> records) {
  json arr = json::array();
  for (const auto& r : records) {
    const auto& s = r.scenario;
    json phases = json::array();
    for (const auto& d : r.phase_durations) phases.push_back(d ? json(*d) : json(nullptr));
    json trace = json::array();
    for (const auto& w : r.wrench_trace) {
      trace.push_back({w.time, w.wrench.force.x(), w.wrench.force.y(), w.wrench.force.z(),
                       w.wrench.torque.x(), w.wrench.torque.y(), w.wrench.torque.z()});
    }
    arr.push_back({{"scenario", scenario_to_json(s)},
                   {"phase_durations_s", phases},
                   {"outcome", to_string(r.outcome)},
                   {"items_captured", r.items_captured},
                   {"items_placed", r.items_placed},
                   {"note", r.note},
                   {"wrench_trace", trace}});
  }
  return {{"trials", arr}};
}

std::vector<TrialRecord> trials_from_json(const json& j) {
  std::vector<TrialRecord> out;
  try {
    for (const auto& t : j.at("trials")) {
      TrialRecord r;
      r.scenario = scenario_from_json(t.at("scenario"));
      const auto& phases = t.at("phase_durations_s");
      if (phases.size() != kPhaseCount) throw Error(ErrorCode::SchemaError, "expected 5 phases");
      for (int p = 0; p < kPhaseCount; ++p) {
        if (!phases[p].is_null()) r.phase_durations[p] = phases[p].get<double>();
      }
      r.outcome = parse_outcome(t.at("outcome").get<std::string>());
      r.items_captured = t.at("items_captured").get<int>();
      r.items_placed = t.at("items_placed").get<int>();
      r.note = t.at("note").get<std::string>();
      for (const auto& w : t.at("wrench_trace")) {
        WrenchSample sample;
        sample.time = w.at(0).get<double>();
        for (int k = 0; k < 3; ++k) sample.wrench.force[k] = w.at(1 + k).get<double>();
        for (int k = 0; k < 3; ++k) sample.wrench.torque[k] = w.at(4 + k).get<double>();
        r.wrench_trace.push_back(sample);
      }
      r.validate();
      out.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("trial JSON: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SchemaError) throw;
    throw Error(ErrorCode::SchemaError, std::string("trial JSON: ") + e.what());
  }
  return out;
}

}  // namespace pickbench
