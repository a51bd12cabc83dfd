#include "pickbench/protocol.hpp"

#include <algorithm>

#include "pickbench/error.hpp"
#include "pickbench/rng.hpp"

namespace pickbench {

std::string_view to_string(PickType p) { return p == PickType::Single ? "single" : "multi"; }
std::string_view to_string(SpreadMode m) {
  return m == SpreadMode::Parallel ? "parallel" : "concentric";
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Success: return "Success";
    case Outcome::GraspFailure: return "GraspFailure";
    case Outcome::DropFailure: return "DropFailure";
    case Outcome::SystemFailure: return "SystemFailure";
  }
  return "?";
}

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Initialisation: return "Initialisation";
    case Phase::Approach: return "Approach";
    case Phase::Grasping: return "Grasping";
    case Phase::Transport: return "Transport";
    case Phase::Placement: return "Placement";
  }
  return "?";
}

ObjectType parse_object(std::string_view s) {
  if (s == "lime") return ObjectType::Lime;
  if (s == "pickle") return ObjectType::Pickle;
  throw Error(ErrorCode::SchemaError, "unknown object type '" + std::string(s) + "'");
}

PickType parse_pick(std::string_view s) {
  if (s == "single") return PickType::Single;
  if (s == "multi") return PickType::Multi;
  throw Error(ErrorCode::SchemaError, "unknown pick type '" + std::string(s) + "'");
}

SpreadMode parse_spread(std::string_view s) {
  if (s == "parallel") return SpreadMode::Parallel;
  if (s == "concentric") return SpreadMode::Concentric;
  throw Error(ErrorCode::SchemaError, "unknown gripper configuration '" + std::string(s) + "'");
}

Outcome parse_outcome(std::string_view s) {
  for (auto o : {Outcome::Success, Outcome::GraspFailure, Outcome::DropFailure,
                 Outcome::SystemFailure}) {
    if (s == to_string(o)) return o;
  }
  throw Error(ErrorCode::SchemaError, "unknown outcome '" + std::string(s) + "'");
}

void MatrixSpec::validate() const {
  if (objects.empty() || picks.empty() || angles_deg.empty() || configs.empty()) {
    throw Error(ErrorCode::InvalidArgument, "every factor needs at least one level");
  }
  if (repetitions < 1) throw Error(ErrorCode::InvalidArgument, "repetitions must be >= 1");
  for (int a : angles_deg) {
    if (a < 60) {
      throw Error(ErrorCode::CollisionRisk,
                  "approach angles below 60 deg collide with the crate");
    }
    if (a != 60 && a != 75 && a != 90) {
      throw Error(ErrorCode::OutOfRange, "approach angle must be 60, 75 or 90 deg");
    }
  }
}

std::uint64_t scenario_seed(std::uint64_t master_seed, const ScenarioSpec& s) {
  std::uint64_t h = master_seed;
  h = mix_seed(h, static_cast<std::uint64_t>(s.object_type));
  h = mix_seed(h, static_cast<std::uint64_t>(s.pick_type));
  h = mix_seed(h, static_cast<std::uint64_t>(s.approach_angle_deg));
  h = mix_seed(h, static_cast<std::uint64_t>(s.gripper_config));
  return mix_seed(h, static_cast<std::uint64_t>(s.repetition));
}

std::vector<ScenarioSpec> enumerate(const MatrixSpec& matrix, std::uint64_t master_seed) {
  matrix.validate();
  std::vector<ScenarioSpec> out;
  out.reserve(matrix.size());
  for (auto object : matrix.objects)
    for (auto pick : matrix.picks)
      for (int angle : matrix.angles_deg)
        for (auto config : matrix.configs)
          for (int rep = 1; rep <= matrix.repetitions; ++rep) {
            ScenarioSpec s{object, pick, angle, config, rep, 0};
            s.seed = scenario_seed(master_seed, s);
            out.push_back(s);
          }
  return out;
}

double TrialRecord::active_time() const {
  double t = 0.0;
  for (const auto& d : phase_durations) t += d.value_or(0.0);
  return t;
}

void TrialRecord::validate() const {
  if (items_placed < 0 || items_captured < 0 || items_placed > items_captured) {
    throw Error(ErrorCode::InvariantViolation, "items_placed must lie in [0, items_captured]");
  }
  if (outcome == Outcome::Success && items_placed < 1) {
    throw Error(ErrorCode::InvariantViolation, "a successful trial places at least one item");
  }
  if (outcome == Outcome::GraspFailure && items_placed != 0) {
    throw Error(ErrorCode::InvariantViolation, "a grasp failure places no item");
  }
  bool gap = false;
  for (const auto& d : phase_durations) {
    if (d && *d < 0.0) throw Error(ErrorCode::InvariantViolation, "negative phase duration");
    if (d && gap) throw Error(ErrorCode::InvariantViolation, "phase recorded after a skipped phase");
    if (!d) gap = true;
  }
}

bool TrialRecord::operator==(const TrialRecord& o) const {
  if (!(scenario == o.scenario) || phase_durations != o.phase_durations || outcome != o.outcome ||
      items_captured != o.items_captured || items_placed != o.items_placed || note != o.note ||
      wrench_trace.size() != o.wrench_trace.size()) {
    return false;
  }
  for (size_t i = 0; i < wrench_trace.size(); ++i) {
    if (wrench_trace[i].time != o.wrench_trace[i].time ||
        !(wrench_trace[i].wrench == o.wrench_trace[i].wrench)) {
      return false;
    }
  }
  return true;
}

}  // namespace pickbench
