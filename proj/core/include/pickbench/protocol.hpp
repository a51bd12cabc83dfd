#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pickbench/scene.hpp"
#include "pickbench/sensing.hpp"

namespace pickbench {

enum class PickType { Single, Multi };
enum class SpreadMode { Parallel, Concentric };
enum class Outcome { Success, GraspFailure, DropFailure, SystemFailure };
enum class Phase { Initialisation, Approach, Grasping, Transport, Placement };

constexpr int kPhaseCount = 5;
constexpr std::array<Phase, kPhaseCount> kPhases{Phase::Initialisation, Phase::Approach,
                                                 Phase::Grasping, Phase::Transport,
                                                 Phase::Placement};

std::string_view to_string(PickType p);
std::string_view to_string(SpreadMode m);
std::string_view to_string(Outcome o);
std::string_view to_string(Phase p);

ObjectType parse_object(std::string_view s);
PickType parse_pick(std::string_view s);
SpreadMode parse_spread(std::string_view s);
Outcome parse_outcome(std::string_view s);

/// One cell of the factorial plus its repetition and derived seed.
struct ScenarioSpec {
  ObjectType object_type = ObjectType::Pickle;
  PickType pick_type = PickType::Single;
  int approach_angle_deg = 90;
  SpreadMode gripper_config = SpreadMode::Concentric;
  int repetition = 1;
  std::uint64_t seed = 0;

  bool operator==(const ScenarioSpec&) const = default;
};

/// Factor levels of the experiment matrix.
struct MatrixSpec {
  std::vector<ObjectType> objects{ObjectType::Lime, ObjectType::Pickle};
  std::vector<PickType> picks{PickType::Single, PickType::Multi};
  std::vector<int> angles_deg{60, 75, 90};
  std::vector<SpreadMode> configs{SpreadMode::Parallel, SpreadMode::Concentric};
  int repetitions = 5;

  std::size_t size() const {
    return objects.size() * picks.size() * angles_deg.size() * configs.size() *
           static_cast<std::size_t>(repetitions);
  }
  void validate() const;
};

/// Seed of a scenario cell; independent of which other cells are run.
std::uint64_t scenario_seed(std::uint64_t master_seed, const ScenarioSpec& s);

/// Cells in stable order: object, pick, angle, config, repetition.
std::vector<ScenarioSpec> enumerate(const MatrixSpec& matrix, std::uint64_t master_seed);

struct TrialRecord {
  ScenarioSpec scenario;
  std::array<std::optional<double>, kPhaseCount> phase_durations{};
  Outcome outcome = Outcome::SystemFailure;
  int items_captured = 0;
  int items_placed = 0;
  std::string note;  // trigger kind, or the error behind a SystemFailure
  std::vector<WrenchSample> wrench_trace;

  /// Sum of the recorded phases: the trial's active time.
  double active_time() const;
  void validate() const;
  bool operator==(const TrialRecord&) const;
};

}  // namespace pickbench
