#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "pickbench/config.hpp"
#include "pickbench/protocol.hpp"

namespace pickbench {

/// Waypoints and commands of one trial, in phase order.
struct PhasePlan {
  std::array<std::vector<Pose>, kPhaseCount> waypoints;
  // Nominal durations. Grasping is left at zero: it comes out of the descent.
  std::array<double, kPhaseCount> durations{};
  SpreadMode open_config = SpreadMode::Concentric;
  double open_flexion = 0.0;
  Pose approach_pose;  // tool axis tilted by (90 - angle) deg, aimed at the pick target
  Vec3 tool_axis = -Vec3::UnitZ();
  double max_descent = 0.0;
  // Grasp pose -> lift -> punnet approach, sampled for the retention check.
  std::vector<Pose> transport_legs;
  Pose punnet_pose;
};

/// Tool orientation for an approach angle measured from the table plane; the
/// tool axis tilts in the world xz plane. `yaw` turns the palm about the tool axis.
Quat approach_orientation(int approach_angle_deg, double yaw = 0.0);

/// Density used for a pick type: single picks face a sparse crate, multi picks a full one.
Density scene_density(PickType pick);

/// Gripper configuration the trial opens in. Single picks always pinch with
/// the parallel pairs.
SpreadMode effective_config(const ScenarioSpec& scenario);

PhasePlan build_plan(const ScenarioSpec& scenario, const Scene& scene, const RunConfig& config);

/// Result of the Grasping phase: impedance descent until the wrist sensor
/// fires, then finger closure.
struct GraspOutcome {
  bool blocked = false;        // a finger could not be inserted
  double descent_stop = 0.0;   // m along the tool axis where the gripper met resistance
  std::uint64_t ticks = 0;     // control ticks until the trigger
  Trigger trigger{};
  std::optional<CloseResult> closed;  // absent when blocked
  std::vector<int> captured;
  std::vector<WrenchSample> trace;
  double duration = 0.0;
};

GraspOutcome simulate_grasp(const ScenarioSpec& scenario, const Scene& scene,
                            const RunConfig& config, const PhasePlan& plan);

/// The trial's seeded scene.
Scene scenario_scene(const ScenarioSpec& scenario, const RunConfig& config);

/// Runs the five phases on `scene`. Module errors end the trial as a
/// SystemFailure; they are never raised.
TrialRecord run_trial_on_scene(const ScenarioSpec& scenario, const Scene& scene,
                               const RunConfig& config);
TrialRecord run_trial(const ScenarioSpec& scenario, const RunConfig& config);

/// Every cell of config.matrix in enumeration order, on config.jobs workers.
std::vector<TrialRecord> run_matrix(const RunConfig& config);

}  // namespace pickbench
