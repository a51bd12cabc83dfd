#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "pickbench/arm.hpp"
#include "pickbench/gripper.hpp"
#include "pickbench/protocol.hpp"
#include "pickbench/scene.hpp"
#include "pickbench/sensing.hpp"

namespace pickbench {

/// Durations, speeds and waypoints of the five-phase protocol.
struct ProtocolParams {
  double init_move_duration = 5.0;
  double init_overhead = 0.12;  // module loading
  double approach_duration = 10.0;
  double approach_overhead = 0.16;
  double lift_duration = 10.0;
  double transfer_duration = 10.0;
  double transport_overhead = 0.12;
  double descent_speed = 0.05;    // m/s along the tool axis
  double approach_height = 0.375;  // approach pose distance above the pick target
  double max_descent = 0.5;
  double tool_yaw = deg2rad(45.0);  // palm rotation about the tool axis
  double dt = 0.01;
  Vec3 home_position{0.45, 0.0, 0.45};
  Vec3 start_position{0.0, 0.30, 0.40};  // common starting point
  double punnet_clearance = 0.25;        // punnet approach height above the punnet floor
  int transport_samples = 10;            // retention samples per transport leg
  bool record_traces = true;

  void validate() const;
};

/// Published figures the report compares against.
struct ReferenceValues {
  std::array<double, kPhaseCount> phase_means_s{5.12, 10.37, 5.80, 20.12, 0.21};
  double phase_total_s = 41.68;
  double human_uph_ratio = 1.70;
};

struct RunConfig {
  GripperConfig gripper;
  ImpedanceParams impedance;
  DetectionThresholds thresholds;
  SensorModel sensor;
  SceneParams scene;
  ProtocolParams protocol;
  MatrixSpec matrix;
  ReferenceValues reference;
  std::uint64_t master_seed = 2024;
  int jobs = 1;
  std::string output_dir = "out";

  /// Runs every module's validation; throws ConfigError wrapping the cause.
  void validate() const;
};

/// Parses a config document. Unknown keys and malformed values raise
/// ConfigError; missing keys keep their defaults.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace pickbench
