#pragma once

#include <optional>

#include "pickbench/geometry.hpp"

namespace pickbench {

/// Diagonal task-space stiffness K = diag(k_t I3, k_r I3).
struct ImpedanceParams {
  double stiffness_translational = 2000.0;  // N/m
  double stiffness_rotational = 200.0;      // N m / rad
  // Kept for a dynamic plant; the quasi-static plant does not read them.
  double damping_ratio = 1.0;
  double virtual_mass = 2.0;  // kg

  void validate() const;
};

struct ArmState {
  Pose actual_pose;
  Pose desired_pose;
  double time = 0.0;
  Wrench external_wrench;
};

/// Half-space n . p >= offset on the tool position, n pointing into free space.
struct BlockingConstraint {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;
};

/// Linear position and shortest-arc slerp orientation. Endpoints are returned
/// verbatim at t == 0 and t == duration.
Pose interpolate_pose(const Pose& start, const Pose& end, double duration, double t);

/// Rotation vector (axis * angle, angle in [0, pi]) taking `from` onto `to`.
Vec3 orientation_error(const Quat& to, const Quat& from);

Wrench impedance_wrench(const ImpedanceParams& params, const Pose& desired, const Pose& actual);

/// Advances the plant by dt. `state.desired_pose` is the already-advanced
/// command; the actual pose tracks it exactly unless the constraint clamps it.
ArmState step(const ArmState& state, const ImpedanceParams& params,
              const std::optional<BlockingConstraint>& obstruction, double dt);

}  // namespace pickbench
