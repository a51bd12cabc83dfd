#include "pickbench/arm.hpp"

#include <cmath>

#include "pickbench/error.hpp"

namespace pickbench {

void ImpedanceParams::validate() const {
  if (!(stiffness_translational > 0.0) || !(stiffness_rotational > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "stiffness values must be positive");
  }
  if (!(damping_ratio >= 0.0)) throw Error(ErrorCode::InvalidArgument, "damping_ratio must be >= 0");
  if (!(virtual_mass > 0.0)) throw Error(ErrorCode::InvalidArgument, "virtual_mass must be > 0");
}

Pose interpolate_pose(const Pose& start, const Pose& end, double duration, double t) {
  if (!(duration > 0.0)) throw Error(ErrorCode::OutOfRange, "duration must be positive");
  if (!(t >= 0.0 && t <= duration)) throw Error(ErrorCode::OutOfRange, "t outside [0, duration]");
  if (t == 0.0) return start;
  if (t == duration) return end;
  const double s = t / duration;
  Pose out;
  out.position = start.position + s * (end.position - start.position);
  out.orientation = start.orientation.slerp(s, end.orientation).normalized();
  return out;
}

Vec3 orientation_error(const Quat& to, const Quat& from) {
  Quat q = to * from.conjugate();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const double vn = q.vec().norm();
  if (vn <= 0.0) return Vec3::Zero();
  const double angle = 2.0 * std::atan2(vn, q.w());
  return q.vec() / vn * angle;
}

Wrench impedance_wrench(const ImpedanceParams& params, const Pose& desired, const Pose& actual) {
  Wrench w;
  w.force = params.stiffness_translational * (desired.position - actual.position);
  w.torque = params.stiffness_rotational *
             orientation_error(desired.orientation, actual.orientation);
  return w;
}

ArmState step(const ArmState& state, const ImpedanceParams& params,
              const std::optional<BlockingConstraint>& obstruction, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  ArmState next = state;
  next.time = state.time + dt;
  next.actual_pose = state.desired_pose;
  if (obstruction) {
    const double gap = obstruction->normal.dot(next.actual_pose.position) - obstruction->offset;
    if (gap < 0.0) next.actual_pose.position -= gap * obstruction->normal;
  }
  next.external_wrench = impedance_wrench(params, next.desired_pose, next.actual_pose);
  return next;
}

}  // namespace pickbench
