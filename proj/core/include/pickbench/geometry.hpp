#pragma once

#include <Eigen/Geometry>
#include <numbers>

namespace pickbench {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Rigid-body pose. Orientation is kept unit-norm by every constructor path.
struct Pose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();

  Pose() = default;
  Pose(const Vec3& p, const Quat& q) : position(p), orientation(q.normalized()) {}

  Vec3 apply(const Vec3& local) const { return position + orientation * local; }
  Vec3 rotate(const Vec3& local_dir) const { return orientation * local_dir; }
  /// World point expressed in this pose's frame.
  Vec3 to_local(const Vec3& world) const {
    return orientation.conjugate() * (world - position);
  }

  bool operator==(const Pose& o) const {
    return position == o.position && orientation.coeffs() == o.orientation.coeffs();
  }
};

struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();

  bool is_finite() const { return force.allFinite() && torque.allFinite(); }
  bool operator==(const Wrench& o) const { return force == o.force && torque == o.torque; }
};

inline Wrench operator+(const Wrench& a, const Wrench& b) {
  return {a.force + b.force, a.torque + b.torque};
}

struct Sphere {
  Vec3 center;
  double radius;
};

/// Closest point parameter in [0,1] on segment ab to point p.
inline double closest_param(const Vec3& a, const Vec3& b, const Vec3& p) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 <= 0.0) return 0.0;
  double t = (p - a).dot(ab) / len2;
  return t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
}

inline double point_segment_distance(const Vec3& a, const Vec3& b, const Vec3& p) {
  return (a + closest_param(a, b, p) * (b - a) - p).norm();
}

/// Angle between the orientation's tool axis (local +z) and the world -z axis.
inline double tool_tilt(const Quat& q) {
  const double c = -(q * Vec3::UnitZ()).z();
  return std::acos(c > 1.0 ? 1.0 : (c < -1.0 ? -1.0 : c));
}

}  // namespace pickbench
