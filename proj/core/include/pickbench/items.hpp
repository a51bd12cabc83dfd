#pragma once

#include <variant>
#include <vector>

#include "pickbench/geometry.hpp"

namespace pickbench {

struct SphereShape {
  double radius = 0.0;
};

struct EllipsoidShape {
  Vec3 semi_axes = Vec3::Zero();  // x is the long axis in the item frame
};

using Shape = std::variant<SphereShape, EllipsoidShape>;

enum class Compliance { Soft, Rigid };

/// A loose produce item. Items rest with their local z axis vertical.
struct Item {
  int id = 0;
  Shape shape = SphereShape{};
  Compliance compliance = Compliance::Soft;
  Pose pose;

  double volume() const;
  double min_extent() const;
  double max_extent() const;
  /// Half height when resting on a flat floor.
  double rest_height() const;
  /// Radius of the sphere that bounds every collision sphere.
  double bounding_radius() const;
  /// Capsule-like union of spheres used by every contact predicate.
  std::vector<Sphere> collision_spheres() const;
  /// Collision spheres expressed in the item frame.
  std::vector<Sphere> local_spheres() const;

  bool operator==(const Item&) const;
};

/// Axis-aligned crate with its floor at z = 0, centered at the world origin.
struct Crate {
  double length = 0.40;
  double width = 0.30;
  double height = 0.12;

  double volume() const { return length * width * height; }
};

struct Punnet {
  double length = 0.18;
  double width = 0.12;
  double height = 0.06;
  Pose pose;  // center of the punnet floor
};

struct Scene {
  Crate crate;
  Punnet punnet;
  std::vector<Item> items;
  Pose pick_pose;

  const Item* find(int id) const;
  bool operator==(const Scene&) const;
};

}  // namespace pickbench
