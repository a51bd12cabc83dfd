#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "pickbench/gripper.hpp"
#include "pickbench/items.hpp"

namespace pickbench {

enum class ObjectType { Lime, Pickle };
enum class Density { SparseSingle, Full };

std::string_view to_string(ObjectType t);
std::string_view to_string(Density d);

struct SceneParams {
  Crate crate;
  Punnet punnet{0.18, 0.12, 0.06, Pose(Vec3(0.0, 0.55, 0.0), Quat::Identity())};
  Pose pick_pose;  // centre of the crate floor

  Vec3 lime_semi_axes{0.025, 0.015, 0.015};
  double pickle_radius_min = 0.012;
  double pickle_radius_max = 0.018;

  double fill_fraction = 0.25;  // solid volume fraction of the crate for Full
  int settle_candidates = 16;
  int max_attempts = 400;
  int sparse_extra_min = 2;
  int sparse_extra_max = 5;
  double sparse_jitter = 0.003;
  double sparse_separation = 0.07;  // scattered items keep this far from the pick location

  double rigid_penetration_tol = 0.0005;
  double soft_overlap_fraction = 0.2;

  double clearance_tol = 0.002;
  double lateral_search_radius = 0.008;
  double lift_margin = 0.005;
  double drop_threshold = 0.003;
  double drop_jitter = 0.001;

  void validate() const;
};

struct PopulationSpec {
  ObjectType object_type = ObjectType::Pickle;
  Density density = Density::SparseSingle;
  std::uint64_t seed = 0;
};

/// Seeded scene generation. SparseSingle: one item at the pick location plus a
/// few scattered ones. Full: settle deposition up to the fill fraction.
Scene populate(const PopulationSpec& spec, const SceneParams& params);

/// Throws InvariantViolation naming the first broken scene invariant.
void validate_scene(const Scene& scene, const SceneParams& params);

/// Swept volume of one fingertip during the descent.
struct DescentCapsule {
  Vec3 start;
  Vec3 end;
  double radius = 0.0;
};

using Footprint = std::array<DescentCapsule, kFingerCount>;

Footprint descent_footprint(const GripperConfig& config, const GripperState& start,
                            const Vec3& direction, double distance);

enum class Insertion { Inserted, Blocked };

/// A finger is blocked when its capsule runs into a rigid item by more than the
/// clearance tolerance and no free lateral shift (a gap at least one finger
/// wide) exists within the search radius. Soft items never block.
std::array<Insertion, kFingerCount> insertion_check(const Footprint& footprint, const Scene& scene,
                                                    const SceneParams& params);

/// Items held after closure: centre inside the fingertip polygon (grown by the
/// fingertip radius for items a finger touches), centre above the fingertips' lower surface by the lift
/// margin or pinched by two opposing contacts, and at least two opposing
/// finger contacts on items.
std::vector<int> capture_set(const GripperConfig& config, const GripperState& closed,
                             std::span<const Contact> contacts, const Scene& scene,
                             const SceneParams& params);

/// Convex hull of the fingertips projected on the palm plane (palm frame xy).
std::vector<Vec2> fingertip_polygon(const GripperConfig& config, const GripperState& state);

/// Positive inside, negative outside.
double signed_distance_to_polygon(std::span<const Vec2> hull, const Vec2& p);

struct RetentionResult {
  std::vector<int> retained;
  std::vector<int> dropped_inside;   // fell into the punnet
  std::vector<int> dropped_outside;  // fell before the punnet approach waypoint
};

/// Walks the transport path; an item drops at the first waypoint where its
/// security margin (distance to the polygon boundary, minus the radius
/// shrinkage r * (1 - cos(tilt)), plus seeded jitter) falls below the drop
/// threshold.
RetentionResult retention_check(std::span<const int> captured, const Scene& scene,
                                const GripperConfig& config, const GripperState& closed,
                                std::span<const Pose> transport_path,
                                std::size_t punnet_waypoint, std::uint64_t seed,
                                const SceneParams& params);

}  // namespace pickbench
