#pragma once

#include <array>
#include <vector>

#include "pickbench/geometry.hpp"
#include "pickbench/items.hpp"

namespace pickbench {

constexpr int kFingerCount = 4;

/// Planar four-bar finger. The coupler is the belt: rigid in tension only.
///
/// Finger frame: origin at the rocker (phalanx) pivot, +x along the straight
/// finger, +y towards the grasp axis. The crank pivot sits ground_length
/// inwards of the rocker pivot. Fingertip is the rocker distal point pushed
/// out by tip_offset along the rocker.
struct FingerLinkage {
  double crank_length = 0.012;
  double coupler_length = 0.045;
  double rocker_length = 0.040;
  double ground_length = 0.020;
  double tip_offset = 0.010;
  double finger_width = 0.014;

  double finger_length() const { return rocker_length + tip_offset; }
  double radius() const { return 0.5 * finger_width; }
  /// Throws InvalidArgument unless every length is positive and finite, and
  /// NoClosure when the straight reference configuration cannot assemble.
  void validate() const;
};

/// Joint positions in the finger frame, in metres.
struct FingerPose {
  Vec2 crank_pivot;
  Vec2 crank_end;  // belt proximal end
  Vec2 rocker_pivot;
  Vec2 rocker_end;  // belt distal end
  Vec2 tip;
  double rocker_angle = 0.0;  // inward rotation of the phalanx, rad
};

/// Closed-form circle-intersection forward kinematics. flexion is the crank
/// rotation away from the straight-finger configuration.
FingerPose finger_fk(const FingerLinkage& linkage, double flexion);

/// | |crank_end - rocker_end| - coupler_length |
double closure_residual(const FingerLinkage& linkage, const FingerPose& pose);

/// Crank angle (absolute, finger frame) of the straight-finger configuration.
double reference_crank_angle(const FingerLinkage& linkage);

/// Checks closure and monotone phalanx motion over [flexion_min, flexion_max].
void check_flexion_range(const FingerLinkage& linkage, double flexion_min, double flexion_max);

enum class ContactMode { Rigid, Compliant };

struct FingerState {
  double flexion = 0.0;  // crank angle, rad
  double azimuth = 0.0;  // adduction angle, rad
  ContactMode mode = ContactMode::Rigid;
  // Compliant-mode distal wrap: the segment beyond wrap_arc rotates inward
  // by wrap about the belt contact point.
  double wrap = 0.0;
  double wrap_arc = 1.0;

  bool operator==(const FingerState&) const = default;
};

struct GripperConfig {
  std::array<FingerLinkage, kFingerCount> linkages{};
  double flexion_min = deg2rad(-40.0);
  double flexion_max = deg2rad(120.0);
  double flexion_open = deg2rad(-40.0);
  // Distance between the two fingers of a pair in the parallel configuration;
  // fixes the radius of the finger pivots on the palm.
  double pair_gap = 0.030;
  std::array<double, kFingerCount> parallel_azimuths{deg2rad(45.0), deg2rad(45.0),
                                                     deg2rad(225.0), deg2rad(225.0)};
  std::array<double, kFingerCount> concentric_azimuths{0.0, deg2rad(90.0), deg2rad(180.0),
                                                       deg2rad(270.0)};
  double tip_threshold = 0.8;
  double step = deg2rad(1.0);
  double wrap_max = deg2rad(60.0);
  int max_steps = 400;
  double max_finger_speed = 13.3;  // crank rad/s

  /// Radius of the finger pivots about the grasp axis.
  double palm_radius() const;
  /// Time to drive every finger through the full stroke to open.
  double opening_time() const;
  double step_time() const { return step / max_finger_speed; }
  void validate() const;
};

struct GripperState {
  double spread = 1.0;  // 0 parallel, 1 concentric
  std::array<FingerState, kFingerCount> fingers{};
  Pose base_pose;  // palm frame, +z is the tool axis pointing out of the palm

  bool operator==(const GripperState&) const = default;
};

/// Gear-coupled adduction: linear interpolation between the parallel and
/// concentric endpoint assignments.
std::array<double, kFingerCount> spread_azimuths(const GripperConfig& config, double spread);

/// A gripper with every finger at the same flexion and the given spread.
GripperState make_gripper(const GripperConfig& config, double spread, double flexion,
                          const Pose& base_pose);

/// Finger body in world coordinates as a two-segment polyline
/// (base -> kink -> tip) swept by a sphere of the finger radius.
struct FingerGeometry {
  Vec3 base;
  Vec3 kink;
  Vec3 tip;
  Vec3 inward;  // unit, in the palm plane
  double radius = 0.0;
  double length = 0.0;
  double kink_arc = 1.0;

  /// Closest point on the centreline to p, with its arc position in [0,1].
  std::pair<Vec3, double> closest(const Vec3& p) const;
  double distance(const Vec3& p) const { return (closest(p).first - p).norm(); }
  double lowest_z() const;
};

FingerGeometry finger_geometry(const GripperConfig& config, const GripperState& state, int finger);
std::array<FingerGeometry, kFingerCount> finger_geometry(const GripperConfig& config,
                                                         const GripperState& state);

/// Fingertip centres expressed in the palm frame.
std::array<Vec3, kFingerCount> fingertips_in_palm(const GripperConfig& config,
                                                  const GripperState& state);

/// Diameter of the largest circle centred on the grasp axis that leaves every
/// fingertip outside; 0 once a fingertip reaches or crosses the axis.
double aperture(const GripperState& state, const std::array<FingerLinkage, kFingerCount>& linkages,
                const GripperConfig& config);

ContactMode contact_mode(double contact_arc_position, double tip_threshold = 0.8);

struct Contact {
  int finger = 0;
  int item_id = -1;  // -1 for the crate
  double arc_position = 0.0;
  ContactMode mode = ContactMode::Rigid;
  Vec3 point;   // on the finger centreline
  Vec3 normal;  // from finger towards the touched body, world frame
};

struct Displacement {
  int item_id = 0;
  Vec3 shift = Vec3::Zero();  // world frame
};

struct CloseResult {
  GripperState state;
  std::vector<Contact> contacts;
  int steps = 0;
  std::vector<Displacement> displaced;  // Soft items pushed by the fingers
};

/// Quasi-static closure: every finger advances one step per iteration until it
/// touches an item or a crate wall, or reaches its limit. Belt contacts switch
/// the finger to Compliant and the distal segment keeps wrapping. The floor
/// never stops a finger: the base backs off along the tool axis instead (the
/// arm yields). With `soft_overlap` > 0 a finger pushes Soft items ahead of it
/// across the palm plane for as long as they overlap their neighbours by at
/// most that fraction of the smaller radius.
CloseResult close_fingers(const GripperConfig& config, const GripperState& state, const Scene& scene,
                          int max_steps, double soft_overlap = 0.0);

/// `scene` with the displacements of a closure applied.
Scene displaced_scene(const Scene& scene, const CloseResult& closed);

}  // namespace pickbench
