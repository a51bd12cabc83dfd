#include "pickbench/executor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "pickbench/arm.hpp"
#include "pickbench/error.hpp"
#include "pickbench/rng.hpp"

namespace pickbench {

Quat approach_orientation(int approach_angle_deg, double yaw) {
  const double tilt = deg2rad(90.0 - approach_angle_deg);
  return (Eigen::AngleAxisd(tilt, Vec3::UnitY()) * Eigen::AngleAxisd(std::numbers::pi, Vec3::UnitX()) *
          Eigen::AngleAxisd(yaw, Vec3::UnitZ()))
      .normalized();
}

Density scene_density(PickType pick) {
  return pick == PickType::Single ? Density::SparseSingle : Density::Full;
}

SpreadMode effective_config(const ScenarioSpec& scenario) {
  return scenario.pick_type == PickType::Single ? SpreadMode::Parallel : scenario.gripper_config;
}

PhasePlan build_plan(const ScenarioSpec& scenario, const Scene& scene, const RunConfig& config) {
  const int angle = scenario.approach_angle_deg;
  if (angle < 60) {
    throw Error(ErrorCode::CollisionRisk, "approach angles below 60 deg collide with the crate");
  }
  if (angle != 60 && angle != 75 && angle != 90) {
    throw Error(ErrorCode::OutOfRange, "approach angle must be 60/75/90 deg");
  }
  const Vec3& target = scene.pick_pose.position;
  if (std::abs(target.x()) > 0.5 * scene.crate.length ||
      std::abs(target.y()) > 0.5 * scene.crate.width || target.z() < 0.0 ||
      target.z() > scene.crate.height) {
    throw Error(ErrorCode::OutOfRange, "pick pose outside the crate");
  }

  const auto& p = config.protocol;
  const auto& g = config.gripper;
  const Quat down = approach_orientation(90, p.tool_yaw);
  const Quat tool = approach_orientation(angle, p.tool_yaw);

  PhasePlan plan;
  plan.open_config = effective_config(scenario);
  plan.open_flexion = g.flexion_open;
  plan.tool_axis = tool * Vec3::UnitZ();
  plan.approach_pose = Pose(target - p.approach_height * plan.tool_axis, tool);
  plan.max_descent = p.max_descent;
  plan.punnet_pose = Pose(scene.punnet.pose.position + Vec3(0.0, 0.0, p.punnet_clearance), down);

  const Pose home(p.home_position, down);
  const Pose start(p.start_position, down);
  plan.waypoints[0] = {home, start};
  plan.waypoints[1] = {start, plan.approach_pose};
  plan.waypoints[2] = {plan.approach_pose,
                       Pose(plan.approach_pose.position + p.max_descent * plan.tool_axis, tool)};
  plan.waypoints[3] = {plan.approach_pose, plan.punnet_pose};
  plan.waypoints[4] = {plan.punnet_pose};

  plan.durations[0] = p.init_move_duration + p.init_overhead;
  plan.durations[1] = p.approach_duration + g.opening_time() + p.approach_overhead;
  plan.durations[2] = 0.0;
  plan.durations[3] = p.lift_duration + p.transfer_duration + p.transport_overhead;
  plan.durations[4] = g.opening_time();
  return plan;
}

Scene scenario_scene(const ScenarioSpec& scenario, const RunConfig& config) {
  return populate({scenario.object_type, scene_density(scenario.pick_type), scenario.seed},
                  config.scene);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Distance along d at which a sphere moving from `from` first touches a
// sphere of combined radius `reach` centred at c.
double sweep_hit(const Vec3& from, const Vec3& d, const Vec3& c, double reach) {
  const Vec3 rel = c - from;
  const double a = rel.dot(d);
  const double rho2 = rel.squaredNorm() - a * a;
  if (rho2 >= reach * reach) return kInf;
  const double s = a - std::sqrt(reach * reach - rho2);
  if (s < 0.0) return a > 0.0 ? 0.0 : kInf;
  return s;
}

// Palm disk (pivot circle plus the finger radius) against an item sphere.
// Soft items give way by their overlap tolerance, and the palm rim pushes
// them aside instead of resting on them.
double palm_hit(const Pose& palm, const Vec3& d, double disk_radius, const Sphere& s,
                const Item& item, const SceneParams& params) {
  const Vec3 rel = s.center - palm.position;
  const double a = rel.dot(d);
  if (a <= 0.0) return kInf;
  const double rho = (rel - a * d).norm();
  const bool soft = item.compliance == Compliance::Soft;
  if (soft && rho > disk_radius) return kInf;
  const double r = soft ? s.radius * (1.0 - params.soft_overlap_fraction) : s.radius;
  const double edge = std::max(0.0, rho - disk_radius);
  if (edge >= r) return kInf;
  return std::max(0.0, a - std::sqrt(r * r - edge * edge));
}

double palm_disk_radius(const GripperConfig& g) {
  double disk = g.palm_radius();
  for (const auto& l : g.linkages) disk = std::max(disk, g.palm_radius() + l.radius());
  return disk;
}

struct Descent {
  double stop = 0.0;
  bool blocked = false;
};

Descent plan_descent(const RunConfig& config, const GripperState& open, const Vec3& d,
                     const Scene& scene) {
  const auto& g = config.gripper;
  double stop = config.protocol.max_descent;

  // Floor: the lowest finger point reaches z = 0.
  if (d.z() < 0.0) {
    for (const auto& f : finger_geometry(g, open)) stop = std::min(stop, f.lowest_z() / -d.z());
  }
  const double disk = palm_disk_radius(g);
  for (const auto& item : scene.items) {
    for (const auto& s : item.collision_spheres()) {
      stop = std::min(stop, palm_hit(open.base_pose, d, disk, s, item, config.scene));
    }
  }
  stop = std::max(stop, 0.0);

  const auto footprint = descent_footprint(g, open, d, stop);
  const auto insertion = insertion_check(footprint, scene, config.scene);
  Descent out{stop, false};
  for (int n = 0; n < kFingerCount; ++n) {
    if (insertion[n] != Insertion::Blocked) continue;
    out.blocked = true;
    double hit = kInf;
    for (const auto& item : scene.items) {
      if (item.compliance != Compliance::Rigid) continue;
      for (const auto& s : item.collision_spheres()) {
        hit = std::min(hit, sweep_hit(footprint[n].start, d, s.center, footprint[n].radius + s.radius));
      }
    }
    out.stop = std::min(out.stop, std::isfinite(hit) ? hit : 0.0);
  }
  return out;
}

std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

std::vector<Pose> transport_path(const Pose& grasp, const PhasePlan& plan, const ProtocolParams& p) {
  std::vector<Pose> path;
  const int n = p.transport_samples;
  for (int i = 1; i <= n; ++i) {
    path.push_back(interpolate_pose(grasp, plan.approach_pose, p.lift_duration,
                                    p.lift_duration * i / n));
  }
  for (int i = 1; i <= n; ++i) {
    path.push_back(interpolate_pose(plan.approach_pose, plan.punnet_pose, p.transfer_duration,
                                    p.transfer_duration * i / n));
  }
  return path;
}

void run_phases(TrialRecord& rec, const Scene& scene, const RunConfig& config) {
  const auto& spec = rec.scenario;
  const PhasePlan plan = build_plan(spec, scene, config);
  rec.phase_durations[0] = plan.durations[0];
  rec.phase_durations[1] = plan.durations[1];

  GraspOutcome grasp = simulate_grasp(spec, scene, config, plan);
  rec.phase_durations[2] = grasp.duration;
  rec.wrench_trace = std::move(grasp.trace);
  rec.note = std::string(to_string(grasp.trigger.kind));
  if (grasp.blocked) {
    rec.outcome = Outcome::GraspFailure;
    rec.note += ";blocked";
    return;
  }
  rec.items_captured = static_cast<int>(grasp.captured.size());
  if (grasp.captured.empty()) {
    rec.outcome = Outcome::GraspFailure;
    rec.note += ";empty";
    return;
  }

  const auto& closed = grasp.closed->state;
  const auto path = transport_path(closed.base_pose, plan, config.protocol);
  const auto kept = retention_check(grasp.captured, displaced_scene(scene, *grasp.closed), config.gripper, closed, path,
                                    path.size() - 1, mix_seed(spec.seed, 0xd7), config.scene);
  rec.phase_durations[3] = plan.durations[3];
  rec.phase_durations[4] = plan.durations[4];
  rec.items_placed = static_cast<int>(kept.retained.size() + kept.dropped_inside.size());
  rec.outcome = rec.items_placed > 0 ? Outcome::Success : Outcome::DropFailure;
  if (!kept.dropped_outside.empty()) {
    rec.note += ";dropped=" + std::to_string(kept.dropped_outside.size());
  }
}

}  // namespace

GraspOutcome simulate_grasp(const ScenarioSpec& scenario, const Scene& scene,
                            const RunConfig& config, const PhasePlan& plan) {
  const auto& p = config.protocol;
  const auto& g = config.gripper;
  const double spread = plan.open_config == SpreadMode::Parallel ? 0.0 : 1.0;
  const GripperState open = make_gripper(g, spread, plan.open_flexion, plan.approach_pose);
  const Vec3& d = plan.tool_axis;
  const Descent descent = plan_descent(config, open, d, scene);

  GraspOutcome out;
  out.blocked = descent.blocked;
  out.descent_stop = descent.stop;

  // The arm follows the descent command under impedance control; the stop
  // point acts as a wall and the wrist sensor watches the resulting wrench.
  const BlockingConstraint wall{-d, (-d).dot(plan.approach_pose.position + descent.stop * d)};
  SensorModel sensor = config.sensor;
  sensor.seed = mix_seed(scenario.seed, 0x5e);
  ContactDetector detector(config.thresholds, p.dt);
  ArmState arm;
  arm.actual_pose = arm.desired_pose = plan.approach_pose;
  const int window = config.thresholds.window_ticks(p.dt);
  const auto max_ticks =
      static_cast<std::uint64_t>(std::ceil(p.max_descent / (p.descent_speed * p.dt))) + 4 * window;
  std::optional<Trigger> trigger;
  while (!trigger) {
    if (++out.ticks > max_ticks) {
      throw Error(ErrorCode::InvariantViolation, "descent ended without a detected contact");
    }
    const double t = static_cast<double>(out.ticks) * p.dt;
    arm.desired_pose.position = plan.approach_pose.position + p.descent_speed * t * d;
    arm = step(arm, config.impedance, wall, p.dt);
    const WrenchSample sample{t, sensed_wrench(arm.external_wrench, sensor, out.ticks)};
    if (p.record_traces) out.trace.push_back(sample);
    trigger = detector.push(sample);
  }
  out.trigger = *trigger;
  out.duration = static_cast<double>(out.ticks) * p.dt;
  if (out.blocked) return out;

  GripperState at_contact = open;
  at_contact.base_pose = arm.actual_pose;
  out.closed = close_fingers(g, at_contact, scene, g.max_steps, config.scene.soft_overlap_fraction);
  out.duration += out.closed->steps * g.step_time();
  out.captured = capture_set(g, out.closed->state, out.closed->contacts,
                             displaced_scene(scene, *out.closed), config.scene);
  return out;
}

TrialRecord run_trial_on_scene(const ScenarioSpec& scenario, const Scene& scene,
                               const RunConfig& config) {
  TrialRecord rec;
  rec.scenario = scenario;
  try {
    run_phases(rec, scene, config);
    rec.validate();
  } catch (const std::exception& e) {
    rec.outcome = Outcome::SystemFailure;
    rec.items_captured = 0;
    rec.items_placed = 0;
    rec.note = csv_safe(e.what());
  }
  return rec;
}

TrialRecord run_trial(const ScenarioSpec& scenario, const RunConfig& config) {
  Scene scene;
  try {
    scene = scenario_scene(scenario, config);
  } catch (const std::exception& e) {
    TrialRecord rec;
    rec.scenario = scenario;
    rec.note = csv_safe(e.what());
    return rec;
  }
  return run_trial_on_scene(scenario, scene, config);
}

std::vector<TrialRecord> run_matrix(const RunConfig& config) {
  config.validate();
  const auto cells = enumerate(config.matrix, config.master_seed);
  std::vector<TrialRecord> out(cells.size());
  const auto workers = static_cast<std::size_t>(std::max(1, config.jobs));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) out[i] = run_trial(cells[i], config);
  };
  if (workers == 1) {
    work();
    return out;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < std::min(workers, cells.size()); ++w) pool.emplace_back(work);
  pool.clear();
  return out;
}

}  // namespace pickbench
