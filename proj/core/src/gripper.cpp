#include "pickbench/gripper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "pickbench/error.hpp"

namespace pickbench {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Intersection of circle (p, rp) with circle (q, rq). side = +1 picks the point
// left of the p->q direction.
std::optional<Vec2> circle_intersection(const Vec2& p, double rp, const Vec2& q, double rq,
                                        double side) {
  const Vec2 d = q - p;
  const double l = d.norm();
  if (l <= 0.0) return std::nullopt;
  const double x = (rp * rp - rq * rq + l * l) / (2.0 * l);
  const double h2 = rp * rp - x * x;
  if (h2 < 0.0) return std::nullopt;
  const Vec2 u = d / l;
  const Vec2 perp(-u.y(), u.x());
  return p + x * u + side * std::sqrt(h2) * perp;
}

struct Reference {
  Vec2 crank_pivot;
  double crank_angle;
  double branch;  // side of the rocker end relative to crank_end -> rocker_pivot
};

Reference reference(const FingerLinkage& l) {
  const Vec2 a0(0.0, l.ground_length);
  const Vec2 b0(0.0, 0.0);
  const Vec2 b_ref(l.rocker_length, 0.0);
  // The crank end sits on the far side of the line a0 -> b_ref from b0.
  const double b0_side = cross2(b_ref - a0, b0 - a0) < 0.0 ? -1.0 : 1.0;
  const auto a_ref = circle_intersection(a0, l.crank_length, b_ref, l.coupler_length, -b0_side);
  if (!a_ref) {
    throw Error(ErrorCode::NoClosure, "linkage cannot assemble in the straight configuration");
  }
  const Vec2 ca = *a_ref - a0;
  const double branch = cross2(b0 - *a_ref, b_ref - *a_ref) < 0.0 ? -1.0 : 1.0;
  return {a0, std::atan2(ca.y(), ca.x()), branch};
}

}  // namespace

void FingerLinkage::validate() const {
  for (double v : {crank_length, coupler_length, rocker_length, ground_length, tip_offset,
                   finger_width}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidArgument, "linkage lengths must be positive and finite");
    }
  }
  reference(*this);
}

double reference_crank_angle(const FingerLinkage& linkage) {
  return reference(linkage).crank_angle;
}

FingerPose finger_fk(const FingerLinkage& linkage, double flexion) {
  const Reference ref = reference(linkage);
  const double theta = ref.crank_angle + flexion;
  FingerPose out;
  out.crank_pivot = ref.crank_pivot;
  out.rocker_pivot = Vec2::Zero();
  out.crank_end =
      ref.crank_pivot + linkage.crank_length * Vec2(std::cos(theta), std::sin(theta));
  const auto b = circle_intersection(out.crank_end, linkage.coupler_length, out.rocker_pivot,
                                     linkage.rocker_length, ref.branch);
  if (!b) {
    std::ostringstream msg;
    msg << "no closure at flexion " << rad2deg(flexion) << " deg";
    throw Error(ErrorCode::NoClosure, msg.str());
  }
  out.rocker_end = *b;
  const Vec2 dir = out.rocker_end / linkage.rocker_length;
  out.tip = out.rocker_end + linkage.tip_offset * dir;
  out.rocker_angle = std::atan2(dir.y(), dir.x());
  return out;
}

double closure_residual(const FingerLinkage& linkage, const FingerPose& pose) {
  return std::abs((pose.crank_end - pose.rocker_end).norm() - linkage.coupler_length);
}

void check_flexion_range(const FingerLinkage& linkage, double flexion_min, double flexion_max) {
  if (!(flexion_min < flexion_max)) {
    throw Error(ErrorCode::InvalidArgument, "flexion range is empty");
  }
  const int samples = std::max(2, static_cast<int>(std::ceil((flexion_max - flexion_min) /
                                                             deg2rad(0.5))) + 1);
  double previous = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double f = flexion_min + (flexion_max - flexion_min) * i / (samples - 1);
    const double angle = finger_fk(linkage, f).rocker_angle;
    if (!(angle > previous)) {
      throw Error(ErrorCode::NoClosure, "phalanx motion is not monotone over the flexion range");
    }
    previous = angle;
  }
}

double GripperConfig::palm_radius() const { return pair_gap / std::numbers::sqrt2; }

double GripperConfig::opening_time() const {
  return (flexion_max - flexion_open) / max_finger_speed;
}

void GripperConfig::validate() const {
  for (const auto& l : linkages) {
    l.validate();
    check_flexion_range(l, flexion_min, flexion_max);
  }
  if (flexion_open < flexion_min || flexion_open > flexion_max) {
    throw Error(ErrorCode::OutOfRange, "flexion_open outside the flexion range");
  }
  if (!(pair_gap > 0.0)) throw Error(ErrorCode::InvalidArgument, "pair_gap must be positive");
  if (!(tip_threshold >= 0.0 && tip_threshold <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "tip_threshold must lie in [0,1]");
  }
  if (!(step > 0.0) || !(wrap_max >= 0.0) || max_steps <= 0 || !(max_finger_speed > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "closure stepping parameters must be positive");
  }
}

std::array<double, kFingerCount> spread_azimuths(const GripperConfig& config, double spread) {
  if (!(spread >= 0.0 && spread <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "spread must lie in [0,1]");
  }
  std::array<double, kFingerCount> out{};
  for (int n = 0; n < kFingerCount; ++n) {
    const double p = config.parallel_azimuths[n];
    const double c = config.concentric_azimuths[n];
    out[n] = p + spread * (c - p);
  }
  return out;
}

GripperState make_gripper(const GripperConfig& config, double spread, double flexion,
                          const Pose& base_pose) {
  GripperState s;
  s.spread = spread;
  s.base_pose = base_pose;
  const auto az = spread_azimuths(config, spread);
  for (int n = 0; n < kFingerCount; ++n) {
    s.fingers[n].flexion = flexion;
    s.fingers[n].azimuth = az[n];
  }
  return s;
}

std::pair<Vec3, double> FingerGeometry::closest(const Vec3& p) const {
  const double l1 = kink_arc * length;
  const double t1 = closest_param(base, kink, p);
  const Vec3 c1 = base + t1 * (kink - base);
  if (kink_arc >= 1.0) return {c1, t1};
  const double t2 = closest_param(kink, tip, p);
  const Vec3 c2 = kink + t2 * (tip - kink);
  if ((c1 - p).squaredNorm() <= (c2 - p).squaredNorm()) return {c1, t1 * l1 / length};
  return {c2, (l1 + t2 * (length - l1)) / length};
}

double FingerGeometry::lowest_z() const {
  return std::min({base.z(), kink.z(), tip.z()}) - radius;
}

FingerGeometry finger_geometry(const GripperConfig& config, const GripperState& state, int finger) {
  const auto& linkage = config.linkages[finger];
  const auto& fs = state.fingers[finger];
  const FingerPose fp = finger_fk(linkage, fs.flexion);
  const double length = linkage.finger_length();
  const Vec2 dir(std::cos(fp.rocker_angle), std::sin(fp.rocker_angle));
  const double kink_arc = fs.mode == ContactMode::Compliant ? fs.wrap_arc : 1.0;
  const Vec2 kink = kink_arc * length * dir;
  const double w = fs.mode == ContactMode::Compliant ? fs.wrap : 0.0;
  const Vec2 distal(std::cos(fp.rocker_angle + w), std::sin(fp.rocker_angle + w));
  const Vec2 tip = kink + (1.0 - kink_arc) * length * distal;

  const double mount = config.concentric_azimuths[finger];
  const double r = config.palm_radius();
  const Vec3 pivot(r * std::cos(mount), r * std::sin(mount), 0.0);
  const Vec3 inward(-std::cos(fs.azimuth), -std::sin(fs.azimuth), 0.0);
  auto to_world = [&](const Vec2& f) {
    return state.base_pose.apply(pivot + f.x() * Vec3::UnitZ() + f.y() * inward);
  };

  FingerGeometry g;
  g.base = to_world(Vec2::Zero());
  g.kink = to_world(kink);
  g.tip = to_world(tip);
  g.inward = state.base_pose.rotate(inward);
  g.radius = linkage.radius();
  g.length = length;
  g.kink_arc = kink_arc;
  return g;
}

std::array<FingerGeometry, kFingerCount> finger_geometry(const GripperConfig& config,
                                                         const GripperState& state) {
  std::array<FingerGeometry, kFingerCount> out;
  for (int n = 0; n < kFingerCount; ++n) out[n] = finger_geometry(config, state, n);
  return out;
}

std::array<Vec3, kFingerCount> fingertips_in_palm(const GripperConfig& config,
                                                  const GripperState& state) {
  std::array<Vec3, kFingerCount> out;
  for (int n = 0; n < kFingerCount; ++n) {
    out[n] = state.base_pose.to_local(finger_geometry(config, state, n).tip);
  }
  return out;
}

double aperture(const GripperState& state, const std::array<FingerLinkage, kFingerCount>& linkages,
                const GripperConfig& config) {
  GripperConfig c = config;
  c.linkages = linkages;
  const auto tips = fingertips_in_palm(c, state);
  double min_r = std::numeric_limits<double>::infinity();
  for (int n = 0; n < kFingerCount; ++n) {
    const Vec2 xy = tips[n].head<2>();
    const Vec2 outward(std::cos(state.fingers[n].azimuth), std::sin(state.fingers[n].azimuth));
    if (xy.dot(outward) <= 0.0) return 0.0;
    min_r = std::min(min_r, xy.norm());
  }
  return 2.0 * min_r;
}

ContactMode contact_mode(double contact_arc_position, double tip_threshold) {
  if (!(contact_arc_position >= 0.0 && contact_arc_position <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "contact arc position must lie in [0,1]");
  }
  return contact_arc_position >= tip_threshold ? ContactMode::Rigid : ContactMode::Compliant;
}

namespace {

struct Body {
  int id;
  std::vector<Sphere> spheres;
  bool soft = false;
  double radius = 0.0;
  Vec3 shift = Vec3::Zero();
};

double overlap(const Body& a, const Body& b) {
  double pen = -std::numeric_limits<double>::infinity();
  for (const auto& sa : a.spheres) {
    for (const auto& sb : b.spheres) {
      pen = std::max(pen, sa.radius + sb.radius - (sa.center - sb.center).norm());
    }
  }
  return pen;
}

bool inside_crate(const Body& b, const Crate& crate) {
  return std::all_of(b.spheres.begin(), b.spheres.end(), [&](const Sphere& sp) {
    return std::abs(sp.center.x()) + sp.radius <= 0.5 * crate.length &&
           std::abs(sp.center.y()) + sp.radius <= 0.5 * crate.width && sp.center.z() >= 0.0;
  });
}

struct Touch {
  double excess = 0.0;
  double penetration = 0.0;
  Vec3 point;
  Vec3 normal;
  double arc = 0.0;
};

Touch deepest(const FingerGeometry& g, const Body& body) {
  Touch best;
  best.penetration = -std::numeric_limits<double>::infinity();
  for (const auto& s : body.spheres) {
    const auto [pt, arc] = g.closest(s.center);
    const Vec3 d = s.center - pt;
    const double pen = g.radius + s.radius - d.norm();
    if (pen > best.penetration) {
      best.penetration = pen;
      best.point = pt;
      best.arc = arc;
      best.normal = d.norm() > 0.0 ? Vec3(d.normalized()) : g.inward;
    }
  }
  return best;
}

// Penetration of a finger into the crate walls, with the wall normal.
std::optional<Touch> wall_touch(const FingerGeometry& g, const Crate& crate) {
  std::optional<Touch> out;
  const std::array<std::pair<Vec3, double>, 3> pts{{{g.base, 0.0}, {g.kink, g.kink_arc}, {g.tip, 1.0}}};
  for (const auto& [p, arc] : pts) {
    if (p.z() > crate.height) continue;
    const double px = std::abs(p.x()) + g.radius - 0.5 * crate.length;
    const double py = std::abs(p.y()) + g.radius - 0.5 * crate.width;
    const double pen = std::max(px, py);
    if (pen > 0.0 && (!out || pen > out->penetration)) {
      Touch t;
      t.penetration = pen;
      t.point = p;
      t.arc = arc;
      t.normal = px >= py ? Vec3(p.x() >= 0.0 ? 1.0 : -1.0, 0.0, 0.0)
                          : Vec3(0.0, p.y() >= 0.0 ? 1.0 : -1.0, 0.0);
      out = t;
    }
  }
  return out;
}

}  // namespace

CloseResult close_fingers(const GripperConfig& config, const GripperState& state, const Scene& scene,
                          int max_steps, double soft_overlap) {
  CloseResult out{state, {}, 0, {}};
  GripperState& s = out.state;
  const Vec3 axis = s.base_pose.rotate(Vec3::UnitZ());
  // Base motion that moves the finger bodies by one unit of height.
  const bool along_axis = -axis.z() > 0.1;
  const Vec3 climb = along_axis ? Vec3(-axis / -axis.z()) : Vec3(Vec3::UnitZ());

  double reach = config.palm_radius();
  for (const auto& l : config.linkages) reach = std::max(reach, config.palm_radius() + l.finger_length());
  std::vector<Body> bodies;
  for (const auto& item : scene.items) {
    if ((item.pose.position - s.base_pose.position).norm() >
        reach + item.bounding_radius() + 0.02) {
      continue;
    }
    bodies.push_back({item.id, item.collision_spheres(), item.compliance == Compliance::Soft,
                      item.bounding_radius()});
  }
  std::vector<std::vector<double>> packed(bodies.size());
  for (size_t a = 0; a < bodies.size(); ++a) {
    for (size_t b = 0; b < bodies.size(); ++b) {
      packed[a].push_back(a == b ? 0.0 : std::max(0.0, overlap(bodies[a], bodies[b])));
    }
  }

  // Items the fingers already overlap at the start (soft items squeezed aside
  // during insertion) only register once the finger presses further in.
  std::array<std::vector<double>, kFingerCount> baseline;
  for (int n = 0; n < kFingerCount; ++n) {
    const auto g = finger_geometry(config, s, n);
    for (const auto& b : bodies) baseline[n].push_back(std::max(0.0, deepest(g, b).penetration));
  }

  std::array<bool, kFingerCount> settled{};
  std::array<int, kFingerCount> kink_body{-1, -1, -1, -1};
  std::array<std::vector<char>, kFingerCount> pushing;
  for (auto& p : pushing) p.assign(bodies.size(), 0);

  // A Soft item the finger drives into slides ahead of it across the palm
  // plane, unless that jams it into a neighbour, another finger or the crate.
  auto try_push_dir = [&](int n, size_t b, const Touch& t, Vec3 dir) {
    if (dir.norm() < 0.5) return false;
    dir.normalize();
    const double along = t.normal.dot(dir);
    const Vec3 move = dir * (t.excess / along);
    Body moved = bodies[b];
    moved.shift += move;
    if (moved.shift.norm() > moved.radius) return false;
    for (auto& sp : moved.spheres) sp.center += move;
    if (!inside_crate(moved, scene.crate)) return false;
    for (const auto& sp : moved.spheres) {
      if (s.base_pose.to_local(sp.center).z() < sp.radius * (1.0 - soft_overlap)) return false;
    }
    for (size_t o = 0; o < bodies.size(); ++o) {
      if (o == b) continue;
      const double allowed = std::max(packed[b][o], soft_overlap * std::min(moved.radius, bodies[o].radius));
      if (overlap(moved, bodies[o]) > allowed + 1e-12) return false;
    }
    for (int m = 0; m < kFingerCount; ++m) {
      if (m == n) continue;
      const auto other = finger_geometry(config, s, m);
      if (deepest(other, moved).penetration > baseline[m][b] + 1e-12) return false;
    }
    bodies[b] = std::move(moved);
    return true;
  };
  auto try_push = [&](int n, size_t b, const Touch& t) {
    return try_push_dir(n, b, t, t.normal - t.normal.dot(axis) * axis);
  };
  auto at_limit = [&](const FingerState& f) {
    return f.mode == ContactMode::Rigid ? f.flexion >= config.flexion_max
                                        : f.wrap >= config.wrap_max;
  };
  for (int n = 0; n < kFingerCount; ++n) settled[n] = at_limit(s.fingers[n]);
  auto make_contact = [&](int n, int item_id, const Touch& t) {
    Contact c;
    c.finger = n;
    c.item_id = item_id;
    c.arc_position = std::clamp(t.arc, 0.0, 1.0);
    c.mode = contact_mode(c.arc_position, config.tip_threshold);
    c.point = t.point;
    c.normal = t.normal;
    return c;
  };

  while (!std::all_of(settled.begin(), settled.end(), [](bool b) { return b; })) {
    if (out.steps >= max_steps) {
      throw Error(ErrorCode::StepLimit, "fingers did not settle within the step budget");
    }
    ++out.steps;
    for (int n = 0; n < kFingerCount; ++n) {
      if (settled[n]) continue;
      GripperState trial = s;
      FingerState& f = trial.fingers[n];
      const bool compliant = f.mode == ContactMode::Compliant;
      if (compliant) {
        f.wrap = std::min(f.wrap + config.step, config.wrap_max);
      } else {
        f.flexion = std::min(f.flexion + config.step, config.flexion_max);
      }

      auto g = finger_geometry(config, trial, n);
      const double sink = -g.lowest_z();
      if (sink > 0.0) {
        trial.base_pose.position += sink * climb;
        g = finger_geometry(config, trial, n);
      }

      std::optional<Touch> hit;
      int hit_id = -1;
      for (size_t b = 0; b < bodies.size(); ++b) {
        Touch t = deepest(g, bodies[b]);
        double allowance = baseline[n][b];
        // The belt conforms around the body it wrapped on.
        if (compliant && kink_body[n] == static_cast<int>(b)) allowance += g.radius;
        t.excess = t.penetration - allowance;
        if (t.excess > 1e-12 && bodies[b].soft && soft_overlap > 0.0 &&
            kink_body[n] != static_cast<int>(b) && try_push(n, b, t)) {
          if (!pushing[n][b]) {
            pushing[n][b] = 1;
            out.contacts.push_back(make_contact(n, bodies[b].id, t));
          }
          continue;
        }
        if (t.excess > 1e-12 && (!hit || t.excess > hit->excess)) {
          hit = t;
          hit_id = static_cast<int>(b);
        }
      }
      if (auto w = wall_touch(g, scene.crate); w && (!hit || w->penetration > hit->excess)) {
        hit = w;
        hit_id = -1;
      }

      if (!hit) {
        s = trial;
        settled[n] = at_limit(s.fingers[n]);
        continue;
      }

      const Contact c = make_contact(n, hit_id >= 0 ? bodies[hit_id].id : -1, *hit);
      out.contacts.push_back(c);

      if (!compliant && c.mode == ContactMode::Compliant && hit_id >= 0) {
        s.fingers[n].mode = ContactMode::Compliant;
        s.fingers[n].wrap_arc = c.arc_position;
        s.fingers[n].wrap = 0.0;
        kink_body[n] = hit_id;
        settled[n] = at_limit(s.fingers[n]);
      } else {
        settled[n] = true;
      }
    }
  }
  for (const auto& b : bodies) {
    if (b.shift != Vec3::Zero()) out.displaced.push_back({b.id, b.shift});
  }
  return out;
}

Scene displaced_scene(const Scene& scene, const CloseResult& closed) {
  Scene out = scene;
  for (const auto& d : closed.displaced) {
    for (auto& item : out.items) {
      if (item.id == d.item_id) item.pose.position += d.shift;
    }
  }
  return out;
}

}  // namespace pickbench
