#include "pickbench/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "pickbench/error.hpp"
#include "pickbench/rng.hpp"

namespace pickbench {

std::string_view to_string(ObjectType t) { return t == ObjectType::Lime ? "lime" : "pickle"; }
std::string_view to_string(Density d) { return d == Density::Full ? "full" : "sparse_single"; }

void SceneParams::validate() const {
  if (!(crate.length > 0.0 && crate.width > 0.0 && crate.height > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "crate dimensions must be positive");
  }
  auto in_item_range = [](double v) { return v >= 0.0025 && v <= 0.025; };
  for (int i = 0; i < 3; ++i) {
    if (!in_item_range(lime_semi_axes[i])) {
      throw Error(ErrorCode::OutOfRange, "lime semi-axes must lie in [2.5, 25] mm");
    }
  }
  if (!in_item_range(pickle_radius_min) || !in_item_range(pickle_radius_max) ||
      pickle_radius_min > pickle_radius_max) {
    throw Error(ErrorCode::OutOfRange, "pickle radii must lie in [2.5, 25] mm");
  }
  if (!(fill_fraction > 0.0 && fill_fraction < 1.0)) {
    throw Error(ErrorCode::OutOfRange, "fill_fraction must lie in (0,1)");
  }
  if (settle_candidates < 1 || max_attempts < 1) {
    throw Error(ErrorCode::InvalidArgument, "packing attempt counts must be >= 1");
  }
  if (sparse_extra_min < 0 || sparse_extra_max < sparse_extra_min) {
    throw Error(ErrorCode::InvalidArgument, "sparse extra item range is invalid");
  }
  for (double v : {sparse_jitter, sparse_separation, rigid_penetration_tol, soft_overlap_fraction,
                   clearance_tol, lateral_search_radius, lift_margin, drop_threshold,
                   drop_jitter}) {
    if (!(v >= 0.0)) throw Error(ErrorCode::InvalidArgument, "scene tolerances must be >= 0");
  }
  if (sparse_jitter > 0.005) {
    throw Error(ErrorCode::OutOfRange, "sparse_jitter must keep the pick item within 5 mm");
  }
}

namespace {

Quat yaw(double angle) { return Quat(Eigen::AngleAxisd(angle, Vec3::UnitZ())); }

double overlap_tolerance(const Item& item, double sphere_radius, const SceneParams& p) {
  return item.compliance == Compliance::Soft ? p.soft_overlap_fraction * sphere_radius
                                             : p.rigid_penetration_tol;
}

Item make_item(ObjectType type, int id, Rng& rng, const SceneParams& p) {
  Item item;
  item.id = id;
  if (type == ObjectType::Lime) {
    item.shape = EllipsoidShape{p.lime_semi_axes};
    item.compliance = Compliance::Rigid;
  } else {
    item.shape = SphereShape{rng.uniform(p.pickle_radius_min, p.pickle_radius_max)};
    item.compliance = Compliance::Soft;
  }
  item.pose.orientation = yaw(rng.uniform(0.0, 2.0 * std::numbers::pi));
  return item;
}

bool inside_walls(const Item& item, const Crate& crate) {
  for (const auto& s : item.collision_spheres()) {
    if (std::abs(s.center.x()) + s.radius > 0.5 * crate.length + 1e-12) return false;
    if (std::abs(s.center.y()) + s.radius > 0.5 * crate.width + 1e-12) return false;
  }
  return true;
}

// Lowest centre height at which `item` (already placed in xy) rests on the
// floor or on the items below it.
double rest_z(const Item& item, const std::vector<Item>& placed, const SceneParams& p) {
  double z = item.rest_height();
  const auto mine = item.local_spheres();
  for (const auto& other : placed) {
    const Vec2 dxy = (other.pose.position - item.pose.position).head<2>();
    if (dxy.norm() > item.bounding_radius() + other.bounding_radius()) continue;
    for (const auto& so : other.collision_spheres()) {
      for (const auto& sl : mine) {
        const Vec3 c = item.pose.orientation * sl.center + item.pose.position;
        const double tol =
            std::max(overlap_tolerance(item, sl.radius, p), overlap_tolerance(other, so.radius, p));
        const double reach = sl.radius + so.radius - tol;
        const double dh = (c.head<2>() - so.center.head<2>()).norm();
        if (dh >= reach) continue;
        z = std::max(z, so.center.z() + std::sqrt(reach * reach - dh * dh));
      }
    }
  }
  return z;
}

bool overlaps(const Item& a, const Item& b, const SceneParams& p) {
  if ((a.pose.position - b.pose.position).norm() > a.bounding_radius() + b.bounding_radius()) {
    return false;
  }
  for (const auto& sa : a.collision_spheres()) {
    for (const auto& sb : b.collision_spheres()) {
      const double tol =
          std::max(overlap_tolerance(a, sa.radius, p), overlap_tolerance(b, sb.radius, p));
      if ((sa.center - sb.center).norm() < sa.radius + sb.radius - tol - 1e-9) return true;
    }
  }
  return false;
}

Vec2 random_xy(const Item& item, Rng& rng, const Crate& crate) {
  const double m = item.bounding_radius();
  const double hx = std::max(0.0, 0.5 * crate.length - m);
  const double hy = std::max(0.0, 0.5 * crate.width - m);
  return {rng.uniform(-hx, hx), rng.uniform(-hy, hy)};
}

Scene sparse_single(const PopulationSpec& spec, const SceneParams& p, Rng& rng) {
  Scene scene{p.crate, p.punnet, {}, p.pick_pose};
  Item pick = make_item(spec.object_type, 0, rng, p);
  const double r = p.sparse_jitter * std::sqrt(rng.uniform());
  const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
  pick.pose.position = p.pick_pose.position + Vec3(r * std::cos(a), r * std::sin(a), 0.0);
  pick.pose.position.z() = pick.rest_height();
  scene.items.push_back(pick);

  const int extra = rng.uniform_int(p.sparse_extra_min, p.sparse_extra_max);
  for (int id = 1; id <= extra; ++id) {
    Item item = make_item(spec.object_type, id, rng, p);
    bool placed = false;
    for (int attempt = 0; attempt < p.max_attempts && !placed; ++attempt) {
      const Vec2 xy = random_xy(item, rng, p.crate);
      item.pose.position = Vec3(xy.x(), xy.y(), item.rest_height());
      const double dist = (xy - p.pick_pose.position.head<2>()).norm();
      if (dist - item.bounding_radius() < p.sparse_separation) continue;
      if (!inside_walls(item, p.crate)) continue;
      placed = std::none_of(scene.items.begin(), scene.items.end(),
                            [&](const Item& o) { return overlaps(item, o, p); });
    }
    if (!placed) throw Error(ErrorCode::PackingFailure, "could not scatter sparse items");
    scene.items.push_back(item);
  }
  return scene;
}

Scene full(const PopulationSpec& spec, const SceneParams& p, Rng& rng) {
  Scene scene{p.crate, p.punnet, {}, p.pick_pose};
  const double target = p.fill_fraction * p.crate.volume();
  double volume = 0.0;
  int id = 0;
  while (volume < target) {
    Item item = make_item(spec.object_type, id, rng, p);
    bool placed = false;
    for (int attempt = 0; attempt < p.max_attempts && !placed; ++attempt) {
      Vec3 best;
      double best_z = std::numeric_limits<double>::infinity();
      for (int c = 0; c < p.settle_candidates; ++c) {
        const Vec2 xy = random_xy(item, rng, p.crate);
        item.pose.position = Vec3(xy.x(), xy.y(), 0.0);
        if (!inside_walls(item, p.crate)) continue;
        const double z = rest_z(item, scene.items, p);
        if (z < best_z) {
          best_z = z;
          best = Vec3(xy.x(), xy.y(), z);
        }
      }
      if (best_z + item.rest_height() <= p.crate.height) {
        item.pose.position = best;
        placed = true;
      }
    }
    if (!placed) {
      std::ostringstream os;
      os << "fill fraction " << p.fill_fraction << " unreachable after " << id << " items";
      throw Error(ErrorCode::PackingFailure, os.str());
    }
    volume += item.volume();
    scene.items.push_back(item);
    ++id;
  }
  return scene;
}

}  // namespace

Scene populate(const PopulationSpec& spec, const SceneParams& params) {
  params.validate();
  Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(spec.object_type) * 2 +
                                  static_cast<std::uint64_t>(spec.density)));
  return spec.density == Density::SparseSingle ? sparse_single(spec, params, rng)
                                               : full(spec, params, rng);
}

void validate_scene(const Scene& scene, const SceneParams& params) {
  std::set<int> ids;
  for (const auto& item : scene.items) {
    const double lo = item.min_extent();
    const double hi = item.max_extent();
    if (lo < 0.0025 - 1e-12 || hi > 0.025 + 1e-12) {
      throw Error(ErrorCode::InvariantViolation,
                  "item " + std::to_string(item.id) + " size outside [2.5, 25] mm");
    }
    if (!ids.insert(item.id).second) {
      throw Error(ErrorCode::InvariantViolation, "duplicate item id " + std::to_string(item.id));
    }
    if (!inside_walls(item, scene.crate) ||
        item.pose.position.z() - item.rest_height() < -1e-9 ||
        item.pose.position.z() + item.rest_height() > scene.crate.height + 1e-9) {
      throw Error(ErrorCode::InvariantViolation,
                  "item " + std::to_string(item.id) + " outside the crate");
    }
  }
  for (size_t i = 0; i < scene.items.size(); ++i) {
    for (size_t j = i + 1; j < scene.items.size(); ++j) {
      if (overlaps(scene.items[i], scene.items[j], params)) {
        throw Error(ErrorCode::InvariantViolation,
                    "items " + std::to_string(scene.items[i].id) + " and " +
                        std::to_string(scene.items[j].id) + " overlap");
      }
    }
  }
}

Footprint descent_footprint(const GripperConfig& config, const GripperState& start,
                            const Vec3& direction, double distance) {
  Footprint out;
  const Vec3 d = direction.normalized() * distance;
  for (int n = 0; n < kFingerCount; ++n) {
    const auto g = finger_geometry(config, start, n);
    out[n] = {g.tip, g.tip + d, g.radius};
  }
  return out;
}

namespace {

bool capsule_blocked(const Vec3& a, const Vec3& b, double radius,
                     const std::vector<Sphere>& rigid, double clearance) {
  for (const auto& s : rigid) {
    if (radius + s.radius - point_segment_distance(a, b, s.center) > clearance) return true;
  }
  return false;
}

}  // namespace

std::array<Insertion, kFingerCount> insertion_check(const Footprint& footprint, const Scene& scene,
                                                    const SceneParams& params) {
  std::array<Insertion, kFingerCount> out;
  out.fill(Insertion::Inserted);
  for (int n = 0; n < kFingerCount; ++n) {
    const auto& cap = footprint[n];
    const double reach = cap.radius + params.lateral_search_radius + params.clearance_tol;
    std::vector<Sphere> rigid;
    for (const auto& item : scene.items) {
      if (item.compliance != Compliance::Rigid) continue;
      if (point_segment_distance(cap.start, cap.end, item.pose.position) >
          reach + item.bounding_radius()) {
        continue;
      }
      for (const auto& s : item.collision_spheres()) rigid.push_back(s);
    }
    if (!capsule_blocked(cap.start, cap.end, cap.radius, rigid, params.clearance_tol)) continue;

    Vec3 axis = cap.end - cap.start;
    axis = axis.norm() > 0.0 ? Vec3(axis.normalized()) : Vec3(-Vec3::UnitZ());
    const Vec3 u = axis.unitOrthogonal();
    const Vec3 v = axis.cross(u);
    bool free = false;
    constexpr int kRings = 4;
    constexpr int kSpokes = 24;
    for (int ring = 1; ring <= kRings && !free; ++ring) {
      const double rad = params.lateral_search_radius * ring / kRings;
      for (int k = 0; k < kSpokes && !free; ++k) {
        const double a = 2.0 * std::numbers::pi * k / kSpokes;
        const Vec3 shift = rad * (std::cos(a) * u + std::sin(a) * v);
        free = !capsule_blocked(cap.start + shift, cap.end + shift, cap.radius, rigid,
                                params.clearance_tol);
      }
    }
    if (!free) out[n] = Insertion::Blocked;
  }
  return out;
}

std::vector<Vec2> fingertip_polygon(const GripperConfig& config, const GripperState& state) {
  const auto tips = fingertips_in_palm(config, state);
  std::vector<Vec2> pts;
  for (const auto& t : tips) pts.push_back(t.head<2>());
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  auto cross = [](const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
  };
  std::vector<Vec2> hull(2 * pts.size());
  size_t k = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  for (size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k > 1 ? k - 1 : k);
  return hull;  // counter-clockwise
}

double signed_distance_to_polygon(std::span<const Vec2> hull, const Vec2& p) {
  if (hull.empty()) return -std::numeric_limits<double>::infinity();
  double min_edge = std::numeric_limits<double>::infinity();
  bool inside = hull.size() >= 3;
  for (size_t i = 0; i < hull.size(); ++i) {
    const Vec2& a = hull[i];
    const Vec2& b = hull[(i + 1) % hull.size()];
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    min_edge = std::min(min_edge, (a + t * ab - p).norm());
    if (ab.x() * (p - a).y() - ab.y() * (p - a).x() < 0.0) inside = false;
  }
  return inside ? min_edge : -min_edge;
}

std::vector<int> capture_set(const GripperConfig& config, const GripperState& closed,
                             std::span<const Contact> contacts, const Scene& scene,
                             const SceneParams& params) {
  // Force-closure heuristic: two item contacts from different fingers whose
  // normals oppose in the palm plane.
  const Quat to_palm = closed.base_pose.orientation.conjugate();
  // Opposed pair among the contacts; with `item` >= 0 both must touch it.
  auto opposed = [&](int item) {
    for (size_t i = 0; i < contacts.size(); ++i) {
      if (contacts[i].item_id < 0 || (item >= 0 && contacts[i].item_id != item)) continue;
      const Vec2 ni = (to_palm * contacts[i].normal).head<2>();
      for (size_t j = i + 1; j < contacts.size(); ++j) {
        if (contacts[j].item_id < 0 || contacts[j].finger == contacts[i].finger) continue;
        if (item >= 0 && contacts[j].item_id != item) continue;
        if (ni.dot((to_palm * contacts[j].normal).head<2>()) < 0.0) return true;
      }
    }
    return false;
  };
  if (!opposed(-1)) return {};

  const auto hull = fingertip_polygon(config, closed);
  const auto tips = fingertips_in_palm(config, closed);
  double tip_plane = 0.0;
  for (int n = 0; n < kFingerCount; ++n) {
    tip_plane += tips[n].z() + config.linkages[n].radius();
  }
  tip_plane /= kFingerCount;

  // A finger body fences the items it touches: their centres may sit up to a
  // fingertip radius outside the hull.
  double tip_radius = std::numeric_limits<double>::infinity();
  for (const auto& l : config.linkages) tip_radius = std::min(tip_radius, l.radius());

  std::vector<int> out;
  for (const auto& item : scene.items) {
    const Vec3 c = closed.base_pose.to_local(item.pose.position);
    if (c.z() < 0.0) continue;  // behind the palm
    const double sd = signed_distance_to_polygon(hull, c.head<2>());
    const bool touched = std::any_of(contacts.begin(), contacts.end(),
                                     [&](const Contact& k) { return k.item_id == item.id; });
    if (sd <= (touched ? -tip_radius : 0.0)) continue;
    // Above the fingertip plane by the lift margin it is caged; otherwise it
    // must be pinched between two fingers.
    if (c.z() > tip_plane - params.lift_margin && !opposed(item.id)) continue;
    out.push_back(item.id);
  }
  return out;
}

RetentionResult retention_check(std::span<const int> captured, const Scene& scene,
                                const GripperConfig& config, const GripperState& closed,
                                std::span<const Pose> transport_path,
                                std::size_t punnet_waypoint, std::uint64_t seed,
                                const SceneParams& params) {
  RetentionResult out;
  const auto hull = fingertip_polygon(config, closed);
  for (int id : captured) {
    const Item* item = scene.find(id);
    if (!item) throw Error(ErrorCode::InvalidArgument, "captured id not in scene");
    const Vec3 c = closed.base_pose.to_local(item->pose.position);
    const double inner = signed_distance_to_polygon(hull, c.head<2>());
    const double r = item->bounding_radius();
    bool dropped = false;
    for (std::size_t w = 0; w < transport_path.size() && !dropped; ++w) {
      Rng rng(mix_seed(seed, static_cast<std::uint64_t>(id) * 4096 + w));
      const double jitter = rng.uniform(-params.drop_jitter, params.drop_jitter);
      const double tilt = tool_tilt(transport_path[w].orientation);
      const double margin = inner - r * (1.0 - std::cos(tilt)) + jitter;
      if (margin < params.drop_threshold) {
        dropped = true;
        (w < punnet_waypoint ? out.dropped_outside : out.dropped_inside).push_back(id);
      }
    }
    if (!dropped) out.retained.push_back(id);
  }
  return out;
}

}  // namespace pickbench
