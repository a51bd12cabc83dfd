#include "pickbench/items.hpp"

#include <algorithm>
#include <cmath>

namespace pickbench {

namespace {

struct ProxyDims {
  double radius;
  double half_length;
};

// Ellipsoids are approximated by a capsule along their long axis whose radius
// is the geometric mean of the two short semi-axes.
ProxyDims proxy_dims(const Shape& shape) {
  if (const auto* s = std::get_if<SphereShape>(&shape)) return {s->radius, 0.0};
  const auto& e = std::get<EllipsoidShape>(shape);
  const double r = std::sqrt(e.semi_axes.y() * e.semi_axes.z());
  return {r, std::max(0.0, e.semi_axes.x() - r)};
}

}  // namespace

double Item::volume() const {
  if (const auto* s = std::get_if<SphereShape>(&shape))
    return 4.0 / 3.0 * std::numbers::pi * s->radius * s->radius * s->radius;
  const auto& e = std::get<EllipsoidShape>(shape);
  return 4.0 / 3.0 * std::numbers::pi * e.semi_axes.prod();
}

double Item::min_extent() const {
  if (const auto* s = std::get_if<SphereShape>(&shape)) return s->radius;
  return std::get<EllipsoidShape>(shape).semi_axes.minCoeff();
}

double Item::max_extent() const {
  if (const auto* s = std::get_if<SphereShape>(&shape)) return s->radius;
  return std::get<EllipsoidShape>(shape).semi_axes.maxCoeff();
}

double Item::rest_height() const { return proxy_dims(shape).radius; }

double Item::bounding_radius() const {
  const auto d = proxy_dims(shape);
  return d.radius + d.half_length;
}

std::vector<Sphere> Item::local_spheres() const {
  const auto d = proxy_dims(shape);
  if (d.half_length <= 0.0) return {Sphere{Vec3::Zero(), d.radius}};
  const int n = static_cast<int>(std::ceil(2.0 * d.half_length / (0.5 * d.radius))) + 1;
  std::vector<Sphere> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = -d.half_length + 2.0 * d.half_length * i / (n - 1);
    out.push_back({Vec3(x, 0.0, 0.0), d.radius});
  }
  return out;
}

std::vector<Sphere> Item::collision_spheres() const {
  auto spheres = local_spheres();
  for (auto& s : spheres) s.center = pose.apply(s.center);
  return spheres;
}

bool Item::operator==(const Item& o) const {
  if (id != o.id || compliance != o.compliance || !(pose == o.pose)) return false;
  if (shape.index() != o.shape.index()) return false;
  if (const auto* s = std::get_if<SphereShape>(&shape))
    return s->radius == std::get<SphereShape>(o.shape).radius;
  return std::get<EllipsoidShape>(shape).semi_axes ==
         std::get<EllipsoidShape>(o.shape).semi_axes;
}

const Item* Scene::find(int id) const {
  auto it = std::find_if(items.begin(), items.end(), [id](const Item& i) { return i.id == id; });
  return it == items.end() ? nullptr : &*it;
}

bool Scene::operator==(const Scene& o) const {
  return crate.length == o.crate.length && crate.width == o.crate.width &&
         crate.height == o.crate.height && punnet.length == o.punnet.length &&
         punnet.width == o.punnet.width && punnet.height == o.punnet.height &&
         punnet.pose == o.punnet.pose && pick_pose == o.pick_pose && items == o.items;
}

}  // namespace pickbench
