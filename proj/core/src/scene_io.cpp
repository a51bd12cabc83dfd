#include "pickbench/scene_io.hpp"

#include <cmath>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "pickbench/error.hpp"

namespace pickbench {

namespace {

using nlohmann::json;

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json quat(const Quat& q) { return json::array({q.w(), q.x(), q.y(), q.z()}); }

json pose(const Pose& p) { return {{"position", vec(p.position)}, {"orientation", quat(p.orientation)}}; }

Vec3 read_vec(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::SchemaError, "expected 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Pose read_pose(const json& j) {
  const auto& q = j.at("orientation");
  if (!q.is_array() || q.size() != 4) throw Error(ErrorCode::SchemaError, "expected [w, x, y, z]");
  const Quat rot(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>());
  if (!(rot.norm() > 0.0)) throw Error(ErrorCode::SchemaError, "zero quaternion");
  Pose p;
  p.position = read_vec(j.at("position"));
  p.orientation = rot;  // kept verbatim so that snapshots round-trip bit for bit
  if (std::abs(rot.norm() - 1.0) > 1e-9) p.orientation = rot.normalized();
  return p;
}

}  // namespace

json scene_to_json(const Scene& scene) {
  json items = json::array();
  for (const auto& item : scene.items) {
    json j{{"id", item.id},
           {"compliance", item.compliance == Compliance::Soft ? "soft" : "rigid"},
           {"pose", pose(item.pose)}};
    if (const auto* s = std::get_if<SphereShape>(&item.shape)) {
      j["shape"] = "sphere";
      j["radius"] = s->radius;
    } else {
      j["shape"] = "ellipsoid";
      j["semi_axes"] = vec(std::get<EllipsoidShape>(item.shape).semi_axes);
    }
    items.push_back(std::move(j));
  }
  return {{"crate",
           {{"length", scene.crate.length},
            {"width", scene.crate.width},
            {"height", scene.crate.height}}},
          {"punnet",
           {{"length", scene.punnet.length},
            {"width", scene.punnet.width},
            {"height", scene.punnet.height},
            {"pose", pose(scene.punnet.pose)}}},
          {"pick_pose", pose(scene.pick_pose)},
          {"items", items}};
}

Scene scene_from_json(const json& j) {
  Scene scene;
  try {
    const auto& c = j.at("crate");
    scene.crate = {c.at("length").get<double>(), c.at("width").get<double>(),
                   c.at("height").get<double>()};
    const auto& p = j.at("punnet");
    scene.punnet = {p.at("length").get<double>(), p.at("width").get<double>(),
                    p.at("height").get<double>(), read_pose(p.at("pose"))};
    scene.pick_pose = read_pose(j.at("pick_pose"));
    std::set<int> ids;
    for (const auto& ji : j.at("items")) {
      Item item;
      item.id = ji.at("id").get<int>();
      if (!ids.insert(item.id).second) {
        throw Error(ErrorCode::SchemaError, "duplicate item id " + std::to_string(item.id));
      }
      const auto compliance = ji.at("compliance").get<std::string>();
      if (compliance == "soft") {
        item.compliance = Compliance::Soft;
      } else if (compliance == "rigid") {
        item.compliance = Compliance::Rigid;
      } else {
        throw Error(ErrorCode::SchemaError, "unknown compliance '" + compliance + "'");
      }
      const auto shape = ji.at("shape").get<std::string>();
      if (shape == "sphere") {
        item.shape = SphereShape{ji.at("radius").get<double>()};
      } else if (shape == "ellipsoid") {
        item.shape = EllipsoidShape{read_vec(ji.at("semi_axes"))};
      } else {
        throw Error(ErrorCode::SchemaError, "unknown shape '" + shape + "'");
      }
      item.pose = read_pose(ji.at("pose"));
      scene.items.push_back(std::move(item));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("scene JSON: ") + e.what());
  }
  return scene;
}

}  // namespace pickbench
