#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "pickbench/error.hpp"
#include "pickbench/rng.hpp"
#include "pickbench/scene.hpp"
#include "pickbench/scene_io.hpp"

#include <nlohmann/json.hpp>

using namespace pickbench;

namespace {

Item ball(int id, const Vec3& c, double r, Compliance comp) {
  Item item;
  item.id = id;
  item.shape = SphereShape{r};
  item.compliance = comp;
  item.pose = Pose(c, Quat::Identity());
  return item;
}

Item lime(int id, const Vec3& c, double yaw = 0.0) {
  Item item;
  item.id = id;
  item.shape = EllipsoidShape{Vec3(0.025, 0.015, 0.015)};
  item.compliance = Compliance::Rigid;
  item.pose = Pose(c, Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ())));
  return item;
}

Pose palm_down(const Vec3& p) {
  return Pose(p, Quat(Eigen::AngleAxisd(std::numbers::pi, Vec3::UnitX())));
}

DescentCapsule vertical(double x, double y) {
  return {Vec3(x, y, 0.15), Vec3(x, y, 0.016), 0.007};
}

Footprint all_at(double x, double y) {
  Footprint f;
  f.fill(vertical(x, y));
  return f;
}

}  // namespace

TEST(Populate, SparseSingleHasOneItemAtPickPose) {
  const SceneParams p;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (auto type : {ObjectType::Lime, ObjectType::Pickle}) {
      const Scene s = populate({type, Density::SparseSingle, seed}, p);
      const int near = static_cast<int>(std::count_if(s.items.begin(), s.items.end(), [&](const Item& i) {
        return (i.pose.position.head<2>() - p.pick_pose.position.head<2>()).norm() <= 0.005;
      }));
      EXPECT_EQ(near, 1) << seed;
      EXPECT_NO_THROW(validate_scene(s, p));
    }
  }
}

TEST(Populate, FullIsDeterministic) {
  const SceneParams p;
  const Scene a = populate({ObjectType::Pickle, Density::Full, 42}, p);
  const Scene b = populate({ObjectType::Pickle, Density::Full, 42}, p);
  EXPECT_TRUE(a == b);
  EXPECT_GE(a.items.size(), 30u);
  const Scene c = populate({ObjectType::Pickle, Density::Full, 43}, p);
  EXPECT_FALSE(a == c);
}

TEST(Populate, FullScenesKeepInvariants) {
  const SceneParams p;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (auto type : {ObjectType::Lime, ObjectType::Pickle}) {
      const Scene s = populate({type, Density::Full, seed}, p);
      EXPECT_NO_THROW(validate_scene(s, p)) << seed;
      double volume = 0.0;
      for (const auto& i : s.items) volume += i.volume();
      EXPECT_GE(volume, p.fill_fraction * p.crate.volume());
    }
  }
}

TEST(Populate, EqualSpheresMatchFillFraction) {
  SceneParams p;
  p.pickle_radius_min = p.pickle_radius_max = 0.02;
  const double item_volume = 4.0 / 3.0 * std::numbers::pi * std::pow(0.02, 3);
  const double expected = p.fill_fraction * p.crate.volume() / item_volume;
  const Scene s = populate({ObjectType::Pickle, Density::Full, 11}, p);
  EXPECT_NEAR(static_cast<double>(s.items.size()), expected, 0.1 * expected);
}

TEST(Populate, UnreachableFillRaisesPackingFailure) {
  SceneParams p;
  p.fill_fraction = 0.9;
  p.max_attempts = 20;
  try {
    populate({ObjectType::Lime, Density::Full, 1}, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PackingFailure);
  }
}

TEST(ValidateScene, CatchesOverlap) {
  const SceneParams p;
  Scene s;
  s.items = {lime(0, Vec3(0.0, 0.0, 0.015)), lime(1, Vec3(0.01, 0.0, 0.015))};
  EXPECT_THROW(validate_scene(s, p), Error);
}

TEST(Insertion, SoftItemsNeverBlock) {
  const SceneParams p;
  Scene s;
  for (int i = 0; i < 5; ++i) s.items.push_back(ball(i, Vec3(0.02 * i, 0.0, 0.015), 0.015, Compliance::Soft));
  for (auto r : insertion_check(all_at(0.02, 0.0), s, p)) EXPECT_EQ(r, Insertion::Inserted);
}

TEST(Insertion, IsolatedLimeLeavesRoom) {
  const SceneParams p;
  Scene s;
  s.items = {lime(0, Vec3(0.0, 0.0, 0.015))};
  // The finger grazes the lime flank; a small sideways shift clears it.
  for (auto r : insertion_check(all_at(0.0, 0.018), s, p)) EXPECT_EQ(r, Insertion::Inserted);
}

TEST(Insertion, DensePackBlocks) {
  const SceneParams p;
  Scene s;
  // Staggered rows of limes, 2 mm apart: every hole is narrower than a finger.
  const double gap = 0.002;
  const double pitch = 0.05 + gap;
  const double shift = 0.5 * pitch - 0.02;
  const double row = std::sqrt(std::pow(0.03 + gap, 2) - shift * shift);
  int id = 0;
  for (int j = -3; j <= 3; ++j) {
    for (int i = -3; i <= 2; ++i) {
      const double x = pitch * (i - 0.25) + (j % 2 ? 0.5 * pitch : 0.0);
      s.items.push_back(lime(id++, Vec3(x, row * j, 0.015)));
    }
  }
  ASSERT_NO_THROW(validate_scene(s, p));
  Rng rng(8);
  for (int k = 0; k < 200; ++k) {
    const Footprint f = all_at(rng.uniform(-0.06, 0.06), rng.uniform(-0.04, 0.04));
    for (auto r : insertion_check(f, s, p)) EXPECT_EQ(r, Insertion::Blocked);
  }
}

TEST(Insertion, RemovingRigidItemNeverBlocks) {
  const SceneParams p;
  Rng rng(21);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Scene s = populate({ObjectType::Lime, Density::Full, seed}, p);
    for (int trial = 0; trial < 10; ++trial) {
      const Footprint f = all_at(rng.uniform(-0.1, 0.1), rng.uniform(-0.08, 0.08));
      const auto before = insertion_check(f, s, p);
      for (size_t k = 0; k < s.items.size(); k += 3) {
        Scene fewer = s;
        fewer.items.erase(fewer.items.begin() + static_cast<long>(k));
        const auto after = insertion_check(f, fewer, p);
        for (int n = 0; n < kFingerCount; ++n) {
          if (before[n] == Insertion::Inserted) EXPECT_EQ(after[n], Insertion::Inserted);
        }
      }
    }
  }
}

TEST(Polygon, SignedDistance) {
  const std::vector<Vec2> sq{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  EXPECT_NEAR(signed_distance_to_polygon(sq, Vec2(0, 0)), 1.0, 1e-12);
  EXPECT_NEAR(signed_distance_to_polygon(sq, Vec2(2, 0)), -1.0, 1e-12);
  EXPECT_NEAR(signed_distance_to_polygon(sq, Vec2(0.5, 0.25)), 0.5, 1e-12);
}

TEST(Polygon, FingertipHullIsCounterClockwise) {
  const GripperConfig g;
  const auto hull = fingertip_polygon(g, make_gripper(g, 1.0, 0.0, Pose()));
  ASSERT_EQ(hull.size(), 4u);
  double area = 0.0;
  for (size_t i = 0; i < hull.size(); ++i) {
    const Vec2& a = hull[i];
    const Vec2& b = hull[(i + 1) % hull.size()];
    area += a.x() * b.y() - a.y() * b.x();
  }
  EXPECT_GT(area, 0.0);
}

TEST(Capture, EmptySceneCapturesNothing) {
  const GripperConfig g;
  const SceneParams p;
  Scene s;
  const auto st = make_gripper(g, 1.0, g.flexion_open, palm_down(Vec3(0, 0, 0.07)));
  const auto closed = close_fingers(g, st, s, g.max_steps);
  EXPECT_TRUE(capture_set(g, closed.state, closed.contacts, s, p).empty());
}

TEST(Capture, CentredSoftSphereIsCaptured) {
  const GripperConfig g;
  const SceneParams p;
  Scene s;
  s.items = {ball(0, Vec3(0, 0, 0.02), 0.02, Compliance::Soft)};
  const double length = g.linkages[0].finger_length();
  const auto st = make_gripper(g, 1.0, g.flexion_open, palm_down(Vec3(0, 0, 0.02 + length)));
  const auto closed = close_fingers(g, st, s, g.max_steps, p.soft_overlap_fraction);
  const auto got = capture_set(g, closed.state, closed.contacts, displaced_scene(s, closed), p);
  EXPECT_EQ(got, std::vector<int>{0});
}

TEST(Capture, IdsAreDistinctAndInsideCrate) {
  const GripperConfig g;
  const SceneParams p;
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const Scene s = populate({ObjectType::Pickle, Density::Full, seed}, p);
    const auto st = make_gripper(g, 1.0, g.flexion_open, palm_down(Vec3(0, 0, 0.075)));
    const auto closed = close_fingers(g, st, s, g.max_steps, p.soft_overlap_fraction);
    const Scene moved = displaced_scene(s, closed);
    const auto got = capture_set(g, closed.state, closed.contacts, moved, p);
    EXPECT_EQ(std::set<int>(got.begin(), got.end()).size(), got.size());
    for (int id : got) {
      const Item* item = moved.find(id);
      ASSERT_NE(item, nullptr);
      EXPECT_LE(std::abs(item->pose.position.x()), 0.5 * s.crate.length);
      EXPECT_LE(std::abs(item->pose.position.y()), 0.5 * s.crate.width);
    }
  }
}

namespace {

struct RetentionRig {
  GripperConfig g;
  SceneParams p;
  GripperState closed;
  std::vector<Pose> path;

  explicit RetentionRig(double flexion) {
    closed = make_gripper(g, 1.0, flexion, palm_down(Vec3(0, 0, 0.1)));
    for (int w = 0; w < 10; ++w) path.push_back(palm_down(Vec3(0, 0.05 * w, 0.1 + 0.02 * w)));
  }
  // Item centred at palm-frame xy.
  Item at(int id, double x, double y) const {
    return ball(id, closed.base_pose.apply(Vec3(x, y, 0.05)), 0.012, Compliance::Soft);
  }
  RetentionResult run(const Scene& s, const std::vector<int>& ids) const {
    return retention_check(ids, s, g, closed, path, 8, 77, p);
  }
};

}  // namespace

TEST(Retention, CentredItemStays) {
  const RetentionRig rig(0.0);
  Scene s;
  s.items = {rig.at(0, 0.0, 0.0)};
  EXPECT_EQ(rig.run(s, {0}).retained, std::vector<int>{0});
}

TEST(Retention, BoundaryItemDrops) {
  const RetentionRig rig(0.0);
  const auto hull = fingertip_polygon(rig.g, rig.closed);
  const Vec2 edge_mid = 0.5 * (hull[0] + hull[1]);
  Scene s;
  s.items = {rig.at(0, edge_mid.x(), edge_mid.y())};
  const auto r = rig.run(s, {0});
  EXPECT_TRUE(r.retained.empty());
  EXPECT_EQ(r.dropped_outside, std::vector<int>{0});
}

TEST(Retention, FourItemCase) {
  const RetentionRig rig(0.0);
  const auto hull = fingertip_polygon(rig.g, rig.closed);
  const Vec2 v = hull[0];
  const Vec2 mid = 0.5 * (hull[0] + hull[2]);
  Scene s;
  s.items = {rig.at(0, mid.x(), mid.y()), rig.at(1, mid.x() + 0.003, mid.y() - 0.002),
             rig.at(2, v.x(), v.y()), rig.at(3, 3.0 * v.x(), 3.0 * v.y())};
  const auto r = rig.run(s, {0, 1, 2, 3});
  EXPECT_EQ(r.retained, (std::vector<int>{0, 1}));
  EXPECT_EQ(r.dropped_outside, (std::vector<int>{2, 3}));
  EXPECT_TRUE(r.dropped_inside.empty());
}

TEST(Retention, WiderPolygonNeverDropsMore) {
  Rng rng(5);
  const RetentionRig narrow(deg2rad(20.0));
  const RetentionRig wide(deg2rad(-20.0));
  for (int k = 0; k < 200; ++k) {
    Scene s;
    std::vector<int> ids;
    for (int i = 0; i < 6; ++i) {
      s.items.push_back(narrow.at(i, rng.uniform(-0.02, 0.02), rng.uniform(-0.02, 0.02)));
      ids.push_back(i);
    }
    const auto a = narrow.run(s, ids);
    const auto b = wide.run(s, ids);
    for (int id : a.retained) {
      EXPECT_TRUE(std::find(b.retained.begin(), b.retained.end(), id) != b.retained.end());
    }
  }
}

TEST(SceneJson, RoundTrip) {
  const SceneParams p;
  for (auto type : {ObjectType::Lime, ObjectType::Pickle}) {
    const Scene s = populate({type, Density::Full, 3}, p);
    const Scene back = scene_from_json(nlohmann::json::parse(scene_to_json(s).dump()));
    EXPECT_TRUE(back == s);
  }
}

TEST(SceneJson, DuplicateIdsRejected) {
  const SceneParams p;
  auto j = scene_to_json(populate({ObjectType::Pickle, Density::SparseSingle, 3}, p));
  j["items"][1]["id"] = j["items"][0]["id"];
  try {
    scene_from_json(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaError);
  }
}
