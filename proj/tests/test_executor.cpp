#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "pickbench/error.hpp"
#include "pickbench/executor.hpp"
#include "pickbench/records_io.hpp"

using namespace pickbench;

namespace {

ScenarioSpec cell(ObjectType o, PickType p, int angle, SpreadMode c, std::uint64_t seed) {
  ScenarioSpec s;
  s.object_type = o;
  s.pick_type = p;
  s.approach_angle_deg = angle;
  s.gripper_config = c;
  s.seed = seed;
  return s;
}

std::string csv_of(const std::vector<TrialRecord>& r) {
  std::ostringstream os;
  write_trials_csv(os, r);
  return os.str();
}

}  // namespace

TEST(Plan, VerticalAtNinetyDegrees) {
  const RunConfig cfg;
  const auto s = cell(ObjectType::Pickle, PickType::Single, 90, SpreadMode::Concentric, 1);
  const auto plan = build_plan(s, scenario_scene(s, cfg), cfg);
  EXPECT_LT((plan.tool_axis - Vec3(0, 0, -1)).norm(), 1e-12);
}

TEST(Plan, SixtyDegreesTiltsThirty) {
  const RunConfig cfg;
  const auto s = cell(ObjectType::Pickle, PickType::Single, 60, SpreadMode::Concentric, 1);
  const auto plan = build_plan(s, scenario_scene(s, cfg), cfg);
  EXPECT_NEAR(rad2deg(std::acos(-plan.tool_axis.z())), 30.0, 1e-9);
  EXPECT_NEAR(rad2deg(tool_tilt(plan.approach_pose.orientation)), 30.0, 1e-9);
}

TEST(Plan, ShallowAngleIsCollisionRisk) {
  const RunConfig cfg;
  const auto s = cell(ObjectType::Pickle, PickType::Single, 45, SpreadMode::Concentric, 1);
  try {
    build_plan(s, scenario_scene(s, cfg), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CollisionRisk);
  }
}

TEST(Plan, ApproachPoseAimsAtTarget) {
  const RunConfig cfg;
  for (int a : {60, 75, 90}) {
    const auto s = cell(ObjectType::Lime, PickType::Multi, a, SpreadMode::Parallel, 3);
    const Scene scene = scenario_scene(s, cfg);
    const auto plan = build_plan(s, scene, cfg);
    const Vec3 to_target = scene.pick_pose.position - plan.approach_pose.position;
    EXPECT_NEAR(to_target.normalized().dot(plan.tool_axis), 1.0, 1e-12);
  }
}

TEST(Plan, SinglePicksUseParallelPairs) {
  EXPECT_EQ(effective_config(cell(ObjectType::Lime, PickType::Single, 90, SpreadMode::Concentric, 0)),
            SpreadMode::Parallel);
  EXPECT_EQ(effective_config(cell(ObjectType::Lime, PickType::Multi, 90, SpreadMode::Concentric, 0)),
            SpreadMode::Concentric);
}

TEST(Trial, SparsePickleSucceeds) {
  const RunConfig cfg;
  const auto s = cell(ObjectType::Pickle, PickType::Single, 90, SpreadMode::Concentric, 1);
  const auto r = run_trial(s, cfg);
  EXPECT_EQ(r.outcome, Outcome::Success) << r.note;
  EXPECT_EQ(r.items_placed, 1);
  for (const auto& d : r.phase_durations) EXPECT_TRUE(d.has_value());
}

TEST(Trial, DurationsFollowProtocol) {
  const RunConfig cfg;
  const auto s = cell(ObjectType::Pickle, PickType::Multi, 90, SpreadMode::Concentric, 4);
  const auto r = run_trial(s, cfg);
  ASSERT_TRUE(r.phase_durations[0] && r.phase_durations[1]);
  const auto& p = cfg.protocol;
  EXPECT_NEAR(*r.phase_durations[0], p.init_move_duration + p.init_overhead, 1e-12);
  EXPECT_NEAR(*r.phase_durations[1],
              p.approach_duration + cfg.gripper.opening_time() + p.approach_overhead, 1e-12);
  if (r.outcome == Outcome::Success || r.outcome == Outcome::DropFailure) {
    EXPECT_NEAR(*r.phase_durations[4], cfg.gripper.opening_time(), 1e-12);
  }
}

TEST(Trial, GraspFailureSkipsLaterPhases) {
  const RunConfig cfg;
  // Full lime crates leave no room for the fingers.
  const auto s = cell(ObjectType::Lime, PickType::Multi, 90, SpreadMode::Concentric, 2);
  const auto r = run_trial(s, cfg);
  ASSERT_EQ(r.outcome, Outcome::GraspFailure);
  EXPECT_FALSE(r.phase_durations[3]);
  EXPECT_FALSE(r.phase_durations[4]);
  EXPECT_EQ(r.items_placed, 0);
}

TEST(Trial, ErrorsBecomeSystemFailures) {
  RunConfig cfg;
  const auto s = cell(ObjectType::Pickle, PickType::Single, 45, SpreadMode::Concentric, 1);
  const auto r = run_trial(s, cfg);
  EXPECT_EQ(r.outcome, Outcome::SystemFailure);
  EXPECT_NE(r.note.find("CollisionRisk"), std::string::npos);
  EXPECT_EQ(r.note.find(','), std::string::npos);
}

TEST(Trial, Deterministic) {
  const RunConfig cfg;
  const auto s = cell(ObjectType::Pickle, PickType::Multi, 75, SpreadMode::Parallel, 9);
  EXPECT_TRUE(run_trial(s, cfg) == run_trial(s, cfg));
}

TEST(Trial, TraceEndsAtTrigger) {
  const RunConfig cfg;
  const auto s = cell(ObjectType::Pickle, PickType::Single, 90, SpreadMode::Parallel, 6);
  const Scene scene = scenario_scene(s, cfg);
  const auto plan = build_plan(s, scene, cfg);
  const auto g = simulate_grasp(s, scene, cfg, plan);
  ASSERT_FALSE(g.trace.empty());
  EXPECT_EQ(g.trigger.index, g.trace.size() - 1);
  EXPECT_EQ(g.ticks, g.trace.size());
}

TEST(Matrix, ShapeAndOrder) {
  RunConfig cfg;
  const auto all = run_matrix(cfg);
  EXPECT_EQ(all.size(), 120u);
  const auto cells = enumerate(cfg.matrix, cfg.master_seed);
  for (size_t i = 0; i < all.size(); ++i) EXPECT_TRUE(all[i].scenario == cells[i]);

  cfg.matrix.objects = {ObjectType::Pickle};
  const auto pickles = run_matrix(cfg);
  EXPECT_EQ(pickles.size(), 60u);
  // A cell's result does not depend on which other cells ran.
  for (const auto& r : pickles) {
    const auto it = std::find_if(all.begin(), all.end(),
                                 [&](const TrialRecord& a) { return a.scenario == r.scenario; });
    ASSERT_NE(it, all.end());
    EXPECT_TRUE(*it == r);
  }
}

TEST(Matrix, WorkerCountDoesNotChangeOutput) {
  RunConfig cfg;
  cfg.matrix.repetitions = 2;
  const std::string one = csv_of(run_matrix(cfg));
  cfg.jobs = 4;
  EXPECT_EQ(csv_of(run_matrix(cfg)), one);
}
