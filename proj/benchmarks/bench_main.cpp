#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "pickbench/executor.hpp"
#include "pickbench/gripper.hpp"
#include "pickbench/kpi.hpp"
#include "pickbench/records_io.hpp"
#include "pickbench/scene.hpp"

using namespace pickbench;

namespace {

ScenarioSpec cell(ObjectType object, PickType pick) {
  ScenarioSpec s;
  s.object_type = object;
  s.pick_type = pick;
  s.approach_angle_deg = 90;
  s.gripper_config = SpreadMode::Concentric;
  s.repetition = 1;
  s.seed = 7;
  return s;
}

void BM_FingerFk(benchmark::State& state) {
  const FingerLinkage l;
  double flex = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(finger_fk(l, flex));
    flex = flex > 1.5 ? 0.0 : flex + 1e-3;
  }
}
BENCHMARK(BM_FingerFk);

void BM_CloseFingersOnPickles(benchmark::State& state) {
  const GripperConfig g;
  const SceneParams p;
  const Scene s = populate({ObjectType::Pickle, Density::Full, 3}, p);
  const Pose palm(Vec3(0, 0, 0.075), Quat(Eigen::AngleAxisd(std::numbers::pi, Vec3::UnitX())));
  const auto st = make_gripper(g, 1.0, g.flexion_open, palm);
  for (auto _ : state) benchmark::DoNotOptimize(close_fingers(g, st, s, g.max_steps, p.soft_overlap_fraction));
}
BENCHMARK(BM_CloseFingersOnPickles);

void BM_PopulateFull(benchmark::State& state) {
  const SceneParams p;
  const auto type = state.range(0) ? ObjectType::Lime : ObjectType::Pickle;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(populate({type, Density::Full, seed++}, p));
}
BENCHMARK(BM_PopulateFull)->Arg(0)->Arg(1);

void BM_RunTrial(benchmark::State& state) {
  const RunConfig cfg;
  const auto pick = state.range(0) ? PickType::Multi : PickType::Single;
  const auto spec = cell(ObjectType::Pickle, pick);
  for (auto _ : state) benchmark::DoNotOptimize(run_trial(spec, cfg));
}
BENCHMARK(BM_RunTrial)->Arg(0)->Arg(1);

void BM_RunMatrix(benchmark::State& state) {
  RunConfig cfg;
  cfg.jobs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_matrix(cfg));
}
BENCHMARK(BM_RunMatrix)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ComputeReport(benchmark::State& state) {
  std::ifstream in(PICKBENCH_DATA_DIR "/fixture_trials.csv");
  const auto rs = read_trials_csv(in);
  for (auto _ : state) benchmark::DoNotOptimize(compute_report(rs, ReferenceValues{}));
}
BENCHMARK(BM_ComputeReport);

}  // namespace

BENCHMARK_MAIN();
