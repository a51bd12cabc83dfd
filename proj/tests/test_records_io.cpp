#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pickbench/csv.hpp"
#include "pickbench/error.hpp"
#include "pickbench/executor.hpp"
#include "pickbench/fileio.hpp"
#include "pickbench/records_io.hpp"

using namespace pickbench;
namespace fs = std::filesystem;

namespace {

const std::string kHeader =
    "object,pick,angle_deg,config,repetition,seed,initialisation_s,approach_s,grasping_s,"
    "transport_s,placement_s,outcome,items_captured,items_placed,note\n";

ErrorCode read_code(const std::string& body) {
  std::istringstream in(kHeader + body);
  try {
    read_trials_csv(in);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoFailure;
}

std::vector<TrialRecord> some_records() {
  RunConfig cfg;
  cfg.matrix.objects = {ObjectType::Pickle};
  cfg.matrix.repetitions = 1;
  return run_matrix(cfg);
}

}  // namespace

TEST(Csv, NumberFormat) {
  EXPECT_EQ(csv::number(5.12), "5.12");
  EXPECT_EQ(csv::number(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(csv::number(0.0), "0");
}

TEST(TrialsCsv, RoundTripIsByteStable) {
  const auto rs = some_records();
  std::ostringstream a;
  write_trials_csv(a, rs);
  std::istringstream in(a.str());
  const auto back = read_trials_csv(in);
  ASSERT_EQ(back.size(), rs.size());
  std::ostringstream b;
  write_trials_csv(b, back);
  EXPECT_EQ(a.str(), b.str());
  for (size_t i = 0; i < rs.size(); ++i) {
    EXPECT_TRUE(back[i].scenario == rs[i].scenario);
    EXPECT_EQ(back[i].outcome, rs[i].outcome);
    EXPECT_EQ(back[i].items_placed, rs[i].items_placed);
  }
}

TEST(TrialsCsv, BadRowsCarryLineNumbers) {
  const std::string good = "lime,single,60,parallel,1,0,5.12,10.37,5.8,20.12,0.21,Success,1,1,x\n";
  std::istringstream in(kHeader + good + "lime,single,60,parallel,1,0,5,10,5,20,0.2,Maybe,1,1,x\n");
  try {
    read_trials_csv(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaError);
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos);
  }
}

TEST(TrialsCsv, InvariantsEnforced) {
  // Placed more than captured.
  EXPECT_EQ(read_code("lime,multi,60,parallel,1,0,5,10,5,20,0.2,Success,1,2,x\n"),
            ErrorCode::SchemaError);
  // Transport recorded after a skipped grasping phase.
  EXPECT_EQ(read_code("lime,multi,60,parallel,1,0,5,10,,20,0.2,Success,1,1,x\n"),
            ErrorCode::SchemaError);
  EXPECT_EQ(read_code("lime,multi,60,parallel,1,-3,5,10,5,20,0.2,Success,1,1,x\n"),
            ErrorCode::SchemaError);
}

TEST(TrialsCsv, WrongHeader) {
  std::istringstream in("a,b,c\n");
  EXPECT_THROW(read_trials_csv(in), Error);
}

TEST(TrialsJson, RoundTripKeepsTraces) {
  const auto rs = some_records();
  const auto back = trials_from_json(nlohmann::json::parse(trials_to_json(rs).dump()));
  ASSERT_EQ(back.size(), rs.size());
  for (size_t i = 0; i < rs.size(); ++i) EXPECT_TRUE(back[i] == rs[i]) << i;
}

TEST(ScenarioJson, RoundTrip) {
  ScenarioSpec s;
  s.object_type = ObjectType::Lime;
  s.pick_type = PickType::Multi;
  s.approach_angle_deg = 75;
  s.gripper_config = SpreadMode::Parallel;
  s.repetition = 4;
  s.seed = 18446744073709551557ull;
  EXPECT_TRUE(scenario_from_json(scenario_to_json(s)) == s);
}

TEST(FileIo, AllOrNothing) {
  const fs::path dir = fs::temp_directory_path() / "pickbench_fileio_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  // The second target's parent is a regular file, so the batch fails.
  std::ofstream(dir / "blocker") << "x";
  EXPECT_THROW(write_files({{dir / "a.txt", "a"}, {dir / "blocker" / "b.txt", "b"}}), Error);
  EXPECT_FALSE(fs::exists(dir / "a.txt"));
  write_files({{dir / "a.txt", "a"}});
  EXPECT_EQ(read_text(dir / "a.txt"), "a");
  fs::remove_all(dir);
}
