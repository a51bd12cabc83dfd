#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "pickbench/config.hpp"
#include "pickbench/executor.hpp"
#include "pickbench/fileio.hpp"
#include "pickbench/kpi.hpp"
#include "pickbench/records_io.hpp"

using namespace pickbench;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status = -1;
  std::string out;
};

Result cli(const std::string& args) {
  const std::string cmd = std::string(PICKBENCH_CLI) + " " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[512];
  while (fgets(buf, sizeof buf, p)) r.out += buf;
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pickbench_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

int rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  int n = -1;  // header
  while (std::getline(in, line)) ++n;
  return n;
}

const std::string kFixture = PICKBENCH_DATA_DIR "/fixture_trials.csv";
const std::string kHuman = PICKBENCH_DATA_DIR "/human_synthetic.csv";

}  // namespace

TEST_F(CliTest, MalformedConfigLeavesNoOutput) {
  std::ofstream(path("bad.json")) << "{\"scene\": {\"fill_fraction\": ";
  const auto r = cli("run --config " + path("bad.json") + " --out " + path("out"));
  EXPECT_NE(r.status, 0);
  EXPECT_FALSE(fs::exists(path("out")));

  std::ofstream(path("unknown.json")) << "{\"gripperz\": {}}";
  EXPECT_NE(cli("run --config " + path("unknown.json") + " --out " + path("out")).status, 0);
  EXPECT_FALSE(fs::exists(path("out")));
}

TEST_F(CliTest, FilterWithOneRep) {
  const auto r = cli("run --scenario object=pickle,pick=single,angle=90,config=concentric --reps 1 --out " +
                     path("out"));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(rows(read_text(path("out/trials.csv"))), 1);
  for (const char* f : {"report.json", "phases.csv", "summary.csv", "breakdown.csv", "failures.csv",
                        "trials.json", "config.json"}) {
    EXPECT_TRUE(fs::exists(path("out") + "/" + f)) << f;
  }
}

TEST_F(CliTest, BadFilterRejected) {
  EXPECT_NE(cli("run --scenario colour=red --out " + path("out")).status, 0);
  EXPECT_NE(cli("run --scenario angle=45 --out " + path("out")).status, 0);
  EXPECT_FALSE(fs::exists(path("out")));
}

TEST_F(CliTest, KpiOnFixture) {
  const auto r = cli("kpi " + kFixture + " --out " + path("a"));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("TPH 47.9, UPH 65.5"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("success rate 65.08 %"), std::string::npos) << r.out;
  ASSERT_EQ(cli("kpi " + kFixture + " --out " + path("b")).status, 0);
  for (const char* f : {"report.json", "phases.csv", "summary.csv", "breakdown.csv", "failures.csv",
                        "comparison.csv"}) {
    EXPECT_EQ(read_text(path("a") + "/" + f), read_text(path("b") + "/" + f)) << f;
  }
}

TEST_F(CliTest, KpiWithHumanData) {
  const auto r = cli("kpi " + kFixture + " --human " + kHuman + " --out " + path("a"));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("human uph ratio 1.70"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(path("a/human_summary.json")));
  EXPECT_EQ(read_text(path("a/comparison.csv")).rfind("metric,robot,human\n", 0), 0u);
}

TEST_F(CliTest, KpiMissingFileIsIoError) {
  EXPECT_EQ(cli("kpi " + path("missing.csv") + " --out " + path("a")).status, 3);
}

TEST_F(CliTest, KpiOfRunMatchesInProcessReport) {
  ASSERT_EQ(cli("run --reps 2 --out " + path("run")).status, 0);
  ASSERT_EQ(cli("kpi " + path("run/trials.csv") + " --out " + path("kpi")).status, 0);
  EXPECT_EQ(read_text(path("run/report.json")), read_text(path("kpi/report.json")));

  RunConfig cfg;
  cfg.matrix.repetitions = 2;
  std::ostringstream csv;
  write_trials_csv(csv, run_matrix(cfg));
  EXPECT_EQ(read_text(path("run/trials.csv")), csv.str());
  std::istringstream in(csv.str());
  const auto report = compute_report(read_trials_csv(in), cfg.reference);
  EXPECT_EQ(nlohmann::json::parse(read_text(path("run/report.json"))), report_to_json(report));
}

TEST_F(CliTest, JobsDoNotChangeBytes) {
  ASSERT_EQ(cli("run --jobs 1 --reps 2 --out " + path("one")).status, 0);
  ASSERT_EQ(cli("run --jobs 4 --reps 2 --out " + path("four")).status, 0);
  for (const char* f : {"trials.csv", "trials.json", "report.json", "summary.csv"}) {
    EXPECT_EQ(read_text(path("one") + "/" + f), read_text(path("four") + "/" + f)) << f;
  }
}

TEST_F(CliTest, EnvironmentOverrides) {
  const std::string env = "PICKBENCH_REPS=1 PICKBENCH_SCENARIO=object=lime,pick=multi ";
  const std::string cmd = env + PICKBENCH_CLI + " run --out " + path("out") + " > /dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_EQ(rows(read_text(path("out/trials.csv"))), 6);
}

TEST_F(CliTest, SceneSnapshotReplaysTheSameTrial) {
  const std::string cell = "object=pickle,pick=multi,angle=75,config=concentric";
  ASSERT_EQ(cli("scene --scenario " + cell + " --rep 3 --out " + path("snap.json")).status, 0);
  ASSERT_EQ(cli("replay " + path("snap.json") + " --out " + path("replay")).status, 0);
  ASSERT_EQ(cli("run --scenario " + cell + " --out " + path("run")).status, 0);
  std::istringstream run_csv(read_text(path("run/trials.csv")));
  std::istringstream replay_csv(read_text(path("replay/trials.csv")));
  const auto all = read_trials_csv(run_csv);
  const auto one = read_trials_csv(replay_csv);
  ASSERT_EQ(one.size(), 1u);
  ASSERT_EQ(all.size(), 5u);
  EXPECT_TRUE(one[0].scenario == all[2].scenario);
  EXPECT_EQ(one[0].outcome, all[2].outcome);
  EXPECT_EQ(one[0].items_placed, all[2].items_placed);
  EXPECT_EQ(one[0].phase_durations, all[2].phase_durations);
}

TEST_F(CliTest, SceneNeedsOneCell) {
  EXPECT_NE(cli("scene --scenario object=pickle --out " + path("snap.json")).status, 0);
  EXPECT_FALSE(fs::exists(path("snap.json")));
}

TEST_F(CliTest, MissingSubcommand) { EXPECT_NE(cli("").status, 0); }
