#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "pickbench/error.hpp"
#include "pickbench/humanbench.hpp"

using namespace pickbench;

namespace {

const char* kHeader =
    "participant,item_type,mode,strategy,picks_per_punnet,punnet_time_s,wrist_rotation_max_deg\n";

std::vector<HumanTrial> parse(const std::string& body) {
  std::istringstream in(kHeader + body);
  return ingest(in);
}

ErrorCode code_of(const std::string& body) {
  try {
    parse(body);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoFailure;  // sentinel: nothing thrown
}

std::vector<HumanTrial> bundled() {
  std::ifstream in(PICKBENCH_DATA_DIR "/human_synthetic.csv");
  return ingest(in);
}

}  // namespace

TEST(HumanIngest, ThreeRows) {
  const auto t = parse(
      "P1,strawberries,Natural,ScoopWide,3,20.5,30\n"
      "P1,strawberries,SinglePick,Pinch,10,35,12.5\n"
      "P2,mandarins,Natural,MultiPinch,4,22,33\n");
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[1].mode, DemoMode::SinglePick);
  EXPECT_EQ(t[2].item_type, ProduceType::Mandarins);
  EXPECT_EQ(t[2].picks_per_punnet, 4);
}

TEST(HumanIngest, PicksOutOfRange) {
  EXPECT_EQ(code_of("P1,strawberries,Natural,ScoopWide,15,20,30\n"), ErrorCode::InvariantViolation);
  EXPECT_EQ(code_of("P1,strawberries,Natural,ScoopWide,1,20,30\n"), ErrorCode::InvariantViolation);
}

TEST(HumanIngest, SinglePickMustPinch) {
  EXPECT_EQ(code_of("P1,strawberries,SinglePick,ScoopWide,10,20,30\n"),
            ErrorCode::InvariantViolation);
}

TEST(HumanIngest, SchemaErrors) {
  EXPECT_EQ(code_of("P1,apples,Natural,ScoopWide,3,20,30\n"), ErrorCode::SchemaError);
  EXPECT_EQ(code_of("P1,strawberries,Natural,ScoopWide,three,20,30\n"), ErrorCode::SchemaError);
  std::istringstream bad("a,b\n");
  EXPECT_THROW(ingest(bad), Error);
}

TEST(HumanSummary, IdenticalModesGiveUnitRatio) {
  const auto t = parse(
      "P1,strawberries,Natural,Pinch,5,30,10\n"
      "P1,strawberries,SinglePick,Pinch,5,30,10\n");
  const auto s = summarize(t);
  EXPECT_DOUBLE_EQ(s.uph_ratio, 1.0);
  EXPECT_DOUBLE_EQ(s.picks_reduction, 0.0);
}

TEST(HumanSummary, MissingModeThrows) {
  const auto t = parse("P1,strawberries,Natural,Pinch,5,30,10\n");
  try {
    summarize(t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyMode);
  }
}

TEST(HumanSummary, BundledGoldens) {
  const auto s = summarize(bundled());
  char buf[16];
  auto pct = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.1f", 100.0 * v);
    return std::string(buf);
  };
  EXPECT_EQ(pct(s.strategy_distribution[0]), "50.0");
  EXPECT_EQ(pct(s.strategy_distribution[1]), "29.2");
  EXPECT_EQ(pct(s.strategy_distribution[2]), "20.8");
  EXPECT_NEAR(s.uph_ratio, 1.70, 0.005);
  EXPECT_NEAR(s.picks_reduction, 0.68, 0.005);
}

TEST(HumanSummary, PermutationInvariant) {
  auto t = bundled();
  const auto a = summarize(t);
  std::mt19937 g(11);
  std::shuffle(t.begin(), t.end(), g);
  const auto b = summarize(t);
  EXPECT_EQ(a.strategy_distribution, b.strategy_distribution);
  EXPECT_NEAR(a.uph_ratio, b.uph_ratio, 1e-12);
  EXPECT_NEAR(a.picks_reduction, b.picks_reduction, 1e-12);
}

TEST(HumanExport, RoundTrip) {
  const auto t = bundled();
  std::stringstream ss;
  export_trials(ss, t);
  EXPECT_EQ(ingest(ss), t);
}

TEST(Compare, WithoutHumanData) {
  KpiReport robot;
  robot.single = Throughput{0.0, 50.0, 1.0};
  robot.multi = Throughput{0.0, 65.0, 1.0};
  const auto c = compare(std::nullopt, robot);
  EXPECT_FALSE(c.diagnostic.empty());
  ASSERT_TRUE(c.rows[2].robot);
  EXPECT_NEAR(*c.rows[2].robot, 1.30, 1e-12);
  for (const auto& row : c.rows) EXPECT_FALSE(row.human);
  EXPECT_EQ(comparison_csv(c).rfind("metric,robot\n", 0), 0u);
}

TEST(Compare, WithHumanData) {
  KpiReport robot;
  robot.single = Throughput{0.0, 50.0, 1.0};
  robot.multi = Throughput{0.0, 65.0, 1.0};
  const auto c = compare(summarize(bundled()), robot);
  EXPECT_TRUE(c.diagnostic.empty());
  ASSERT_TRUE(c.rows[2].human);
  EXPECT_NEAR(*c.rows[2].human, 1.70, 0.005);
}
