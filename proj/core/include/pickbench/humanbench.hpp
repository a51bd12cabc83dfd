#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pickbench/kpi.hpp"

namespace pickbench {

enum class ProduceType {
  BrusselsSprouts,
  ShallotOnions,
  Strawberries,
  SweetPeppers,
  Mandarins,
  ButtonMushrooms,
  BabyCarrots,
  PlumTomatoes,
};

enum class DemoMode { Natural, SinglePick };
enum class Strategy { ScoopWide, ScoopPlusSingle, MultiPinch, Pinch };

constexpr std::array<Strategy, 4> kStrategies{Strategy::ScoopWide, Strategy::ScoopPlusSingle,
                                              Strategy::MultiPinch, Strategy::Pinch};

std::string_view to_string(ProduceType t);
std::string_view to_string(DemoMode m);
std::string_view to_string(Strategy s);
ProduceType parse_produce(std::string_view s);
DemoMode parse_mode(std::string_view s);
Strategy parse_strategy(std::string_view s);

struct HumanTrial {
  std::string participant;
  ProduceType item_type = ProduceType::Strawberries;
  DemoMode mode = DemoMode::Natural;
  Strategy strategy = Strategy::ScoopWide;
  int picks_per_punnet = 2;  // grasps needed to fill one punnet, 2..12
  double punnet_time_s = 0.0;
  double wrist_rotation_max_deg = 0.0;

  /// Throws InvariantViolation.
  void validate() const;
  bool operator==(const HumanTrial&) const = default;
};

/// Columns: participant,item_type,mode,strategy,picks_per_punnet,punnet_time_s,wrist_rotation_max_deg
std::vector<HumanTrial> ingest(std::istream& is);
void export_trials(std::ostream& os, std::span<const HumanTrial> trials);

struct ModeStats {
  int trials = 0;
  double total_time_s = 0.0;
  double uph = 0.0;  // punnets per hour
  double mean_picks = 0.0;

  bool operator==(const ModeStats&) const = default;
};

struct HumanSummary {
  std::array<double, kStrategies.size()> strategy_distribution{};  // Natural trials, kStrategies order
  ModeStats natural;
  ModeStats single;
  double uph_ratio = 0.0;        // natural / single
  double picks_reduction = 0.0;  // 1 - natural picks / single picks
  double wrist_rotation_min_deg = 0.0;
  double wrist_rotation_max_deg = 0.0;

  bool operator==(const HumanSummary&) const = default;
};

/// Throws EmptyMode unless both modes are present.
HumanSummary summarize(std::span<const HumanTrial> trials);

nlohmann::json summary_to_json(const HumanSummary& s);

struct ComparisonRow {
  std::string metric;
  std::optional<double> robot;
  std::optional<double> human;
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  std::string diagnostic;  // set when one side is missing
};

/// Multi-item vs single-item advantage side by side. Without human data the
/// human column stays empty and the diagnostic says why.
Comparison compare(const std::optional<HumanSummary>& human, const KpiReport& robot);

std::string comparison_csv(const Comparison& c);

}  // namespace pickbench
