#include "pickbench/humanbench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pickbench/csv.hpp"
#include "pickbench/error.hpp"

namespace pickbench {

namespace {

constexpr std::array<std::pair<ProduceType, std::string_view>, 8> kProduce{{
    {ProduceType::BrusselsSprouts, "brussels_sprouts"},
    {ProduceType::ShallotOnions, "shallot_onions"},
    {ProduceType::Strawberries, "strawberries"},
    {ProduceType::SweetPeppers, "sweet_peppers"},
    {ProduceType::Mandarins, "mandarins"},
    {ProduceType::ButtonMushrooms, "button_mushrooms"},
    {ProduceType::BabyCarrots, "baby_carrots"},
    {ProduceType::PlumTomatoes, "plum_tomatoes"},
}};

const std::vector<std::string>& human_header() {
  static const std::vector<std::string> h{"participant",      "item_type",     "mode",
                                          "strategy",         "picks_per_punnet",
                                          "punnet_time_s",    "wrist_rotation_max_deg"};
  return h;
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string_view to_string(ProduceType t) {
  for (const auto& [k, name] : kProduce) {
    if (k == t) return name;
  }
  return "?";
}

std::string_view to_string(DemoMode m) { return m == DemoMode::Natural ? "Natural" : "SinglePick"; }

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::ScoopWide: return "ScoopWide";
    case Strategy::ScoopPlusSingle: return "ScoopPlusSingle";
    case Strategy::MultiPinch: return "MultiPinch";
    case Strategy::Pinch: return "Pinch";
  }
  return "?";
}

ProduceType parse_produce(std::string_view s) {
  for (const auto& [k, name] : kProduce) {
    if (name == s) return k;
  }
  throw Error(ErrorCode::SchemaError, "unknown item type '" + std::string(s) + "'");
}

DemoMode parse_mode(std::string_view s) {
  if (s == "Natural") return DemoMode::Natural;
  if (s == "SinglePick") return DemoMode::SinglePick;
  throw Error(ErrorCode::SchemaError, "unknown mode '" + std::string(s) + "'");
}

Strategy parse_strategy(std::string_view s) {
  for (auto k : kStrategies) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::SchemaError, "unknown strategy '" + std::string(s) + "'");
}

void HumanTrial::validate() const {
  if (participant.empty()) throw Error(ErrorCode::InvariantViolation, "participant id is empty");
  if (picks_per_punnet < 2 || picks_per_punnet > 12) {
    throw Error(ErrorCode::InvariantViolation,
                "picks_per_punnet " + std::to_string(picks_per_punnet) + " outside [2, 12]");
  }
  if (mode == DemoMode::SinglePick && strategy != Strategy::Pinch) {
    throw Error(ErrorCode::InvariantViolation, "SinglePick trials must use the Pinch strategy");
  }
  if (!(punnet_time_s > 0.0) || !std::isfinite(punnet_time_s)) {
    throw Error(ErrorCode::InvariantViolation, "punnet_time_s must be positive");
  }
  if (!(wrist_rotation_max_deg >= 0.0 && wrist_rotation_max_deg <= 180.0)) {
    throw Error(ErrorCode::InvariantViolation, "wrist_rotation_max_deg outside [0, 180]");
  }
}

std::vector<HumanTrial> ingest(std::istream& is) {
  const auto& header = human_header();
  const auto table = csv::read(is, header);
  std::vector<HumanTrial> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    const auto line = table.line_numbers[i];
    HumanTrial t;
    try {
      t.participant = f[0];
      t.item_type = parse_produce(f[1]);
      t.mode = parse_mode(f[2]);
      t.strategy = parse_strategy(f[3]);
      t.picks_per_punnet = static_cast<int>(csv::to_int(f[4], header[4], line));
      t.punnet_time_s = csv::to_double(f[5], header[5], line);
      t.wrist_rotation_max_deg = csv::to_double(f[6], header[6], line);
      t.validate();
    } catch (const Error& e) {
      const std::string msg = e.what();
      if (msg.find("row ") != std::string::npos) throw;
      throw Error(e.code(), "row " + std::to_string(line) + ": " + msg);
    }
    out.push_back(std::move(t));
  }
  return out;
}

void export_trials(std::ostream& os, std::span<const HumanTrial> trials) {
  os << csv::join(human_header()) << '\n';
  for (const auto& t : trials) {
    os << csv::join({t.participant, std::string(to_string(t.item_type)),
                     std::string(to_string(t.mode)), std::string(to_string(t.strategy)),
                     std::to_string(t.picks_per_punnet), shortest(t.punnet_time_s),
                     shortest(t.wrist_rotation_max_deg)})
       << '\n';
  }
}

HumanSummary summarize(std::span<const HumanTrial> trials) {
  HumanSummary s;
  std::array<int, kStrategies.size()> counts{};
  double picks_nat = 0.0;
  double picks_single = 0.0;
  s.wrist_rotation_min_deg = std::numeric_limits<double>::infinity();
  s.wrist_rotation_max_deg = -std::numeric_limits<double>::infinity();
  for (const auto& t : trials) {
    ModeStats& m = t.mode == DemoMode::Natural ? s.natural : s.single;
    ++m.trials;
    m.total_time_s += t.punnet_time_s;
    (t.mode == DemoMode::Natural ? picks_nat : picks_single) += t.picks_per_punnet;
    if (t.mode == DemoMode::Natural) ++counts[static_cast<int>(t.strategy)];
    s.wrist_rotation_min_deg = std::min(s.wrist_rotation_min_deg, t.wrist_rotation_max_deg);
    s.wrist_rotation_max_deg = std::max(s.wrist_rotation_max_deg, t.wrist_rotation_max_deg);
  }
  if (s.natural.trials == 0) throw Error(ErrorCode::EmptyMode, "no Natural trials");
  if (s.single.trials == 0) throw Error(ErrorCode::EmptyMode, "no SinglePick trials");
  for (std::size_t k = 0; k < counts.size(); ++k) {
    s.strategy_distribution[k] = static_cast<double>(counts[k]) / s.natural.trials;
  }
  for (ModeStats* m : {&s.natural, &s.single}) m->uph = m->trials / (m->total_time_s / 3600.0);
  s.natural.mean_picks = picks_nat / s.natural.trials;
  s.single.mean_picks = picks_single / s.single.trials;
  s.uph_ratio = s.natural.uph / s.single.uph;
  s.picks_reduction = 1.0 - s.natural.mean_picks / s.single.mean_picks;
  return s;
}

nlohmann::json summary_to_json(const HumanSummary& s) {
  nlohmann::json dist;
  for (std::size_t k = 0; k < kStrategies.size(); ++k) {
    dist[std::string(to_string(kStrategies[k]))] = s.strategy_distribution[k];
  }
  auto mode = [](const ModeStats& m) {
    return nlohmann::json{{"trials", m.trials},
                          {"total_time_s", m.total_time_s},
                          {"uph", m.uph},
                          {"mean_picks_per_punnet", m.mean_picks}};
  };
  return {{"strategy_distribution", dist},
          {"natural", mode(s.natural)},
          {"single_pick", mode(s.single)},
          {"uph_ratio", s.uph_ratio},
          {"picks_reduction", s.picks_reduction},
          {"wrist_rotation_deg", {s.wrist_rotation_min_deg, s.wrist_rotation_max_deg}}};
}

Comparison compare(const std::optional<HumanSummary>& human, const KpiReport& robot) {
  Comparison c;
  auto uph = [](const std::optional<Throughput>& t) -> std::optional<double> {
    if (!t) return std::nullopt;
    return t->uph;
  };
  const auto single = uph(robot.single);
  const auto multi = uph(robot.multi);
  std::optional<double> ratio;
  if (single && multi && *single > 0.0) ratio = *multi / *single;

  auto picks_per_unit = [&](const std::string& level) -> std::optional<double> {
    for (const auto& row : robot.breakdown) {
      if (row.factor == "pick" && row.level == level && row.count.items_placed > 0) {
        return static_cast<double>(row.count.attempts) / row.count.items_placed;
      }
    }
    return std::nullopt;
  };

  std::optional<double> h_single, h_multi, h_ratio, h_picks_single, h_picks_multi, h_reduction;
  if (human) {
    h_single = human->single.uph;
    h_multi = human->natural.uph;
    h_ratio = human->uph_ratio;
    h_picks_single = human->single.mean_picks;
    h_picks_multi = human->natural.mean_picks;
    h_reduction = human->picks_reduction;
  } else {
    c.diagnostic = "no human data supplied; human columns omitted";
  }
  c.rows = {
      {"uph_single_item", single, h_single},
      {"uph_multi_item", multi, h_multi},
      {"multi_vs_single_uph_ratio", ratio, h_ratio},
      {"picks_per_unit_single", picks_per_unit("single"), std::nullopt},
      {"picks_per_unit_multi", picks_per_unit("multi"), std::nullopt},
      {"picks_per_punnet_single", std::nullopt, h_picks_single},
      {"picks_per_punnet_multi", std::nullopt, h_picks_multi},
      {"picks_reduction", std::nullopt, h_reduction},
  };
  return c;
}

std::string comparison_csv(const Comparison& c) {
  std::ostringstream os;
  const bool with_human = c.diagnostic.empty();
  os << (with_human ? "metric,robot,human\n" : "metric,robot\n");
  for (const auto& row : c.rows) {
    if (!with_human && !row.robot) continue;
    os << row.metric << ',' << (row.robot ? csv::number(*row.robot) : "");
    if (with_human) os << ',' << (row.human ? csv::number(*row.human) : "");
    os << '\n';
  }
  return os.str();
}

}  // namespace pickbench
