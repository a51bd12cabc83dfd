#include "pickbench/kpi.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pickbench/csv.hpp"
#include "pickbench/error.hpp"
#include "pickbench/fileio.hpp"

namespace pickbench {

using nlohmann::json;

namespace {

bool reached_grasping(const TrialRecord& r) { return r.outcome != Outcome::SystemFailure; }

double active_time(std::span<const TrialRecord> records) {
  double t = 0.0;
  for (const auto& r : records) t += r.active_time();
  return t;
}

}  // namespace

PhaseMeans phase_means(std::span<const TrialRecord> records, double reference_total) {
  if (records.empty()) throw Error(ErrorCode::EmptyInput, "no records");
  PhaseMeans out;
  std::array<double, kPhaseCount> sums{};
  for (const auto& r : records) {
    for (int p = 0; p < kPhaseCount; ++p) {
      if (!r.phase_durations[p]) continue;
      sums[p] += *r.phase_durations[p];
      ++out.counts[p];
    }
  }
  for (int p = 0; p < kPhaseCount; ++p) {
    if (out.counts[p] == 0) continue;
    out.means[p] = sums[p] / out.counts[p];
    out.sum_of_means += *out.means[p];
  }
  out.mean_trial_total = active_time(records) / static_cast<double>(records.size());
  out.reference_total = reference_total;
  out.discrepancy = std::abs(out.sum_of_means - reference_total) >= 0.05 - 1e-12;
  return out;
}

Throughput throughput(std::span<const TrialRecord> records) {
  const double t = active_time(records);
  if (!(t > 0.0)) throw Error(ErrorCode::ZeroTime, "no active time in the records");
  Throughput out;
  out.active_time_s = t;
  const double hours = t / 3600.0;
  int successes = 0;
  int items = 0;
  for (const auto& r : records) {
    if (r.outcome == Outcome::Success) ++successes;
    items += r.items_placed;
  }
  out.tph = successes / hours;
  out.uph = items / hours;
  return out;
}

SuccessCount success_rate(std::span<const TrialRecord> records) {
  SuccessCount out;
  for (const auto& r : records) {
    if (!reached_grasping(r)) continue;
    ++out.attempts;
    if (r.outcome == Outcome::Success) ++out.successes;
    out.items_placed += r.items_placed;
  }
  if (out.attempts > 0) out.rate = static_cast<double>(out.successes) / out.attempts;
  return out;
}

std::vector<FactorRow> factor_breakdown(std::span<const TrialRecord> records) {
  std::vector<FactorRow> out;
  auto add = [&](const std::string& factor, const std::string& level,
                 const std::function<bool(const ScenarioSpec&)>& match) {
    std::vector<TrialRecord> subset;
    for (const auto& r : records) {
      if (match(r.scenario)) subset.push_back(r);
    }
    if (!subset.empty()) out.push_back({factor, level, success_rate(subset)});
  };
  for (auto o : {ObjectType::Lime, ObjectType::Pickle}) {
    add("object", std::string(to_string(o)), [o](const ScenarioSpec& s) { return s.object_type == o; });
  }
  for (int a : {60, 75, 90}) {
    add("angle", std::to_string(a), [a](const ScenarioSpec& s) { return s.approach_angle_deg == a; });
  }
  for (auto p : {PickType::Single, PickType::Multi}) {
    add("pick", std::string(to_string(p)), [p](const ScenarioSpec& s) { return s.pick_type == p; });
  }
  for (auto c : {SpreadMode::Parallel, SpreadMode::Concentric}) {
    add("config", std::string(to_string(c)),
        [c](const ScenarioSpec& s) { return s.gripper_config == c; });
  }
  return out;
}

FailureBreakdown failure_breakdown(std::span<const TrialRecord> records) {
  FailureBreakdown out;
  for (const auto& r : records) {
    if (r.outcome == Outcome::GraspFailure) ++out.grasp;
    if (r.outcome == Outcome::DropFailure) ++out.drop;
  }
  const int total = out.grasp + out.drop;
  if (total > 0) {
    out.grasp_fraction = static_cast<double>(out.grasp) / total;
    out.drop_fraction = static_cast<double>(out.drop) / total;
  }
  return out;
}

KpiReport compute_report(std::span<const TrialRecord> records, const ReferenceValues& reference) {
  KpiReport out;
  out.reference_means = reference.phase_means_s;
  auto& c = out.counts;
  c.trials = static_cast<int>(records.size());
  std::vector<TrialRecord> single;
  std::vector<TrialRecord> multi;
  for (const auto& r : records) {
    switch (r.outcome) {
      case Outcome::Success: ++c.successes; break;
      case Outcome::GraspFailure: ++c.grasp_failures; break;
      case Outcome::DropFailure: ++c.drop_failures; break;
      case Outcome::SystemFailure: ++c.system_failures; break;
    }
    if (reached_grasping(r)) ++c.reached_grasping;
    c.items_placed += r.items_placed;
    (r.scenario.pick_type == PickType::Single ? single : multi).push_back(r);
  }
  c.active_time_s = active_time(records);
  if (!records.empty()) out.phases = phase_means(records, reference.phase_total_s);
  auto maybe = [](std::span<const TrialRecord> rs) -> std::optional<Throughput> {
    if (!(active_time(rs) > 0.0)) return std::nullopt;
    return throughput(rs);
  };
  out.all = maybe(records);
  out.single = maybe(single);
  out.multi = maybe(multi);
  out.success = success_rate(records);
  out.failures = failure_breakdown(records);
  out.breakdown = factor_breakdown(records);
  return out;
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_double(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json success_json(const SuccessCount& s) {
  return {{"successes", s.successes},
          {"attempts", s.attempts},
          {"items_placed", s.items_placed},
          {"rate", opt(s.rate)}};
}

SuccessCount success_from(const json& j) {
  SuccessCount s;
  s.successes = j.at("successes").get<int>();
  s.attempts = j.at("attempts").get<int>();
  s.items_placed = j.at("items_placed").get<int>();
  s.rate = opt_double(j.at("rate"));
  return s;
}

json throughput_json(const std::optional<Throughput>& t) {
  if (!t) return nullptr;
  return {{"tph", t->tph}, {"uph", t->uph}, {"active_time_s", t->active_time_s}};
}

std::optional<Throughput> throughput_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return Throughput{j.at("tph").get<double>(), j.at("uph").get<double>(),
                    j.at("active_time_s").get<double>()};
}

}  // namespace

json report_to_json(const KpiReport& r) {
  json j;
  const auto& c = r.counts;
  j["counts"] = {{"trials", c.trials},
                 {"reached_grasping", c.reached_grasping},
                 {"successes", c.successes},
                 {"grasp_failures", c.grasp_failures},
                 {"drop_failures", c.drop_failures},
                 {"system_failures", c.system_failures},
                 {"items_placed", c.items_placed},
                 {"active_time_s", c.active_time_s}};
  if (r.phases) {
    json means = json::array();
    for (const auto& m : r.phases->means) means.push_back(opt(m));
    j["phase_means"] = {{"means_s", means},
                        {"counts", r.phases->counts},
                        {"sum_of_means_s", r.phases->sum_of_means},
                        {"mean_trial_total_s", r.phases->mean_trial_total},
                        {"reference_total_s", r.phases->reference_total},
                        {"discrepancy", r.phases->discrepancy}};
  } else {
    j["phase_means"] = nullptr;
  }
  j["reference_means_s"] = r.reference_means;
  j["throughput"] = {{"all", throughput_json(r.all)},
                     {"single", throughput_json(r.single)},
                     {"multi", throughput_json(r.multi)}};
  j["success"] = success_json(r.success);
  j["failures"] = {{"grasp", r.failures.grasp},
                   {"drop", r.failures.drop},
                   {"grasp_fraction", opt(r.failures.grasp_fraction)},
                   {"drop_fraction", opt(r.failures.drop_fraction)}};
  json rows = json::array();
  for (const auto& row : r.breakdown) {
    rows.push_back({{"factor", row.factor}, {"level", row.level}, {"count", success_json(row.count)}});
  }
  j["breakdown"] = rows;
  return j;
}

KpiReport report_from_json(const json& j) {
  KpiReport r;
  try {
    const auto& c = j.at("counts");
    r.counts.trials = c.at("trials").get<int>();
    r.counts.reached_grasping = c.at("reached_grasping").get<int>();
    r.counts.successes = c.at("successes").get<int>();
    r.counts.grasp_failures = c.at("grasp_failures").get<int>();
    r.counts.drop_failures = c.at("drop_failures").get<int>();
    r.counts.system_failures = c.at("system_failures").get<int>();
    r.counts.items_placed = c.at("items_placed").get<int>();
    r.counts.active_time_s = c.at("active_time_s").get<double>();
    if (const auto& p = j.at("phase_means"); !p.is_null()) {
      PhaseMeans m;
      const auto& means = p.at("means_s");
      for (int i = 0; i < kPhaseCount; ++i) m.means[i] = opt_double(means.at(i));
      m.counts = p.at("counts").get<std::array<int, kPhaseCount>>();
      m.sum_of_means = p.at("sum_of_means_s").get<double>();
      m.mean_trial_total = p.at("mean_trial_total_s").get<double>();
      m.reference_total = p.at("reference_total_s").get<double>();
      m.discrepancy = p.at("discrepancy").get<bool>();
      r.phases = m;
    }
    r.reference_means = j.at("reference_means_s").get<std::array<double, kPhaseCount>>();
    const auto& t = j.at("throughput");
    r.all = throughput_from(t.at("all"));
    r.single = throughput_from(t.at("single"));
    r.multi = throughput_from(t.at("multi"));
    r.success = success_from(j.at("success"));
    const auto& f = j.at("failures");
    r.failures.grasp = f.at("grasp").get<int>();
    r.failures.drop = f.at("drop").get<int>();
    r.failures.grasp_fraction = opt_double(f.at("grasp_fraction"));
    r.failures.drop_fraction = opt_double(f.at("drop_fraction"));
    for (const auto& row : j.at("breakdown")) {
      r.breakdown.push_back({row.at("factor").get<std::string>(), row.at("level").get<std::string>(),
                             success_from(row.at("count"))});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("report JSON: ") + e.what());
  }
  return r;
}

std::string one_decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

namespace {

std::string num_or_empty(const std::optional<double>& v) { return v ? csv::number(*v) : ""; }

std::string phases_csv(const KpiReport& r) {
  std::ostringstream os;
  os << "phase,mean_s,reference_s,records\n";
  double ref_sum = 0.0;
  for (int p = 0; p < kPhaseCount; ++p) {
    ref_sum += r.reference_means[p];
    os << to_string(kPhases[p]) << ','
       << (r.phases ? num_or_empty(r.phases->means[p]) : "") << ','
       << csv::number(r.reference_means[p]) << ',' << (r.phases ? r.phases->counts[p] : 0) << '\n';
  }
  os << "Sum of means," << (r.phases ? csv::number(r.phases->sum_of_means) : "") << ','
     << csv::number(ref_sum) << ",\n";
  os << "Mean trial total," << (r.phases ? csv::number(r.phases->mean_trial_total) : "") << ','
     << (r.phases ? csv::number(r.phases->reference_total) : "") << ",\n";
  os << "Discrepancy flagged," << (r.phases && r.phases->discrepancy ? "yes" : "no") << ",,\n";
  return os.str();
}

std::string summary_csv(const KpiReport& r) {
  std::ostringstream os;
  os << "metric,value\n";
  os << "Total trials," << r.counts.trials << '\n';
  os << "Reached grasping," << r.counts.reached_grasping << '\n';
  os << "Successful trials," << r.counts.successes << '\n';
  os << "Placed items," << r.counts.items_placed << '\n';
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", r.counts.active_time_s);
  os << "Total time [s]," << buf << '\n';
  os << "TPH," << (r.all ? one_decimal(r.all->tph) : "") << '\n';
  os << "UPH," << (r.all ? one_decimal(r.all->uph) : "") << '\n';
  os << "UPH single," << (r.single ? one_decimal(r.single->uph) : "") << '\n';
  os << "UPH multi," << (r.multi ? one_decimal(r.multi->uph) : "") << '\n';
  if (r.success.rate) {
    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * *r.success.rate);
    os << "Success rate [%]," << buf << '\n';
  } else {
    os << "Success rate [%],\n";
  }
  return os.str();
}

std::string breakdown_csv(const KpiReport& r) {
  std::ostringstream os;
  os << "factor,level,attempts,successes,success_rate,items_placed\n";
  for (const auto& row : r.breakdown) {
    os << row.factor << ',' << row.level << ',' << row.count.attempts << ','
       << row.count.successes << ',' << num_or_empty(row.count.rate) << ','
       << row.count.items_placed << '\n';
  }
  return os.str();
}

std::string failures_csv(const KpiReport& r) {
  std::ostringstream os;
  os << "failure,count,fraction\n";
  os << "GraspFailure," << r.failures.grasp << ',' << num_or_empty(r.failures.grasp_fraction) << '\n';
  os << "DropFailure," << r.failures.drop << ',' << num_or_empty(r.failures.drop_fraction) << '\n';
  return os.str();
}

}  // namespace

std::vector<std::pair<std::filesystem::path, std::string>> report_files(
    const KpiReport& report, const std::filesystem::path& dir) {
  return {{dir / "report.json", report_to_json(report).dump(2) + "\n"},
          {dir / "phases.csv", phases_csv(report)},
          {dir / "summary.csv", summary_csv(report)},
          {dir / "breakdown.csv", breakdown_csv(report)},
          {dir / "failures.csv", failures_csv(report)}};
}

void export_report(const KpiReport& report, const std::filesystem::path& dir) {
  write_files(report_files(report, dir));
}

}  // namespace pickbench
