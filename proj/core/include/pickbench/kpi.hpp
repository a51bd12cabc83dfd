#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pickbench/config.hpp"
#include "pickbench/protocol.hpp"

namespace pickbench {

struct PhaseMeans {
  std::array<std::optional<double>, kPhaseCount> means{};  // absent when no record reached the phase
  std::array<int, kPhaseCount> counts{};
  double sum_of_means = 0.0;
  double mean_trial_total = 0.0;  // mean active time per record
  double reference_total = 0.0;
  bool discrepancy = false;  // |sum_of_means - reference_total| >= 0.05 s

  bool operator==(const PhaseMeans&) const = default;
};

/// Throws EmptyInput on an empty list.
PhaseMeans phase_means(std::span<const TrialRecord> records, double reference_total);

struct Throughput {
  double tph = 0.0;
  double uph = 0.0;
  double active_time_s = 0.0;

  bool operator==(const Throughput&) const = default;
};

/// Throws ZeroTime when the records have no active time.
Throughput throughput(std::span<const TrialRecord> records);

struct SuccessCount {
  int successes = 0;
  int attempts = 0;  // records that reached grasping
  int items_placed = 0;
  std::optional<double> rate;  // absent without attempts

  bool operator==(const SuccessCount&) const = default;
};

SuccessCount success_rate(std::span<const TrialRecord> records);

struct FactorRow {
  std::string factor;  // object, angle, pick or config
  std::string level;
  SuccessCount count;

  bool operator==(const FactorRow&) const = default;
};

/// Per-level success counts for each of the four factors, levels in
/// enumeration order, only levels present in the records.
std::vector<FactorRow> factor_breakdown(std::span<const TrialRecord> records);

struct FailureBreakdown {
  int grasp = 0;
  int drop = 0;
  std::optional<double> grasp_fraction;  // both absent without process failures
  std::optional<double> drop_fraction;

  bool operator==(const FailureBreakdown&) const = default;
};

FailureBreakdown failure_breakdown(std::span<const TrialRecord> records);

struct KpiCounts {
  int trials = 0;
  int reached_grasping = 0;
  int successes = 0;
  int grasp_failures = 0;
  int drop_failures = 0;
  int system_failures = 0;
  int items_placed = 0;
  double active_time_s = 0.0;

  bool operator==(const KpiCounts&) const = default;
};

struct KpiReport {
  KpiCounts counts;
  std::optional<PhaseMeans> phases;
  std::array<double, kPhaseCount> reference_means{};
  std::optional<Throughput> all;
  std::optional<Throughput> single;
  std::optional<Throughput> multi;
  SuccessCount success;
  FailureBreakdown failures;
  std::vector<FactorRow> breakdown;

  bool operator==(const KpiReport&) const = default;
};

/// Aggregates everything; an empty list gives a report with zero counts.
KpiReport compute_report(std::span<const TrialRecord> records, const ReferenceValues& reference);

nlohmann::json report_to_json(const KpiReport& report);
KpiReport report_from_json(const nlohmann::json& j);

/// One decimal, as throughput is presented in tables.
std::string one_decimal(double v);

/// Contents of the report files, keyed by their path under `dir`.
std::vector<std::pair<std::filesystem::path, std::string>> report_files(
    const KpiReport& report, const std::filesystem::path& dir);

/// Writes report.json, phases.csv, summary.csv, breakdown.csv and
/// failures.csv into `dir`. Throws IoFailure.
void export_report(const KpiReport& report, const std::filesystem::path& dir);

}  // namespace pickbench
