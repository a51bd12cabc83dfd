#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pickbench/config.hpp"
#include "pickbench/csv.hpp"
#include "pickbench/error.hpp"
#include "pickbench/executor.hpp"
#include "pickbench/fileio.hpp"
#include "pickbench/humanbench.hpp"
#include "pickbench/kpi.hpp"
#include "pickbench/records_io.hpp"
#include "pickbench/scene_io.hpp"

namespace fs = std::filesystem;
using namespace pickbench;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct RunOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string scenario;
  std::optional<int> reps;
  std::string out;
};

struct SceneOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string scenario;
  int rep = 1;
  std::string out;
};

struct ReplayOptions {
  std::string snapshot;
  std::string config;
  std::string out = "out";
};

struct KpiOptions {
  std::string trials;
  std::string human;
  std::string config;
  std::string out = "out";
};

// Restricts the matrix to the levels named in "key=value,key=value".
void apply_filter(MatrixSpec& m, const std::string& filter) {
  if (filter.empty()) return;
  for (const auto& item : csv::split(filter)) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigError, "scenario filter entry '" + item + "' lacks '='");
    }
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      if (key == "object") {
        m.objects = {parse_object(value)};
      } else if (key == "pick") {
        m.picks = {parse_pick(value)};
      } else if (key == "angle") {
        m.angles_deg = {std::stoi(value)};
      } else if (key == "config") {
        m.configs = {parse_spread(value)};
      } else {
        throw Error(ErrorCode::ConfigError, "unknown scenario filter key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw Error(ErrorCode::ConfigError, "bad angle '" + value + "'");
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConfigError) throw;
      throw Error(ErrorCode::ConfigError, e.what());
    }
  }
}

std::string format_summary(const KpiReport& r) {
  std::ostringstream os;
  os << "trials " << r.counts.trials << ", reached grasping " << r.counts.reached_grasping
     << ", successes " << r.counts.successes << ", items placed " << r.counts.items_placed << "\n";
  if (r.all) os << "TPH " << one_decimal(r.all->tph) << ", UPH " << one_decimal(r.all->uph) << "\n";
  if (r.single) os << "UPH single " << one_decimal(r.single->uph) << "\n";
  if (r.multi) os << "UPH multi " << one_decimal(r.multi->uph) << "\n";
  if (r.success.rate) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * *r.success.rate);
    os << "success rate " << buf << " %\n";
  }
  if (r.phases && r.phases->discrepancy) {
    os << "note: sum of phase means " << csv::number(r.phases->sum_of_means)
       << " s differs from the reference total " << csv::number(r.phases->reference_total)
       << " s by >= 0.05 s\n";
  }
  return os.str();
}

int cmd_run(const RunOptions& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.jobs) cfg.jobs = *o.jobs;
  if (o.reps) cfg.matrix.repetitions = *o.reps;
  if (!o.out.empty()) cfg.output_dir = o.out;
  apply_filter(cfg.matrix, o.scenario);
  cfg.validate();

  const auto records = run_matrix(cfg);
  std::ostringstream trials_csv;
  write_trials_csv(trials_csv, records);
  // The report is computed from the serialized rows so that re-running the
  // kpi command on trials.csv reproduces it exactly.
  std::istringstream reread(trials_csv.str());
  const auto report = compute_report(read_trials_csv(reread), cfg.reference);

  const fs::path dir = cfg.output_dir;
  auto files = report_files(report, dir);
  files.emplace_back(dir / "trials.csv", trials_csv.str());
  files.emplace_back(dir / "trials.json", trials_to_json(records).dump() + "\n");
  files.emplace_back(dir / "config.json", config_to_json(cfg).dump(2) + "\n");
  write_files(files);
  std::cout << format_summary(report) << "wrote " << files.size() << " files to " << dir.string()
            << "\n";
  return 0;
}

// Writes the scene of exactly one scenario cell, with the cell itself.
int cmd_scene(const SceneOptions& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (o.seed) cfg.master_seed = *o.seed;
  cfg.matrix.repetitions = o.rep;
  apply_filter(cfg.matrix, o.scenario);
  cfg.validate();
  const auto cells = enumerate(cfg.matrix, cfg.master_seed);
  std::vector<ScenarioSpec> picked;
  for (const auto& c : cells) {
    if (c.repetition == o.rep) picked.push_back(c);
  }
  if (picked.size() != 1) {
    throw Error(ErrorCode::ConfigError, "--scenario must name one cell (object, pick, angle, config); " +
                                            std::to_string(picked.size()) + " match");
  }
  const nlohmann::json doc{{"scenario", scenario_to_json(picked[0])},
                           {"scene", scene_to_json(scenario_scene(picked[0], cfg))}};
  write_files({{fs::path(o.out), doc.dump(2) + "\n"}});
  std::cout << "wrote " << o.out << "\n";
  return 0;
}

int cmd_replay(const ReplayOptions& o) {
  const RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  cfg.validate();
  ScenarioSpec spec;
  Scene scene;
  try {
    const auto doc = nlohmann::json::parse(read_text(o.snapshot));
    spec = scenario_from_json(doc.at("scenario"));
    scene = scene_from_json(doc.at("scene"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("snapshot: ") + e.what());
  }
  const std::vector<TrialRecord> records{run_trial_on_scene(spec, scene, cfg)};
  std::ostringstream csv_out;
  write_trials_csv(csv_out, records);
  const fs::path dir = o.out;
  write_files({{dir / "trials.csv", csv_out.str()},
               {dir / "trials.json", trials_to_json(records).dump() + "\n"}});
  const auto& r = records[0];
  std::cout << to_string(r.outcome) << ", captured " << r.items_captured << ", placed "
            << r.items_placed << "\n";
  return 0;
}

int cmd_kpi(const KpiOptions& o) {
  const RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  std::istringstream trials(read_text(o.trials));
  const auto records = read_trials_csv(trials);
  const auto report = compute_report(records, cfg.reference);

  const fs::path dir = o.out;
  auto files = report_files(report, dir);
  std::optional<HumanSummary> human;
  if (!o.human.empty()) {
    std::istringstream in(read_text(o.human));
    const auto humans = ingest(in);
    human = summarize(humans);
    files.emplace_back(dir / "human_summary.json", summary_to_json(*human).dump(2) + "\n");
  }
  const auto comparison = compare(human, report);
  files.emplace_back(dir / "comparison.csv", comparison_csv(comparison));
  write_files(files);
  std::cout << format_summary(report);
  if (human) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "human uph ratio %.2f, picks reduction %.2f\n", human->uph_ratio,
                  human->picks_reduction);
    std::cout << buf;
  } else {
    std::cerr << comparison.diagnostic << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and KPI tool for multi-item produce picking"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run the scenario matrix and write trials and report");
  run_cmd->add_option("--config", run.config, "Run config JSON")->envname("PICKBENCH_CONFIG");
  run_cmd->add_option("--seed", run.seed, "Master seed")->envname("PICKBENCH_SEED");
  run_cmd->add_option("--jobs", run.jobs, "Worker threads")->envname("PICKBENCH_JOBS");
  run_cmd->add_option("--scenario", run.scenario,
                      "Filter, e.g. object=pickle,pick=single,angle=90,config=concentric")
      ->envname("PICKBENCH_SCENARIO");
  run_cmd->add_option("--reps", run.reps, "Repetitions per cell")->envname("PICKBENCH_REPS");
  run_cmd->add_option("--out", run.out, "Output directory")->envname("PICKBENCH_OUT");

  KpiOptions kpi;
  auto* kpi_cmd = app.add_subcommand("kpi", "Recompute the KPI report from a trial CSV");
  kpi_cmd->add_option("trials", kpi.trials, "trials.csv")->required();
  kpi_cmd->add_option("--human", kpi.human, "Human-trial CSV")->envname("PICKBENCH_HUMAN");
  kpi_cmd->add_option("--config", kpi.config, "Config supplying reference values")
      ->envname("PICKBENCH_CONFIG");
  kpi_cmd->add_option("--out", kpi.out, "Output directory")->envname("PICKBENCH_OUT");

  SceneOptions scene;
  auto* scene_cmd = app.add_subcommand("scene", "Write the scene snapshot of one scenario cell");
  scene_cmd->add_option("--config", scene.config, "Run config JSON")->envname("PICKBENCH_CONFIG");
  scene_cmd->add_option("--seed", scene.seed, "Master seed")->envname("PICKBENCH_SEED");
  scene_cmd->add_option("--scenario", scene.scenario, "Filter naming one cell")
      ->required()
      ->envname("PICKBENCH_SCENARIO");
  scene_cmd->add_option("--rep", scene.rep, "Repetition")->check(CLI::PositiveNumber);
  scene_cmd->add_option("--out", scene.out, "Snapshot JSON path")->required();

  ReplayOptions replay;
  auto* replay_cmd = app.add_subcommand("replay", "Run one trial on a scene snapshot");
  replay_cmd->add_option("snapshot", replay.snapshot, "Snapshot JSON")->required();
  replay_cmd->add_option("--config", replay.config, "Run config JSON")->envname("PICKBENCH_CONFIG");
  replay_cmd->add_option("--out", replay.out, "Output directory")->envname("PICKBENCH_OUT");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(run);
    if (scene_cmd->parsed()) return cmd_scene(scene);
    if (replay_cmd->parsed()) return cmd_replay(replay);
    return cmd_kpi(kpi);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::IoFailure ? kExitIo : kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
