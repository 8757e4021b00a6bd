// fogforge: deterministic fog-network load-balancing experiments.
//
// Subcommands: topology, validate, lifelong, baseline, report.
// Exit codes: 0 success, 1 usage/config error, 2 validation failure,
// 3 runtime error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "fogforge/agent.hpp"
#include "fogforge/config.hpp"
#include "fogforge/harness.hpp"
#include "fogforge/log.hpp"
#include "fogforge/oracles.hpp"
#include "fogforge/topology.hpp"

namespace {

namespace fs = std::filesystem;
using namespace fogforge;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> jobs;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "Experiment config JSON");
  cmd->add_option("--seed", f.seed, "Base seed (overrides config)");
  cmd->add_option("--trials", f.trials, "Trial count (overrides config)");
  cmd->add_option("--jobs", f.jobs, "Worker threads (overrides config; 0 = cores)");
  cmd->add_option("--out", f.out_dir, "Output directory (overrides config)");
}

ExperimentConfig effective_config(const CommonFlags& f) {
  ExperimentConfig cfg =
      f.config_path.empty() ? ExperimentConfig{} : load_config(f.config_path);
  if (f.seed) cfg.seed = *f.seed;
  if (f.trials) cfg.trials = *f.trials;
  if (f.jobs) cfg.jobs = *f.jobs;
  if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
  validate_config(cfg);
  return cfg;
}

std::size_t resolve_jobs(std::size_t jobs) {
  if (jobs != 0) return jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("failed writing: " + path.string());
}

void write_result_files(const fs::path& out_dir, const ExperimentConfig& cfg,
                        const std::vector<TrialResult>& results) {
  fs::create_directories(out_dir);
  write_file(out_dir / "effective_config.json", config_to_json(cfg));
  {
    std::ofstream out(out_dir / "trials.csv", std::ios::binary);
    write_trials_csv(out, results);
  }
  {
    std::ofstream out(out_dir / "aggregate.csv", std::ios::binary);
    write_aggregate_csv(out, results);
  }
}

int cmd_topology(const CommonFlags& flags) {
  const ExperimentConfig cfg = effective_config(flags);
  const EnvSetup env = build_env(cfg);
  fs::create_directories(cfg.out_dir);
  const fs::path path = fs::path(cfg.out_dir) / "topology.json";
  save_topology(env.topology, path.string());
  // Round-trip as a self-check before reporting success.
  validate_topology(load_topology(path.string()));
  std::cout << "wrote " << path.string() << " (" << env.topology.nodes.size() << " nodes, "
            << env.topology.links.size() << " links, "
            << env.topology.fog_ids().size() << " fog)\n";
  return 0;
}

int cmd_validate(std::uint64_t seed) {
  std::vector<OracleReport> reports;
  for (double rho : {0.3, 0.5, 0.7}) {
    reports.push_back(mm1_oracle(rho, 2e5, 0.05, mix_seed(seed, 0x6d6d31)));
  }
  for (double beta : {100.0, 150.0, 200.0}) {
    reports.push_back(sampler_oracle(beta, 100000, 0.02, mix_seed(seed, 0x736d70)));
  }
  reports.push_back(vanishing_oracle(100000, 1e-9, mix_seed(seed, 0x766e)));
  reports.push_back(gradient_oracle(3, 1e-4, mix_seed(seed, 0x6764)));
  reports.push_back(telescoping_oracle(seed));

  bool all_ok = true;
  for (const auto& r : reports) {
    std::cout << (r.passed ? "ok   " : "FAIL ") << r.name << ": " << r.detail << "\n";
    all_ok = all_ok && r.passed;
  }
  std::cout << (all_ok ? "validate: all checks passed\n" : "validate: checks FAILED\n");
  return all_ok ? 0 : 2;
}

void write_loss_csv(const fs::path& path, const TrialResult& trial) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << "mode,phase,step,loss\n";
  for (const auto& p : trial.phases) {
    for (std::size_t i = 0; i < p.loss_curve.size(); ++i) {
      out << trial.label << ',' << p.phase << ',' << i << ','
          << format_double(p.loss_curve[i]) << '\n';
    }
  }
}

int cmd_lifelong(const CommonFlags& flags, const std::string& mode_arg) {
  ExperimentConfig cfg = effective_config(flags);
  if (!mode_arg.empty()) cfg.modes = {mode_arg};

  ExperimentPlan plan;
  plan.env = build_env(cfg);
  plan.schedule = cfg.schedule;
  plan.agent = cfg.agent;
  plan.modes = resolve_modes(cfg.modes);
  plan.seed_base = cfg.seed;
  plan.trials = cfg.trials;
  plan.jobs = resolve_jobs(cfg.jobs);

  const fs::path out_dir(cfg.out_dir);
  if (cfg.checkpoints == "first_seed") {
    fs::create_directories(out_dir / "checkpoints");
    plan.hooks.on_phase_done = [out_dir](const std::string& mode, int phase,
                                         const DdqlAgent& agent) {
      const fs::path path =
          out_dir / "checkpoints" / (mode + "_phase" + std::to_string(phase) + ".fgck");
      save_checkpoint(agent.to_checkpoint(), path.string());
    };
  }

  const auto results = run_experiment(plan);
  write_result_files(out_dir, cfg, results);
  save_topology(plan.env.topology, (out_dir / "topology.json").string());
  for (std::size_t m = 0; m < plan.modes.size(); ++m) {
    const TrialResult& first = results[m * plan.trials];
    write_loss_csv(out_dir / ("losses_" + first.label + ".csv"), first);
  }
  std::cout << "lifelong: " << plan.modes.size() << " mode(s) x " << plan.trials
            << " trial(s) -> " << (out_dir / "trials.csv").string() << "\n";
  return 0;
}

int cmd_baseline(const CommonFlags& flags, const std::string& policy_arg) {
  const ExperimentConfig cfg = effective_config(flags);
  const BaselinePolicy policy = baseline_policy_from_name(policy_arg);
  const EnvSetup env = build_env(cfg);

  std::vector<TrialResult> results;
  results.reserve(cfg.trials);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    results.push_back(run_baseline(env, cfg.schedule, policy, derive_trial_seed(cfg.seed, t)));
  }
  write_result_files(cfg.out_dir, cfg, results);
  std::cout << "baseline " << policy_arg << ": " << cfg.trials << " trial(s) -> "
            << (fs::path(cfg.out_dir) / "trials.csv").string() << "\n";
  return 0;
}

int cmd_report(const std::vector<std::string>& csv_paths, const std::string& out_dir,
               bool plot) {
  std::vector<TrialResult> all;
  for (const auto& path : csv_paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    auto part = parse_trials_csv(in);
    all.insert(all.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  fs::create_directories(out_dir);
  {
    std::ofstream out(fs::path(out_dir) / "aggregate.csv", std::ios::binary);
    write_aggregate_csv(out, all);
  }
  if (plot) {
    write_file(fs::path(out_dir) / "box_episode_return.svg",
               render_box_svg(all, "episode_return"));
    write_file(fs::path(out_dir) / "box_mean_exec_delay.svg",
               render_box_svg(all, "mean_exec_delay"));
  }
  std::cout << "report: " << all.size() << " trial rows -> "
            << (fs::path(out_dir) / "aggregate.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic fog-network load-balancing experiments"};
  app.require_subcommand(1);

  CommonFlags topo_flags;
  CLI::App* topo = app.add_subcommand("topology", "Generate and write the topology JSON");
  add_common(topo, topo_flags);

  std::uint64_t validate_seed = 1;
  CLI::App* validate = app.add_subcommand("validate", "Run the built-in oracle checks");
  validate->add_option("--seed", validate_seed, "Seed for the oracle runs");

  CommonFlags ll_flags;
  std::string mode_arg;
  CLI::App* lifelong = app.add_subcommand("lifelong", "Run the multi-phase transfer protocol");
  add_common(lifelong, ll_flags);
  lifelong->add_option("--mode", mode_arg, "scratch|first|buffer|weights|full|all")
      ->check(CLI::IsMember({"scratch", "first", "buffer", "weights", "full", "all"}));

  CommonFlags base_flags;
  std::string policy_arg;
  CLI::App* baseline = app.add_subcommand("baseline", "Run a non-learning reference policy");
  add_common(baseline, base_flags);
  baseline->add_option("--policy", policy_arg, "roundrobin|random|greedy")
      ->required()
      ->check(CLI::IsMember({"roundrobin", "random", "greedy"}));

  std::vector<std::string> report_csvs;
  std::string report_out = "out";
  bool report_plot = false;
  CLI::App* report = app.add_subcommand("report", "Aggregate per-trial CSVs into box stats");
  report->add_option("csvs", report_csvs, "Per-trial CSV files")->required();
  report->add_option("--out", report_out, "Output directory");
  report->add_flag("--plot", report_plot, "Also write SVG box plots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*topo) return cmd_topology(topo_flags);
    if (*validate) return cmd_validate(validate_seed);
    if (*lifelong) return cmd_lifelong(ll_flags, mode_arg);
    if (*baseline) return cmd_baseline(base_flags, policy_arg);
    if (*report) return cmd_report(report_csvs, report_out, report_plot);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
