#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "fogforge/agent.hpp"
#include "fogforge/repr.hpp"
#include "fogforge/sim.hpp"
#include "fogforge/topology.hpp"
#include "fogforge/transfer.hpp"
#include "fogforge/workload.hpp"

namespace fogforge {

enum class Representation { Parl, Plrl };

const char* representation_name(Representation r);
Representation representation_from_name(const std::string& s);

struct PhaseSpec {
  double beta = 200.0;              // mean inter-arrival per cluster
  std::uint64_t train_steps = 30000;
  double train_episode_len = 10000; // simulated time units per training episode
  double inference_len = 100000;    // simulated time units of the greedy episode
};

struct PhaseSchedule {
  std::vector<PhaseSpec> phases;
};

PhaseSchedule default_schedule();  // betas 200/150/100
void validate_schedule(const PhaseSchedule& s);

// Everything about the world that stays fixed across phases.
struct EnvSetup {
  FogTopology topology;
  std::vector<WorkloadCategory> categories;
  std::vector<double> mix;
  Representation representation = Representation::Parl;
};

void validate_env(const EnvSetup& env);
std::size_t state_dim(const EnvSetup& env);
std::size_t env_action_count(const EnvSetup& env);  // = number of fog nodes

// Small heterogeneous world (1 cloud, 3 fog at distinct speeds, 2 clusters)
// sized so a full mode matrix runs in minutes.
FogTopology make_desk_topology();
std::vector<WorkloadCategory> desk_categories();
EnvSetup make_desk_env();
PhaseSchedule desk_schedule();  // betas 200/150/35, short budgets

struct PhaseOutcome {
  int phase = 0;
  double beta = 0.0;
  double episode_return = 0.0;   // undiscounted reward sum over the inference episode
  double mean_exec_delay = 0.0;  // over jobs completed during inference
  std::uint64_t jobs_completed = 0;
  std::uint64_t q_first = 0, q_last = 0;  // total queued at first/last decision
  std::uint64_t inference_decisions = 0;
  std::vector<double> loss_curve;         // one entry per training step
  std::uint64_t train_decisions = 0;
};

struct TrialResult {
  std::string label;  // transfer mode or baseline policy name
  std::uint64_t seed = 0;
  std::vector<PhaseOutcome> phases;
};

struct TrainingPhaseResult {
  std::vector<double> losses;
  std::uint64_t decisions = 0;
};

// Trains in whole episodes until the phase budget of training steps is spent.
// The rolling load table d persists across episodes (and phases) by design.
TrainingPhaseResult run_training_phase(const EnvSetup& env, DdqlAgent& agent,
                                       LoadDistribution& d, const PhaseSpec& phase,
                                       std::uint64_t workload_seed, bool epsilon_resumed);

// Fresh queues, greedy policy, fixed horizon.
PhaseOutcome run_inference(const EnvSetup& env, const InferencePolicy& policy,
                           LoadDistribution& d, const PhaseSpec& phase, int phase_index,
                           std::uint64_t workload_seed);

struct LifelongHooks {
  // Called after each phase with the agent that finished it (post-training,
  // pre-transfer); used for checkpoint emission. May fire from parallel
  // worker threads, though never twice for the same (mode, phase).
  std::function<void(const std::string& mode, int phase, const DdqlAgent&)> on_phase_done;
};

TrialResult run_lifelong(const EnvSetup& env, const PhaseSchedule& schedule, TransferMode mode,
                         const AgentConfig& agent_cfg, std::uint64_t trial_seed,
                         const LifelongHooks& hooks = {});

enum class BaselinePolicy { RoundRobin, Random, GreedyMinQueue };

const char* baseline_policy_name(BaselinePolicy p);
BaselinePolicy baseline_policy_from_name(const std::string& s);

// One inference episode per phase with the same workload streams a lifelong
// run at the same trial seed would see; no training.
TrialResult run_baseline(const EnvSetup& env, const PhaseSchedule& schedule, BaselinePolicy policy,
                         std::uint64_t trial_seed);

// Tukey five-number summary. Hinges are the outward-rounded medians of the
// inclusive halves (lower-middle for the lower hinge, upper-middle for the
// upper); outliers lie beyond 1.5 * IQR from the hinges.
struct BoxStats {
  double min = 0.0;
  double lower_hinge = 0.0;
  double median = 0.0;
  double upper_hinge = 0.0;
  double max = 0.0;
  std::vector<double> outliers;
};

BoxStats aggregate_trials(std::vector<double> values);

std::uint64_t derive_trial_seed(std::uint64_t base, std::size_t trial_index);

struct ExperimentPlan {
  EnvSetup env;
  PhaseSchedule schedule;
  AgentConfig agent;
  std::vector<TransferMode> modes;
  std::uint64_t seed_base = 1;
  std::size_t trials = 11;
  std::size_t jobs = 1;
  LifelongHooks hooks;  // invoked only for the first trial of each mode
};

// modes x trials, deterministic result order regardless of jobs.
std::vector<TrialResult> run_experiment(const ExperimentPlan& plan);

std::string format_double(double v);  // round-trip-safe decimal (%.17g)
void write_trials_csv(std::ostream& out, const std::vector<TrialResult>& results);
void write_aggregate_csv(std::ostream& out, const std::vector<TrialResult>& results);
// Inverse of write_trials_csv (loss curves are not persisted there).
std::vector<TrialResult> parse_trials_csv(std::istream& in);

// Box-and-whisker SVG per metric from the same aggregation the CSV uses.
std::string render_box_svg(const std::vector<TrialResult>& results, const std::string& metric);

}  // namespace fogforge
