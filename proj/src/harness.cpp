#include "fogforge/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "fogforge/log.hpp"

namespace fogforge {

namespace {

// Seed-derivation tags. Workload streams depend only on (trial seed, phase)
// so every policy at the same trial sees the same arrival trace.
constexpr std::uint64_t kSeedTrial = 0x74726961;          // per-trial from base
constexpr std::uint64_t kSeedAgentFirst = 0x61673000;     // phase-1 agent
constexpr std::uint64_t kSeedPhaseFresh = 0x61673100;     // transfer re-inits
constexpr std::uint64_t kSeedWorkloadTrain = 0x776b7400;  // training arrivals
constexpr std::uint64_t kSeedWorkloadInfer = 0x776b6900;  // inference arrivals

std::uint64_t phase_seed(std::uint64_t trial_seed, std::uint64_t tag, int phase) {
  return mix_seed(mix_seed(trial_seed, tag), static_cast<std::uint64_t>(phase));
}

}  // namespace

const char* representation_name(Representation r) {
  return r == Representation::Parl ? "parl" : "plrl";
}

Representation representation_from_name(const std::string& s) {
  if (s == "parl") return Representation::Parl;
  if (s == "plrl") return Representation::Plrl;
  throw std::invalid_argument("unknown representation: " + s);
}

PhaseSchedule default_schedule() {
  PhaseSchedule s;
  s.phases = {PhaseSpec{200.0, 30000, 10000.0, 100000.0},
              PhaseSpec{150.0, 30000, 10000.0, 100000.0},
              PhaseSpec{100.0, 30000, 10000.0, 100000.0}};
  return s;
}

PhaseSchedule desk_schedule() {
  PhaseSchedule s;
  // Interarrival scales shrink across phases so the final workload runs the
  // fog layer near capacity; that is where placement quality separates the
  // transfer modes instead of washing out in idle queues.
  s.phases = {PhaseSpec{200.0, 5000, 10000.0, 20000.0},
              PhaseSpec{150.0, 5000, 10000.0, 20000.0},
              PhaseSpec{35.0, 5000, 10000.0, 20000.0}};
  return s;
}

void validate_schedule(const PhaseSchedule& s) {
  if (s.phases.empty()) throw std::invalid_argument("schedule: need at least one phase");
  for (const auto& p : s.phases) {
    if (!(p.beta > 0.0)) throw std::invalid_argument("schedule: beta must be positive");
    if (!(p.train_episode_len > 0.0)) {
      throw std::invalid_argument("schedule: train_episode_len must be positive");
    }
    if (!(p.inference_len >= 0.0)) {
      throw std::invalid_argument("schedule: inference_len must be non-negative");
    }
  }
}

void validate_env(const EnvSetup& env) {
  validate_topology(env.topology);
  validate_categories(env.categories);
  GenerationConfig g;
  g.beta = 1.0;
  g.mix = env.mix;
  validate_generation(g, env.categories.size());
}

std::size_t env_action_count(const EnvSetup& env) { return env.topology.fog_ids().size(); }

std::size_t state_dim(const EnvSetup& env) {
  const std::size_t c = env.topology.cluster_ids().size();
  const std::size_t w = env.categories.size();
  const std::size_t a = env_action_count(env);
  if (env.representation == Representation::Parl) return c + w + c * w * a;
  return a;
}

FogTopology make_desk_topology() {
  FogTopology t;
  auto node = [](NodeId id, NodeRole role, double ipt) {
    return NodeSpec{id, role, ipt, 1ULL << 30};
  };
  t.nodes = {node(0, NodeRole::Cloud, 1000.0), node(1, NodeRole::Fog, 50.0),
             node(2, NodeRole::Fog, 100.0), node(3, NodeRole::Fog, 150.0),
             node(4, NodeRole::SourceCluster, 1.0), node(5, NodeRole::SourceCluster, 1.0)};
  auto link = [](NodeId a, NodeId b) { return LinkSpec{a, b, 1000.0, 1.0}; };
  t.links = {link(0, 1), link(0, 2), link(0, 3), link(1, 2), link(2, 3),
             link(1, 4), link(3, 5)};
  t.rebuild_adjacency();
  validate_topology(t);
  return t;
}

std::vector<WorkloadCategory> desk_categories() {
  return {WorkloadCategory{"light", 2000.0, 1000.0, 500.0},
          WorkloadCategory{"moderate", 4000.0, 1000.0, 500.0},
          WorkloadCategory{"heavy", 8000.0, 1000.0, 500.0}};
}

EnvSetup make_desk_env() {
  EnvSetup env;
  env.topology = make_desk_topology();
  env.categories = desk_categories();
  env.mix = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  env.representation = Representation::Parl;
  return env;
}

namespace {

// Shared decision-loop plumbing for training, inference and baselines.
struct EnvIndex {
  std::vector<NodeId> fog;                       // action index -> node id
  std::unordered_map<NodeId, std::size_t> cidx;  // cluster id -> dense index

  explicit EnvIndex(const EnvSetup& env) : fog(env.topology.fog_ids()) {
    const auto clusters = env.topology.cluster_ids();
    for (std::size_t i = 0; i < clusters.size(); ++i) cidx[clusters[i]] = i;
  }
};

std::vector<double> build_state(const EnvSetup& env, const EnvIndex& ix, const Job& job,
                                SimEngine& eng, const LoadDistribution& d) {
  if (env.representation == Representation::Parl) {
    return encode_state(ix.cidx.at(job.source_cluster), job.category, d);
  }
  std::vector<std::uint64_t> queues(ix.fog.size());
  for (std::size_t i = 0; i < queues.size(); ++i) queues[i] = eng.queued_at(ix.fog[i]);
  return plrl_state(queues);
}

double reward_of(const EnvSetup& env, std::uint64_t q_prev, std::uint64_t q_now) {
  return env.representation == Representation::Parl ? parl_reward(q_prev, q_now)
                                                    : plrl_reward(q_now);
}

}  // namespace

TrainingPhaseResult run_training_phase(const EnvSetup& env, DdqlAgent& agent,
                                       LoadDistribution& d, const PhaseSpec& phase,
                                       std::uint64_t workload_seed, bool epsilon_resumed) {
  validate_env(env);
  const EnvIndex ix(env);
  if (agent.action_count() != ix.fog.size() || agent.state_dim() != state_dim(env)) {
    throw std::invalid_argument("run_training_phase: agent shape does not match environment");
  }

  TrainingPhaseResult result;
  if (phase.train_steps == 0) return result;

  GenerationConfig gen{phase.beta, env.mix};
  SimEngine engine(env.topology, env.categories, gen, workload_seed);
  engine.set_keep_completed(false);

  const std::uint64_t steps_at_start = agent.training_steps();
  const auto& sched = agent.config().epsilon;
  bool prev_valid = false;
  std::vector<double> prev_s;
  int prev_action = 0;
  std::uint64_t prev_episode = 0;
  std::uint64_t q_prev = 0;
  std::uint64_t episode = 0;

  const auto decide = [&](const Job& job, SimEngine& eng) -> NodeId {
    const std::uint64_t q_now = eng.total_queued();
    std::vector<double> s_now = build_state(env, ix, job, eng, d);
    if (prev_valid) {
      agent.observe(Transition{std::move(prev_s), prev_action,
                               reward_of(env, q_prev, q_now), s_now,
                               prev_episode != episode});
    }
    ++result.decisions;
    const std::uint64_t done = agent.training_steps() - steps_at_start;
    if (result.decisions % agent.config().train_every == 0 && done < phase.train_steps) {
      if (auto loss = agent.train_step()) result.losses.push_back(*loss);
    }
    agent.set_epsilon(epsilon_resumed
                          ? sched.end
                          : sched.value(agent.training_steps() - steps_at_start,
                                        phase.train_steps));
    const int action = agent.select_action(s_now);
    if (env.representation == Representation::Parl) {
      d.update(ix.cidx.at(job.source_cluster), job.category,
               static_cast<std::size_t>(action));
    }
    prev_s = std::move(s_now);
    prev_action = action;
    prev_episode = episode;
    q_prev = q_now;
    prev_valid = true;
    return ix.fog[static_cast<std::size_t>(action)];
  };

  // Generous cap so a mis-specified schedule fails loudly instead of spinning.
  const double expected_decisions_per_episode =
      phase.train_episode_len / phase.beta * static_cast<double>(ix.cidx.size());
  const std::uint64_t expected_episodes = static_cast<std::uint64_t>(
      std::ceil(static_cast<double>(phase.train_steps * agent.config().train_every) /
                std::max(expected_decisions_per_episode, 1e-9)));
  const std::uint64_t max_episodes = 100 * expected_episodes + 1000;

  while (agent.training_steps() - steps_at_start < phase.train_steps) {
    engine.run_until(engine.now() + phase.train_episode_len, decide);
    ++episode;
    if (episode > max_episodes) {
      throw std::runtime_error("run_training_phase: budget unreachable with this schedule");
    }
  }
  return result;
}

namespace {

// Runs one fresh-queue episode, scoring whatever decision rule is supplied.
PhaseOutcome run_episode(const EnvSetup& env, const EnvIndex& ix, const PhaseSpec& phase,
                         int phase_index, std::uint64_t workload_seed,
                         const std::function<int(const Job&, SimEngine&)>& pick_action) {
  PhaseOutcome out;
  out.phase = phase_index;
  out.beta = phase.beta;

  GenerationConfig gen{phase.beta, env.mix};
  SimEngine engine(env.topology, env.categories, gen, workload_seed);
  engine.set_keep_completed(false);

  bool first_seen = false;
  bool prev_valid = false;
  std::uint64_t q_prev = 0;

  const auto decide = [&](const Job& job, SimEngine& eng) -> NodeId {
    const std::uint64_t q_now = eng.total_queued();
    if (!first_seen) {
      out.q_first = q_now;
      first_seen = true;
    }
    if (prev_valid) out.episode_return += reward_of(env, q_prev, q_now);
    out.q_last = q_now;
    q_prev = q_now;
    prev_valid = true;
    ++out.inference_decisions;
    const int action = pick_action(job, eng);
    return ix.fog[static_cast<std::size_t>(action)];
  };

  engine.run_until(phase.inference_len, decide);
  out.mean_exec_delay = engine.metrics().mean_exec_delay();
  out.jobs_completed = engine.metrics().jobs_completed;
  return out;
}

}  // namespace

PhaseOutcome run_inference(const EnvSetup& env, const InferencePolicy& policy,
                           LoadDistribution& d, const PhaseSpec& phase, int phase_index,
                           std::uint64_t workload_seed) {
  validate_env(env);
  const EnvIndex ix(env);
  return run_episode(env, ix, phase, phase_index, workload_seed,
                     [&](const Job& job, SimEngine& eng) {
                       const auto s = build_state(env, ix, job, eng, d);
                       const int action = policy.act(s);
                       if (env.representation == Representation::Parl) {
                         d.update(ix.cidx.at(job.source_cluster), job.category,
                                  static_cast<std::size_t>(action));
                       }
                       return action;
                     });
}

TrialResult run_lifelong(const EnvSetup& env, const PhaseSchedule& schedule, TransferMode mode,
                         const AgentConfig& agent_cfg, std::uint64_t trial_seed,
                         const LifelongHooks& hooks) {
  validate_env(env);
  validate_schedule(schedule);
  const EnvIndex ix(env);

  TrialResult trial;
  trial.label = transfer_mode_name(mode);
  trial.seed = trial_seed;

  LoadDistribution d(env.topology.cluster_ids().size(), env.categories.size(), ix.fog.size());
  DdqlAgent agent(agent_cfg, state_dim(env), ix.fog.size(),
                  mix_seed(trial_seed, kSeedAgentFirst));
  bool train_enabled = true;
  bool epsilon_resumed = false;

  for (int p = 0; p < static_cast<int>(schedule.phases.size()); ++p) {
    const PhaseSpec& phase = schedule.phases[static_cast<std::size_t>(p)];
    if (p > 0) {
      PhaseAgent next = initialize_phase_agent(mode, agent.to_checkpoint(),
                                               phase_seed(trial_seed, kSeedPhaseFresh, p));
      agent = std::move(next.agent);
      train_enabled = next.train_enabled;
      epsilon_resumed = next.epsilon_resumed;
      // The load table is part of what the weights learned against; it follows
      // them.
      if (resets_weights(mode)) d.reset();
    }

    TrainingPhaseResult training;
    if (train_enabled) {
      training = run_training_phase(env, agent, d, phase,
                                    phase_seed(trial_seed, kSeedWorkloadTrain, p),
                                    epsilon_resumed);
    }
    const InferencePolicy policy = agent.export_inference();
    PhaseOutcome out = run_inference(env, policy, d, phase, p,
                                     phase_seed(trial_seed, kSeedWorkloadInfer, p));
    out.loss_curve = std::move(training.losses);
    out.train_decisions = training.decisions;
    trial.phases.push_back(std::move(out));
    if (hooks.on_phase_done) hooks.on_phase_done(trial.label, p, agent);
  }
  return trial;
}

const char* baseline_policy_name(BaselinePolicy p) {
  switch (p) {
    case BaselinePolicy::RoundRobin: return "roundrobin";
    case BaselinePolicy::Random: return "random";
    case BaselinePolicy::GreedyMinQueue: return "greedy";
  }
  return "?";
}

BaselinePolicy baseline_policy_from_name(const std::string& s) {
  if (s == "roundrobin") return BaselinePolicy::RoundRobin;
  if (s == "random") return BaselinePolicy::Random;
  if (s == "greedy") return BaselinePolicy::GreedyMinQueue;
  throw std::invalid_argument("unknown baseline policy: " + s);
}

TrialResult run_baseline(const EnvSetup& env, const PhaseSchedule& schedule,
                         BaselinePolicy policy, std::uint64_t trial_seed) {
  validate_env(env);
  validate_schedule(schedule);
  const EnvIndex ix(env);

  TrialResult trial;
  trial.label = baseline_policy_name(policy);
  trial.seed = trial_seed;

  for (int p = 0; p < static_cast<int>(schedule.phases.size()); ++p) {
    const PhaseSpec& phase = schedule.phases[static_cast<std::size_t>(p)];
    std::size_t rr_next = 0;
    RngStream random_stream(phase_seed(trial_seed, stream::kBaseline, p));
    const auto pick = [&](const Job&, SimEngine& eng) -> int {
      switch (policy) {
        case BaselinePolicy::RoundRobin: {
          const int a = static_cast<int>(rr_next);
          rr_next = (rr_next + 1) % ix.fog.size();
          return a;
        }
        case BaselinePolicy::Random:
          return static_cast<int>(random_stream.uniform_int(ix.fog.size()));
        case BaselinePolicy::GreedyMinQueue: {
          int best = 0;
          std::uint64_t best_q = eng.queued_at(ix.fog[0]);
          for (std::size_t i = 1; i < ix.fog.size(); ++i) {
            const std::uint64_t q = eng.queued_at(ix.fog[i]);
            if (q < best_q) {
              best = static_cast<int>(i);
              best_q = q;
            }
          }
          return best;
        }
      }
      return 0;
    };
    trial.phases.push_back(run_episode(env, ix, phase, p,
                                       phase_seed(trial_seed, kSeedWorkloadInfer, p), pick));
  }
  return trial;
}

BoxStats aggregate_trials(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("aggregate_trials: need at least one value");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();

  BoxStats b;
  b.min = values.front();
  b.max = values.back();
  b.median = n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);

  // Inclusive halves share the middle element when n is odd; within a half, an
  // even count rounds outward (toward the extremes) rather than averaging.
  const std::size_t h = (n + 1) / 2;
  b.lower_hinge = h % 2 == 1 ? values[(h - 1) / 2] : values[h / 2 - 1];
  const std::size_t up = n - h;  // first index of the upper half
  b.upper_hinge = h % 2 == 1 ? values[up + (h - 1) / 2] : values[up + h / 2];

  const double iqr = b.upper_hinge - b.lower_hinge;
  const double lo = b.lower_hinge - 1.5 * iqr;
  const double hi = b.upper_hinge + 1.5 * iqr;
  for (double v : values) {
    if (v < lo || v > hi) b.outliers.push_back(v);
  }
  return b;
}

std::uint64_t derive_trial_seed(std::uint64_t base, std::size_t trial_index) {
  return mix_seed(mix_seed(base, kSeedTrial), trial_index);
}

std::vector<TrialResult> run_experiment(const ExperimentPlan& plan) {
  validate_env(plan.env);
  validate_schedule(plan.schedule);
  if (plan.modes.empty()) throw std::invalid_argument("run_experiment: no modes selected");
  if (plan.trials == 0) throw std::invalid_argument("run_experiment: trials must be positive");

  struct Task {
    TransferMode mode;
    std::size_t trial_index;
  };
  std::vector<Task> tasks;
  for (TransferMode mode : plan.modes) {
    for (std::size_t t = 0; t < plan.trials; ++t) tasks.push_back({mode, t});
  }
  std::vector<TrialResult> results(tasks.size());

  const std::size_t workers = std::max<std::size_t>(1, std::min(plan.jobs, tasks.size()));
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;

  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        const LifelongHooks& hooks =
            tasks[i].trial_index == 0 ? plan.hooks : LifelongHooks{};
        results[i] = run_lifelong(plan.env, plan.schedule, tasks[i].mode, plan.agent,
                                  derive_trial_seed(plan.seed_base, tasks[i].trial_index),
                                  hooks);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trials_csv(std::ostream& out, const std::vector<TrialResult>& results) {
  out << "mode,phase,beta,seed,episode_return,mean_exec_delay,jobs_completed\n";
  for (const auto& r : results) {
    for (const auto& p : r.phases) {
      out << r.label << ',' << p.phase << ',' << format_double(p.beta) << ',' << r.seed << ','
          << format_double(p.episode_return) << ',' << format_double(p.mean_exec_delay) << ','
          << p.jobs_completed << '\n';
    }
  }
}

std::vector<TrialResult> parse_trials_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      line != "mode,phase,beta,seed,episode_return,mean_exec_delay,jobs_completed") {
    throw std::invalid_argument("trials csv: unexpected header");
  }
  std::vector<TrialResult> results;
  std::map<std::pair<std::string, std::uint64_t>, std::size_t> where;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 7) {
      throw std::invalid_argument("trials csv: line " + std::to_string(lineno) +
                                  ": expected 7 fields");
    }
    try {
      PhaseOutcome p;
      p.phase = std::stoi(fields[1]);
      p.beta = std::stod(fields[2]);
      p.episode_return = std::stod(fields[4]);
      p.mean_exec_delay = std::stod(fields[5]);
      p.jobs_completed = std::stoull(fields[6]);
      const auto key = std::make_pair(fields[0], std::stoull(fields[3]));
      auto it = where.find(key);
      if (it == where.end()) {
        it = where.emplace(key, results.size()).first;
        results.push_back(TrialResult{key.first, key.second, {}});
      }
      results[it->second].phases.push_back(std::move(p));
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("trials csv: line " + std::to_string(lineno) +
                                  ": malformed number");
    }
  }
  return results;
}

namespace {

struct MetricSeries {
  std::vector<double> returns;
  std::vector<double> delays;
};

// (label, phase) -> values across trials, preserving first-seen label order.
std::vector<std::pair<std::pair<std::string, int>, MetricSeries>> group_results(
    const std::vector<TrialResult>& results) {
  std::vector<std::pair<std::pair<std::string, int>, MetricSeries>> groups;
  std::map<std::pair<std::string, int>, std::size_t> where;
  for (const auto& r : results) {
    for (const auto& p : r.phases) {
      const auto key = std::make_pair(r.label, p.phase);
      auto it = where.find(key);
      if (it == where.end()) {
        it = where.emplace(key, groups.size()).first;
        groups.emplace_back(key, MetricSeries{});
      }
      groups[it->second].second.returns.push_back(p.episode_return);
      groups[it->second].second.delays.push_back(p.mean_exec_delay);
    }
  }
  return groups;
}

void write_box_row(std::ostream& out, const std::string& label, int phase,
                   const char* metric, const BoxStats& b) {
  out << label << ',' << phase << ',' << metric << ',' << format_double(b.min) << ','
      << format_double(b.lower_hinge) << ',' << format_double(b.median) << ','
      << format_double(b.upper_hinge) << ',' << format_double(b.max) << ",\"";
  for (std::size_t i = 0; i < b.outliers.size(); ++i) {
    if (i) out << ';';
    out << format_double(b.outliers[i]);
  }
  out << "\"\n";
}

}  // namespace

void write_aggregate_csv(std::ostream& out, const std::vector<TrialResult>& results) {
  out << "mode,phase,metric,min,lower_hinge,median,upper_hinge,max,outliers\n";
  for (const auto& [key, series] : group_results(results)) {
    write_box_row(out, key.first, key.second, "episode_return",
                  aggregate_trials(series.returns));
    write_box_row(out, key.first, key.second, "mean_exec_delay",
                  aggregate_trials(series.delays));
  }
}

std::string render_box_svg(const std::vector<TrialResult>& results, const std::string& metric) {
  if (metric != "episode_return" && metric != "mean_exec_delay") {
    throw std::invalid_argument("render_box_svg: unknown metric: " + metric);
  }
  struct Box {
    std::string label;
    BoxStats stats;
  };
  std::vector<Box> boxes;
  double lo = 0.0, hi = 1.0;
  bool have_range = false;
  for (const auto& [key, series] : group_results(results)) {
    const auto& vals = metric == "episode_return" ? series.returns : series.delays;
    Box b{key.first + "/p" + std::to_string(key.second), aggregate_trials(vals)};
    if (!have_range) {
      lo = b.stats.min;
      hi = b.stats.max;
      have_range = true;
    } else {
      lo = std::min(lo, b.stats.min);
      hi = std::max(hi, b.stats.max);
    }
    boxes.push_back(std::move(b));
  }
  if (boxes.empty()) throw std::invalid_argument("render_box_svg: no results");
  if (hi <= lo) hi = lo + 1.0;

  const double plot_h = 320.0, pad = 48.0, slot = 72.0;
  const double width = pad * 2 + slot * static_cast<double>(boxes.size());
  const double height = plot_h + 2 * pad;
  const auto y_of = [&](double v) {
    return pad + (hi - v) / (hi - lo) * plot_h;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  svg << "  <style>text{font:11px sans-serif}line,rect{stroke:#335;fill:none}"
         "rect{fill:#cdf}</style>\n";
  svg << "  <text x=\"" << pad << "\" y=\"" << pad - 24 << "\">" << metric << "</text>\n";
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto& b = boxes[i].stats;
    const double cx = pad + slot * (static_cast<double>(i) + 0.5);
    const double half = 18.0;
    // Whiskers span the most extreme points within the outlier fences.
    double wlo = b.min, whi = b.max;
    if (!b.outliers.empty()) {
      const double iqr = b.upper_hinge - b.lower_hinge;
      wlo = std::max(b.min, b.lower_hinge - 1.5 * iqr);
      whi = std::min(b.max, b.upper_hinge + 1.5 * iqr);
    }
    svg << "  <line x1=\"" << cx << "\" y1=\"" << y_of(wlo) << "\" x2=\"" << cx << "\" y2=\""
        << y_of(b.lower_hinge) << "\"/>\n";
    svg << "  <line x1=\"" << cx << "\" y1=\"" << y_of(whi) << "\" x2=\"" << cx << "\" y2=\""
        << y_of(b.upper_hinge) << "\"/>\n";
    svg << "  <rect x=\"" << cx - half << "\" y=\"" << y_of(b.upper_hinge) << "\" width=\""
        << 2 * half << "\" height=\"" << y_of(b.lower_hinge) - y_of(b.upper_hinge) << "\"/>\n";
    svg << "  <line x1=\"" << cx - half << "\" y1=\"" << y_of(b.median) << "\" x2=\""
        << cx + half << "\" y2=\"" << y_of(b.median) << "\"/>\n";
    for (double o : boxes[i].stats.outliers) {
      svg << "  <circle cx=\"" << cx << "\" cy=\"" << y_of(o)
          << "\" r=\"2.5\" fill=\"#335\"/>\n";
    }
    svg << "  <text x=\"" << cx << "\" y=\"" << height - pad / 2
        << "\" text-anchor=\"middle\">" << boxes[i].label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace fogforge
