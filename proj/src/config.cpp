#include "fogforge/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fogforge {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr int kConfigFormatVersion = 1;

[[noreturn]] void fail(const std::string& path, const std::string& why) {
  throw std::invalid_argument("config: " + path + ": " + why);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
  }
}

template <typename T>
T get_as(const json& obj, const std::string& path, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail(path + "." + key, "wrong type");
  }
}

std::pair<double, double> get_range(const json& obj, const std::string& path, const char* key,
                                    std::pair<double, double> fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    fail(path + "." + key, "expected [lo, hi]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: malformed JSON: ") + e.what());
  }

  ExperimentConfig cfg;
  check_keys(j, "", {"format_version", "seed", "trials", "jobs", "out_dir", "representation",
                     "topology", "workload", "agent", "schedule", "modes", "checkpoints"});
  const int version = get_as<int>(j, "", "format_version", kConfigFormatVersion);
  if (version != kConfigFormatVersion) fail("format_version", "unsupported value");

  cfg.seed = get_as<std::uint64_t>(j, "", "seed", cfg.seed);
  cfg.trials = get_as<std::size_t>(j, "", "trials", cfg.trials);
  cfg.jobs = get_as<std::size_t>(j, "", "jobs", cfg.jobs);
  cfg.out_dir = get_as<std::string>(j, "", "out_dir", cfg.out_dir);
  cfg.representation =
      representation_from_name(get_as<std::string>(j, "", "representation", "parl"));
  cfg.checkpoints = get_as<std::string>(j, "", "checkpoints", cfg.checkpoints);
  cfg.modes = get_as<std::vector<std::string>>(j, "", "modes", cfg.modes);

  if (j.contains("topology")) {
    const auto& t = j.at("topology");
    check_keys(t, "topology", {"source", "n", "m", "ipt_range", "ram_range", "bw_range",
                               "pr_range", "path"});
    cfg.topology.source = get_as<std::string>(t, "topology", "source", cfg.topology.source);
    cfg.topology.n = get_as<int>(t, "topology", "n", cfg.topology.n);
    cfg.topology.m = get_as<int>(t, "topology", "m", cfg.topology.m);
    cfg.topology.path = get_as<std::string>(t, "topology", "path", cfg.topology.path);
    auto& r = cfg.topology.ranges;
    r.ipt = get_range(t, "topology", "ipt_range", r.ipt);
    const auto ram = get_range(t, "topology", "ram_range",
                               {static_cast<double>(r.ram.first),
                                static_cast<double>(r.ram.second)});
    r.ram = {static_cast<std::uint64_t>(ram.first), static_cast<std::uint64_t>(ram.second)};
    r.bw = get_range(t, "topology", "bw_range", r.bw);
    r.pr = get_range(t, "topology", "pr_range", r.pr);
  }

  if (j.contains("workload")) {
    const auto& w = j.at("workload");
    check_keys(w, "workload", {"categories", "mix"});
    if (w.contains("categories")) {
      if (!w.at("categories").is_array()) fail("workload.categories", "expected an array");
      cfg.categories.clear();
      std::size_t i = 0;
      for (const auto& jc : w.at("categories")) {
        const std::string path = "workload.categories[" + std::to_string(i++) + "]";
        check_keys(jc, path, {"label", "mean_instructions", "request_bytes", "response_bytes"});
        WorkloadCategory c;
        c.label = get_as<std::string>(jc, path, "label", "");
        c.mean_instructions = get_as<double>(jc, path, "mean_instructions", 0.0);
        c.request_bytes = get_as<double>(jc, path, "request_bytes", 0.0);
        c.response_bytes = get_as<double>(jc, path, "response_bytes", 0.0);
        cfg.categories.push_back(std::move(c));
      }
    }
    cfg.mix = get_as<std::vector<double>>(w, "workload", "mix", cfg.mix);
  }

  if (j.contains("agent")) {
    const auto& a = j.at("agent");
    check_keys(a, "agent",
               {"gamma", "learning_rate", "batch_size", "buffer_capacity", "target_sync_period",
                "train_every", "hidden_dims", "epsilon", "target_selects",
                "epsilon_resume_on_transfer"});
    auto& c = cfg.agent;
    c.gamma = get_as<double>(a, "agent", "gamma", c.gamma);
    c.learning_rate = get_as<double>(a, "agent", "learning_rate", c.learning_rate);
    c.batch_size = get_as<std::size_t>(a, "agent", "batch_size", c.batch_size);
    c.buffer_capacity = get_as<std::size_t>(a, "agent", "buffer_capacity", c.buffer_capacity);
    c.target_sync_period =
        get_as<std::uint64_t>(a, "agent", "target_sync_period", c.target_sync_period);
    c.train_every = get_as<std::uint64_t>(a, "agent", "train_every", c.train_every);
    c.hidden_dims = get_as<std::vector<std::size_t>>(a, "agent", "hidden_dims", c.hidden_dims);
    if (a.contains("epsilon")) {
      const auto& e = a.at("epsilon");
      check_keys(e, "agent.epsilon", {"start", "end", "decay_fraction"});
      c.epsilon.start = get_as<double>(e, "agent.epsilon", "start", c.epsilon.start);
      c.epsilon.end = get_as<double>(e, "agent.epsilon", "end", c.epsilon.end);
      c.epsilon.decay_fraction =
          get_as<double>(e, "agent.epsilon", "decay_fraction", c.epsilon.decay_fraction);
    }
    c.target_selects = get_as<bool>(a, "agent", "target_selects", c.target_selects);
    c.epsilon_resume_on_transfer =
        get_as<bool>(a, "agent", "epsilon_resume_on_transfer", c.epsilon_resume_on_transfer);
  }

  if (j.contains("schedule")) {
    const auto& s = j.at("schedule");
    check_keys(s, "schedule", {"phases"});
    if (s.contains("phases")) {
      if (!s.at("phases").is_array()) fail("schedule.phases", "expected an array");
      cfg.schedule.phases.clear();
      std::size_t i = 0;
      for (const auto& jp : s.at("phases")) {
        const std::string path = "schedule.phases[" + std::to_string(i++) + "]";
        check_keys(jp, path, {"beta", "train_steps", "train_episode_len", "inference_len"});
        PhaseSpec p;
        p.beta = get_as<double>(jp, path, "beta", p.beta);
        p.train_steps = get_as<std::uint64_t>(jp, path, "train_steps", p.train_steps);
        p.train_episode_len = get_as<double>(jp, path, "train_episode_len", p.train_episode_len);
        p.inference_len = get_as<double>(jp, path, "inference_len", p.inference_len);
        cfg.schedule.phases.push_back(p);
      }
    }
  }

  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.trials == 0) throw std::invalid_argument("config: trials: must be positive");
  if (cfg.topology.source != "desk" && cfg.topology.source != "generate" &&
      cfg.topology.source != "file") {
    throw std::invalid_argument("config: topology.source: must be desk, generate or file");
  }
  if (cfg.topology.source == "file" && cfg.topology.path.empty()) {
    throw std::invalid_argument("config: topology.path: required when source is file");
  }
  if (cfg.checkpoints != "none" && cfg.checkpoints != "first_seed") {
    throw std::invalid_argument("config: checkpoints: must be none or first_seed");
  }
  validate_categories(cfg.categories);
  GenerationConfig g;
  g.beta = 1.0;
  g.mix = cfg.mix;
  validate_generation(g, cfg.categories.size());
  validate_schedule(cfg.schedule);
  resolve_modes(cfg.modes);
  // Agent settings are validated on agent construction; fail early instead.
  if (!(cfg.agent.gamma >= 0.0 && cfg.agent.gamma <= 1.0)) {
    throw std::invalid_argument("config: agent.gamma: must lie in [0, 1]");
  }
  if (!(cfg.agent.learning_rate > 0.0)) {
    throw std::invalid_argument("config: agent.learning_rate: must be positive");
  }
  if (cfg.agent.batch_size == 0 || cfg.agent.buffer_capacity < cfg.agent.batch_size) {
    throw std::invalid_argument("config: agent: need batch_size >= 1 and buffer >= batch");
  }
  if (cfg.agent.target_sync_period == 0 || cfg.agent.train_every == 0) {
    throw std::invalid_argument("config: agent: periods must be positive");
  }
}

std::string config_to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["format_version"] = kConfigFormatVersion;
  j["seed"] = cfg.seed;
  j["trials"] = cfg.trials;
  j["jobs"] = cfg.jobs;
  j["out_dir"] = cfg.out_dir;
  j["representation"] = representation_name(cfg.representation);
  j["topology"] = {{"source", cfg.topology.source},
                   {"n", cfg.topology.n},
                   {"m", cfg.topology.m},
                   {"ipt_range", {cfg.topology.ranges.ipt.first, cfg.topology.ranges.ipt.second}},
                   {"ram_range", {cfg.topology.ranges.ram.first, cfg.topology.ranges.ram.second}},
                   {"bw_range", {cfg.topology.ranges.bw.first, cfg.topology.ranges.bw.second}},
                   {"pr_range", {cfg.topology.ranges.pr.first, cfg.topology.ranges.pr.second}},
                   {"path", cfg.topology.path}};
  j["workload"]["categories"] = ordered_json::array();
  for (const auto& c : cfg.categories) {
    j["workload"]["categories"].push_back({{"label", c.label},
                                           {"mean_instructions", c.mean_instructions},
                                           {"request_bytes", c.request_bytes},
                                           {"response_bytes", c.response_bytes}});
  }
  j["workload"]["mix"] = cfg.mix;
  j["agent"] = {{"gamma", cfg.agent.gamma},
                {"learning_rate", cfg.agent.learning_rate},
                {"batch_size", cfg.agent.batch_size},
                {"buffer_capacity", cfg.agent.buffer_capacity},
                {"target_sync_period", cfg.agent.target_sync_period},
                {"train_every", cfg.agent.train_every},
                {"hidden_dims", cfg.agent.hidden_dims},
                {"epsilon",
                 {{"start", cfg.agent.epsilon.start},
                  {"end", cfg.agent.epsilon.end},
                  {"decay_fraction", cfg.agent.epsilon.decay_fraction}}},
                {"target_selects", cfg.agent.target_selects},
                {"epsilon_resume_on_transfer", cfg.agent.epsilon_resume_on_transfer}};
  j["schedule"]["phases"] = ordered_json::array();
  for (const auto& p : cfg.schedule.phases) {
    j["schedule"]["phases"].push_back({{"beta", p.beta},
                                       {"train_steps", p.train_steps},
                                       {"train_episode_len", p.train_episode_len},
                                       {"inference_len", p.inference_len}});
  }
  j["modes"] = cfg.modes;
  j["checkpoints"] = cfg.checkpoints;
  return j.dump(2) + "\n";
}

EnvSetup build_env(const ExperimentConfig& cfg) {
  EnvSetup env;
  if (cfg.topology.source == "desk") {
    env.topology = make_desk_topology();
  } else if (cfg.topology.source == "generate") {
    env.topology = build_topology(cfg.seed, cfg.topology.n, cfg.topology.m, cfg.topology.ranges);
  } else {
    env.topology = load_topology(cfg.topology.path);
  }
  env.categories = cfg.categories;
  env.mix = cfg.mix;
  env.representation = cfg.representation;
  validate_env(env);
  return env;
}

std::vector<TransferMode> resolve_modes(const std::vector<std::string>& names) {
  if (names.empty()) throw std::invalid_argument("config: modes: must not be empty");
  std::vector<TransferMode> out;
  for (const auto& name : names) {
    if (name == "all") {
      for (TransferMode m : {TransferMode::Scratch, TransferMode::FirstOnly,
                             TransferMode::BufferOnly, TransferMode::WeightsOnly,
                             TransferMode::Full}) {
        out.push_back(m);
      }
      continue;
    }
    out.push_back(transfer_mode_from_name(name));
  }
  // Dedup preserving order so "all" plus an explicit mode stays sane.
  std::vector<TransferMode> dedup;
  for (TransferMode m : out) {
    bool seen = false;
    for (TransferMode d : dedup) seen = seen || d == m;
    if (!seen) dedup.push_back(m);
  }
  return dedup;
}

}  // namespace fogforge
