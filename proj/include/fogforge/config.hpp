#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fogforge/harness.hpp"
#include "fogforge/topology.hpp"

namespace fogforge {

struct TopologyConfig {
  std::string source = "desk";  // desk | generate | file
  int n = 12;                   // generate: vertex count
  int m = 1;                    // generate: edges per new vertex
  ResourceRanges ranges;
  std::string path;             // file: topology JSON location
};

// Full experiment description. Defaults give the small CI-sized profile; the
// bundled configs/full.json switches to the long schedule.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::size_t trials = 11;
  std::size_t jobs = 0;  // 0 = one worker per logical core
  std::string out_dir = "out";
  Representation representation = Representation::Parl;
  TopologyConfig topology;
  std::vector<WorkloadCategory> categories = desk_categories();
  std::vector<double> mix{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  AgentConfig agent;
  PhaseSchedule schedule = desk_schedule();
  std::vector<std::string> modes{"all"};
  std::string checkpoints = "first_seed";  // none | first_seed
};

// Parses and validates; unknown or ill-typed keys raise std::invalid_argument
// naming the full key path. Missing keys fall back to defaults.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Defaults-filled round-trippable echo of the configuration.
std::string config_to_json(const ExperimentConfig& cfg);

void validate_config(const ExperimentConfig& cfg);

// Realizes the topology source and assembles the environment.
EnvSetup build_env(const ExperimentConfig& cfg);

// Expands "all" / validates the mode list into concrete transfer modes.
std::vector<TransferMode> resolve_modes(const std::vector<std::string>& names);

}  // namespace fogforge
