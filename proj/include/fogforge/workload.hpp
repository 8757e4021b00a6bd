#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fogforge/rng.hpp"
#include "fogforge/topology.hpp"

namespace fogforge {

struct WorkloadCategory {
  std::string label;
  double mean_instructions = 1.0;  // exponential mean
  double request_bytes = 1.0;      // cluster -> fog transfer size
  double response_bytes = 1.0;     // fog -> cluster transfer size

  bool operator==(const WorkloadCategory&) const = default;
};

void validate_categories(const std::vector<WorkloadCategory>& cats);

// Per-cluster arrival process: Poisson with mean inter-arrival beta, category
// drawn from mix (one weight per category, summing to 1).
struct GenerationConfig {
  double beta = 100.0;
  std::vector<double> mix;
};

void validate_generation(const GenerationConfig& cfg, std::size_t category_count);

double sample_interarrival(RngStream& rng, double beta);
std::size_t sample_category(RngStream& rng, const std::vector<double>& mix);
double sample_instructions(RngStream& rng, const WorkloadCategory& cat);

// One stream of job creations for a single source cluster. The draw order per
// creation is fixed (category, instructions, next gap) so traces are
// reproducible regardless of what the consumer does with the jobs.
class JobSource {
 public:
  JobSource(NodeId cluster, GenerationConfig cfg, const std::vector<WorkloadCategory>& cats,
            std::uint64_t seed);

  struct Creation {
    std::size_t category;
    double instructions;
    double next_gap;  // time until the following creation
  };

  NodeId cluster() const { return cluster_; }
  double first_gap();     // time from stream start to the first creation
  Creation next();        // attributes of the current creation + next gap

 private:
  NodeId cluster_;
  GenerationConfig cfg_;
  const std::vector<WorkloadCategory>* cats_;
  RngStream rng_;
};

}  // namespace fogforge
