#include "fogforge/workload.hpp"

#include <cmath>
#include <stdexcept>

namespace fogforge {

void validate_categories(const std::vector<WorkloadCategory>& cats) {
  if (cats.empty()) throw std::invalid_argument("workload: need at least one category");
  for (const auto& c : cats) {
    if (c.label.empty()) throw std::invalid_argument("workload: category label must be non-empty");
    if (!(c.mean_instructions > 0.0)) {
      throw std::invalid_argument("workload: mean_instructions must be positive");
    }
    if (!(c.request_bytes > 0.0) || !(c.response_bytes > 0.0)) {
      throw std::invalid_argument("workload: request/response bytes must be positive");
    }
  }
}

void validate_generation(const GenerationConfig& cfg, std::size_t category_count) {
  if (!(cfg.beta > 0.0)) throw std::invalid_argument("workload: beta must be positive");
  if (cfg.mix.size() != category_count) {
    throw std::invalid_argument("workload: mix must have one weight per category");
  }
  double sum = 0.0;
  for (double w : cfg.mix) {
    if (!(w >= 0.0)) throw std::invalid_argument("workload: mix weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("workload: mix weights must sum to 1");
  }
}

double sample_interarrival(RngStream& rng, double beta) {
  return rng.exponential(beta);
}

std::size_t sample_category(RngStream& rng, const std::vector<double>& mix) {
  if (mix.empty()) throw std::invalid_argument("sample_category: empty mix");
  const double u = rng.uniform01();
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < mix.size(); ++i) {
    if (mix[i] > 0.0) last_positive = i;
    cum += mix[i];
    if (u < cum) return i;
  }
  // u can only exceed the cumulative sum through rounding of the weights; any
  // such sliver belongs to the last category with positive weight.
  return last_positive;
}

double sample_instructions(RngStream& rng, const WorkloadCategory& cat) {
  return rng.exponential(cat.mean_instructions);
}

JobSource::JobSource(NodeId cluster, GenerationConfig cfg,
                     const std::vector<WorkloadCategory>& cats, std::uint64_t seed)
    : cluster_(cluster), cfg_(std::move(cfg)), cats_(&cats), rng_(seed) {
  validate_categories(cats);
  validate_generation(cfg_, cats.size());
}

double JobSource::first_gap() { return sample_interarrival(rng_, cfg_.beta); }

JobSource::Creation JobSource::next() {
  Creation c;
  c.category = sample_category(rng_, cfg_.mix);
  c.instructions = sample_instructions(rng_, (*cats_)[c.category]);
  c.next_gap = sample_interarrival(rng_, cfg_.beta);
  return c;
}

}  // namespace fogforge
