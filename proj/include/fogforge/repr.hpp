#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fogforge {

// Rolling picture of which actions served which (cluster, category) demands.
// Every update adds 1 to one cell and then halves all cells, so the table
// always sums to 1 and older decisions fade geometrically.
class LoadDistribution {
 public:
  LoadDistribution(std::size_t clusters, std::size_t categories, std::size_t actions);

  std::size_t clusters() const { return c_; }
  std::size_t categories() const { return w_; }
  std::size_t actions() const { return a_; }

  double at(std::size_t c, std::size_t w, std::size_t a) const;
  void update(std::size_t c, std::size_t w, std::size_t a);
  void reset();

  const std::vector<double>& flat() const { return flat_; }
  double sum() const;
  std::uint64_t update_count() const { return updates_; }

 private:
  std::size_t index(std::size_t c, std::size_t w, std::size_t a) const;

  std::size_t c_, w_, a_;
  std::vector<double> flat_;
  std::uint64_t updates_ = 0;
};

// one-hot(cluster) ++ one-hot(category) ++ d.flat()
std::vector<double> encode_state(std::size_t cluster, std::size_t category,
                                 const LoadDistribution& d);

// Reward is the drop in total queued jobs across the decision.
double parl_reward(std::uint64_t q_prev, std::uint64_t q_now);

// Baseline representation: per-node queue lengths normalized to sum 1
// (all zeros when nothing is queued), rewarded by the negated total.
std::vector<double> plrl_state(std::span<const std::uint64_t> fog_queue_lengths);
double plrl_reward(std::uint64_t q_now);

}  // namespace fogforge
