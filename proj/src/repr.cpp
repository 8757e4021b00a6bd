#include "fogforge/repr.hpp"

#include <algorithm>
#include <stdexcept>

namespace fogforge {

namespace {
// Halving is exact in binary floating point, so the invariant sum == 1 decays
// only through the additions; a periodic renormalization clears any residue
// long before it could matter.
constexpr std::uint64_t kRenormEvery = 10000;
}  // namespace

LoadDistribution::LoadDistribution(std::size_t clusters, std::size_t categories,
                                   std::size_t actions)
    : c_(clusters), w_(categories), a_(actions) {
  if (c_ == 0 || w_ == 0 || a_ == 0) {
    throw std::invalid_argument("LoadDistribution: all dimensions must be positive");
  }
  reset();
}

void LoadDistribution::reset() {
  flat_.assign(c_ * w_ * a_, 1.0 / static_cast<double>(c_ * w_ * a_));
  updates_ = 0;
}

std::size_t LoadDistribution::index(std::size_t c, std::size_t w, std::size_t a) const {
  if (c >= c_ || w >= w_ || a >= a_) {
    throw std::out_of_range("LoadDistribution: index out of range");
  }
  return (c * w_ + w) * a_ + a;
}

double LoadDistribution::at(std::size_t c, std::size_t w, std::size_t a) const {
  return flat_[index(c, w, a)];
}

void LoadDistribution::update(std::size_t c, std::size_t w, std::size_t a) {
  flat_[index(c, w, a)] += 1.0;
  for (double& v : flat_) v *= 0.5;
  ++updates_;
  if (updates_ % kRenormEvery == 0) {
    const double s = sum();
    for (double& v : flat_) v /= s;
  }
}

double LoadDistribution::sum() const {
  double s = 0.0;
  for (double v : flat_) s += v;
  return s;
}

std::vector<double> encode_state(std::size_t cluster, std::size_t category,
                                 const LoadDistribution& d) {
  if (cluster >= d.clusters() || category >= d.categories()) {
    throw std::out_of_range("encode_state: cluster or category out of range");
  }
  std::vector<double> s(d.clusters() + d.categories() + d.flat().size(), 0.0);
  s[cluster] = 1.0;
  s[d.clusters() + category] = 1.0;
  std::copy(d.flat().begin(), d.flat().end(), s.begin() + static_cast<std::ptrdiff_t>(
                                                  d.clusters() + d.categories()));
  return s;
}

double parl_reward(std::uint64_t q_prev, std::uint64_t q_now) {
  return static_cast<double>(q_prev) - static_cast<double>(q_now);
}

std::vector<double> plrl_state(std::span<const std::uint64_t> fog_queue_lengths) {
  std::vector<double> s(fog_queue_lengths.size(), 0.0);
  std::uint64_t total = 0;
  for (std::uint64_t q : fog_queue_lengths) total += q;
  if (total == 0) return s;
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = static_cast<double>(fog_queue_lengths[i]) / static_cast<double>(total);
  }
  return s;
}

double plrl_reward(std::uint64_t q_now) { return -static_cast<double>(q_now); }

}  // namespace fogforge
