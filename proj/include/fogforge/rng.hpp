#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace fogforge {

// splitmix64 finalizer; used to derive well-separated stream seeds.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t tag);

double exponential_from_u(double u, double scale);

// Deterministic random stream. std::mt19937_64 is bit-specified by the
// standard; all variate transforms are hand-rolled here because the
// <random> distributions are implementation-defined.
class RngStream {
 public:
  RngStream() : RngStream(0) {}
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Strictly inside (0, 1).
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("uniform: empty range");
    return lo + (hi - lo) * uniform01();
  }

  double exponential(double scale) { return exponential_from_u(uniform01(), scale); }

  // Unbiased draw from [0, n).
  std::uint32_t uniform_int(std::uint32_t n) {
    if (n == 0) throw std::invalid_argument("uniform_int: n == 0");
    const std::uint64_t n64 = n;
    const std::uint64_t rem = (0 - n64) % n64;  // 2^64 mod n
    std::uint64_t x = next_u64();
    while (x < rem) x = next_u64();
    return static_cast<std::uint32_t>(x % n64);
  }

  std::string serialize() const;
  static RngStream deserialize(const std::string& text);

  bool operator==(const RngStream& other) const { return engine_ == other.engine_; }

 private:
  std::mt19937_64 engine_;
};

// Stream tags so that topology, workload, agent init, exploration and buffer
// sampling never share randomness.
namespace stream {
inline constexpr std::uint64_t kTopology = 0x10;
inline constexpr std::uint64_t kWorkload = 0x20;
inline constexpr std::uint64_t kAgentInit = 0x30;
inline constexpr std::uint64_t kExploration = 0x40;
inline constexpr std::uint64_t kBufferSample = 0x50;
inline constexpr std::uint64_t kBaseline = 0x60;
}  // namespace stream

}  // namespace fogforge
