#include "fogforge/rng.hpp"

#include <cmath>
#include <sstream>

namespace fogforge {

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t tag) {
  std::uint64_t z = base + tag * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double exponential_from_u(double u, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("exponential: scale must be > 0");
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("exponential: u must be in (0,1)");
  return -scale * std::log(u);
}

std::string RngStream::serialize() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

RngStream RngStream::deserialize(const std::string& text) {
  RngStream s;
  std::istringstream is(text);
  is >> s.engine_;
  if (is.fail()) throw std::runtime_error("RngStream: malformed state string");
  return s;
}

}  // namespace fogforge
