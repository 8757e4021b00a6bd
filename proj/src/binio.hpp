#pragma once

// Little-endian binary stream helpers shared by the network and checkpoint
// serializers. Byte order is pinned so files move between hosts.

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fogforge::binio {

inline void write_u64(std::ostream& os, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(buf), 8);
}

inline std::uint64_t read_u64(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  if (!is) throw std::runtime_error("truncated stream while reading u64");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

inline void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(buf), 4);
}

inline std::uint32_t read_u32(std::istream& is) {
  unsigned char buf[4];
  is.read(reinterpret_cast<char*>(buf), 4);
  if (!is) throw std::runtime_error("truncated stream while reading u32");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
  return v;
}

inline void write_u8(std::ostream& os, std::uint8_t v) {
  os.put(static_cast<char>(v));
}

inline std::uint8_t read_u8(std::istream& is) {
  const int c = is.get();
  if (c == std::istream::traits_type::eof()) {
    throw std::runtime_error("truncated stream while reading u8");
  }
  return static_cast<std::uint8_t>(c);
}

inline void write_f64(std::ostream& os, double d) {
  std::uint64_t bits;
  static_assert(sizeof bits == sizeof d);
  std::memcpy(&bits, &d, 8);
  write_u64(os, bits);
}

inline double read_f64(std::istream& is) {
  const std::uint64_t bits = read_u64(is);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

inline void write_vec(std::ostream& os, const std::vector<double>& v) {
  write_u64(os, v.size());
  for (double d : v) write_f64(os, d);
}

inline std::vector<double> read_vec(std::istream& is) {
  const std::uint64_t n = read_u64(is);
  if (n > (1ULL << 32)) throw std::runtime_error("implausible vector size in stream");
  std::vector<double> v(n);
  for (auto& d : v) d = read_f64(is);
  return v;
}

inline void write_str(std::ostream& os, const std::string& s) {
  write_u64(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_str(std::istream& is) {
  const std::uint64_t n = read_u64(is);
  if (n > (1ULL << 24)) throw std::runtime_error("implausible string size in stream");
  std::string s(n, '\0');
  is.read(s.data(), static_cast<std::streamsize>(n));
  if (!is) throw std::runtime_error("truncated stream while reading string");
  return s;
}

}  // namespace fogforge::binio
