#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace gwpath {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_name(std::string_view name) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

// Counter-based generator: output i is a keyed hash of i, so streams can be
// split by name or replica index without sharing state.
class Stream {
 public:
  using result_type = std::uint64_t;

  constexpr explicit Stream(std::uint64_t key) noexcept : key_(mix64(key ^ 0x6a09e667f3bcc909ULL)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    ++counter_;
    return mix64(key_ ^ mix64(counter_ * 0x9e3779b97f4a7c15ULL));
  }

  // Uniform on the open interval (0, 1).
  double uniform() noexcept { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

  Stream split(std::string_view name) const noexcept { return Stream(key_ ^ hash_name(name)); }
  Stream split(std::uint64_t index) const noexcept { return Stream(key_ + mix64(index + 0x3c6ef372fe94f82bULL)); }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t position() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Uniform integer in [0, bound) by multiply-shift with rejection.
inline std::uint64_t uniform_index(Stream& rng, std::uint64_t bound) noexcept {
  __extension__ using u128 = unsigned __int128;
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const u128 product = static_cast<u128>(rng()) * bound;
    if (static_cast<std::uint64_t>(product) >= threshold) return static_cast<std::uint64_t>(product >> 64);
  }
}

inline Stream make_stream(std::uint64_t seed, std::string_view name) { return Stream(seed).split(name); }

}  // namespace gwpath
