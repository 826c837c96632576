#pragma once

#include <cstdint>
#include <random>

namespace smoothcop {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// A node in a tree of independent random streams. Every replicate derives
// its own engine from (master seed, path of indices), so results never depend
// on how work is split across threads.
class SeedStreams {
 public:
  explicit SeedStreams(std::uint64_t master) : key_(splitmix64(master)) {}

  SeedStreams child(std::uint64_t index) const {
    if (constant_) return *this;
    return SeedStreams(Key{}, splitmix64(key_ ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
  }

  Rng engine() const { return Rng(key_); }
  std::uint64_t key() const { return key_; }

  // Every child is the same stream. Used to force identical resamples.
  static SeedStreams constant(std::uint64_t master) {
    SeedStreams s(master);
    s.constant_ = true;
    return s;
  }

 private:
  struct Key {};
  SeedStreams(Key, std::uint64_t key) : key_(key) {}
  std::uint64_t key_;
  bool constant_ = false;
};

inline double uniform01(Rng& rng) {
  // 53 random bits, strictly inside (0, 1).
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace smoothcop
