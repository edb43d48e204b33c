#pragma once

#include <cstdint>

namespace binrec::rng {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Hash of (seed, a, b, ...). Used both for per-entry matrix draws and for
/// deriving independent sub-seeds.
constexpr std::uint64_t derive(std::uint64_t seed) noexcept { return splitmix64(seed); }

template <typename... Rest>
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t first, Rest... rest) noexcept {
  return derive(splitmix64(splitmix64(seed) ^ first), static_cast<std::uint64_t>(rest)...);
}

/// Maps 64 random bits to the open interval (0, 1).
constexpr double unit_open(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Counter-based draws: each value is a pure function of (seed, i, j).
double sign_at(std::uint64_t seed, std::uint64_t i, std::uint64_t j) noexcept;
double normal_at(std::uint64_t seed, std::uint64_t i, std::uint64_t j) noexcept;
double uniform_at(std::uint64_t seed, std::uint64_t i, std::uint64_t j) noexcept;

/// Sequential SplitMix64 stream for draws whose order is fixed by the
/// algorithm (permutations, noise directions).
class Stream {
 public:
  explicit Stream(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    state_ += kGolden;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() noexcept { return unit_open(next()); }

  /// Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) noexcept;

  double normal() noexcept;

 private:
  std::uint64_t state_;
};

}  // namespace binrec::rng
