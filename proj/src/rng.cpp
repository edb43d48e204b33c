#include "binrec/rng.hpp"

#include <cmath>
#include <numbers>

namespace binrec::rng {

namespace {

double box_muller(double u1, double u2) noexcept {
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

double sign_at(std::uint64_t seed, std::uint64_t i, std::uint64_t j) noexcept {
  return (derive(seed, i, j, 0) >> 63) != 0 ? 1.0 : -1.0;
}

double normal_at(std::uint64_t seed, std::uint64_t i, std::uint64_t j) noexcept {
  return box_muller(unit_open(derive(seed, i, j, 1)), unit_open(derive(seed, i, j, 2)));
}

double uniform_at(std::uint64_t seed, std::uint64_t i, std::uint64_t j) noexcept {
  return unit_open(derive(seed, i, j, 3));
}

std::uint64_t Stream::below(std::uint64_t n) noexcept {
  // Rejection on the top of the range keeps the draw exactly uniform.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t r = next();
  while (r >= limit) r = next();
  return r % n;
}

double Stream::normal() noexcept {
  const double u1 = uniform();
  const double u2 = uniform();
  return box_muller(u1, u2);
}

}  // namespace binrec::rng
