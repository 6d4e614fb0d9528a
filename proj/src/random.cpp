#include "coordsim/random.hpp"

#include <cmath>
#include <numbers>

namespace coordsim {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(master + kGolden);
  for (std::uint64_t v : path) h = mix64(h ^ mix64(v + kGolden));
  return h;
}

std::uint64_t Stream::next() {
  state_ += kGolden;
  return mix64(state_);
}

double Stream::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Stream::normal() {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Stream::categorical(std::span<const double> pmf) {
  const double u = uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    if (pmf[k] <= 0.0) continue;
    cumulative += pmf[k];
    last_positive = k;
    if (u < cumulative) return k;
  }
  // Rounding left u above the accumulated mass.
  return last_positive;
}

}  // namespace coordsim
