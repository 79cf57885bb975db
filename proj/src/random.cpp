#include "hif/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "hif/error.hpp"

namespace hif::numerics {
namespace {

double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

double scale_into(double u, double lo, double hi) {
  const double v = lo + (hi - lo) * u;
  // Rounding can land on hi for u close to 1.
  return (v >= hi && hi > lo) ? std::nextafter(hi, lo) : v;
}

}  // namespace

std::pair<double, RngState> rng_uniform(RngState state, double lo, double hi) {
  if (!(lo <= hi)) throw InvalidInput("rng_uniform: lo must not exceed hi");
  const double u = to_unit(state.engine());
  return {scale_into(u, lo, hi), std::move(state)};
}

double Rng::canonical() { return to_unit(state_.engine()); }

double Rng::uniform(double lo, double hi) {
  if (!(lo <= hi)) throw InvalidInput("Rng::uniform: lo must not exceed hi");
  return scale_into(canonical(), lo, hi);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw InvalidInput("Rng::below: empty range");
  // Rejection sampling keeps the result unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = 0;
  do {
    x = state_.engine();
  } while (x >= limit);
  return x % n;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - canonical();  // (0, 1]
  const double u2 = canonical();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + 0x9E3779B97F4A7C15ULL));
}

}  // namespace hif::numerics
