#pragma once

#include <cstdint>
#include <random>
#include <utility>

namespace hif::numerics {

/// Seeded generator state. The engine is std::mt19937_64, whose output
/// sequence is fixed by the C++ standard; reals are built from the top 53 bits
/// of each draw so sequences are identical across platforms.
struct RngState {
  std::mt19937_64 engine;

  explicit RngState(std::uint64_t seed = 0) : engine(seed) {}
  bool operator==(const RngState&) const = default;
};

/// Value-semantics draw: returns a real in [lo, hi) and the advanced state.
std::pair<double, RngState> rng_uniform(RngState state, double lo, double hi);

/// In-place wrapper used on hot paths.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  explicit Rng(RngState state) : state_(std::move(state)) {}

  /// Uniform on [0, 1).
  double canonical();
  double uniform(double lo, double hi);
  /// Uniform integer on [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via Box-Muller; the spare variate is cached.
  double normal();

  const RngState& state() const { return state_; }

 private:
  RngState state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer; used to derive independent sub-seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed for sub-task `stream` of a run seeded with `seed`:
/// mix64(seed ^ mix64(stream + 0x9E3779B97F4A7C15)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace hif::numerics
