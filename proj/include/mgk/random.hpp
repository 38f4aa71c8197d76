#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mgk/prob.hpp"

namespace mgk {

// Seeded generator. The engine is fully specified by the standard and the
// bounded draws are done here, so sequences are identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }
  /// Uniform in [lo, hi].
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + index(hi - lo + 1); }
  bool coin() { return (engine_() & 1U) != 0; }
  StateSet subset(std::size_t n) { return engine_() & full_set(n); }

 private:
  std::mt19937_64 engine_;
};

/// Random partition of n points into at most n blocks.
Partition random_partition(Rng& rng, std::size_t n);
SpaceRef random_space(Rng& rng, std::size_t n);
/// Atom weights are multiples of 1/denominator.
FinMeasure random_measure(Rng& rng, const SpaceRef& space, unsigned denominator = 12);
MarkovKernel random_kernel(Rng& rng, const SpaceRef& dom, const SpaceRef& cod, unsigned denominator = 12);
/// Map whose fibers are unions of dom atoms, hence measurable.
MeasurableMap random_measurable_map(Rng& rng, const SpaceRef& dom, const SpaceRef& cod);

}  // namespace mgk
