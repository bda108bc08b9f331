#pragma once

#include <cstdint>

namespace causalproc {

/// Counter-based generator: the n-th draw is a pure function of
/// (seed, stream, n), mixed through the SplitMix64 finalizer. Identical
/// inputs give bit-identical sequences on every platform, and substreams
/// can be handed to independent workers without coordination.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller.
  double normal();

  /// Independent generator keyed by this one's seed/stream plus `index`.
  CounterRng substream(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace causalproc
