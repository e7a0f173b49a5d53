#pragma once

#include <cstdint>

namespace sbl {

// Named sub-streams so signal, support, noise, and dictionary draws never
// interleave: each (seed, stream, key) triple is an independent sequence.
enum class Stream : uint64_t { Signal = 1, Support = 2, Noise = 3, Dictionary = 4 };

// Counter-based splitmix64 generator. Draw order is fully determined by
// (seed, stream, key), so identical data can be regenerated anywhere without
// threading a generator object through the call graph.
class StreamRng {
 public:
  StreamRng(uint64_t seed, Stream stream, uint64_t key = 0);

  uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double next_double();
  // Standard normal via the Marsaglia polar method (pair-cached).
  double next_normal();
  // Uniform integer in [0, bound) by rejection; bound must be positive.
  uint64_t next_below(uint64_t bound);

 private:
  uint64_t state_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace sbl
