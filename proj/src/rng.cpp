#include "sbl/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace sbl {

namespace {

uint64_t splitmix64_mix(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

StreamRng::StreamRng(uint64_t seed, Stream stream, uint64_t key) {
  // Mix the identifiers into a well-separated starting state.
  uint64_t s = splitmix64_mix(seed + 0x9E3779B97F4A7C15ULL);
  s = splitmix64_mix(s ^ (static_cast<uint64_t>(stream) * 0xD1B54A32D192ED03ULL));
  state_ = splitmix64_mix(s ^ (key * 0x8CB92BA72F3D8DD7ULL));
}

uint64_t StreamRng::next_u64() {
  state_ += 0x9E3779B97F4A7C15ULL;
  return splitmix64_mix(state_);
}

double StreamRng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double StreamRng::next_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  while (true) {
    const double u = 2.0 * next_double() - 1.0;
    const double v = 2.0 * next_double() - 1.0;
    const double s = u * u + v * v;
    if (s >= 1.0 || s == 0.0) continue;
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    cached_normal_ = v * scale;
    has_cached_normal_ = true;
    return u * scale;
  }
}

uint64_t StreamRng::next_below(uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("bound must be positive");
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  while (true) {
    const uint64_t r = next_u64();
    if (r < limit) return r % bound;
  }
}

}  // namespace sbl
