#ifndef UPB_RNG_HPP
#define UPB_RNG_HPP

#include <cstdint>

namespace upb {

/// splitmix64 finalizer (Vigna); bijective 64-bit mix.
inline uint64_t mix64(uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Per-trajectory stream seed derived counter-style from the master seed;
/// independent of execution order or worker count by construction.
inline uint64_t derive_stream_seed(uint64_t master_seed, uint64_t index) {
  return mix64(mix64(master_seed) ^ mix64(index * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull));
}

/// Small deterministic generator (splitmix64 sequence).
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}
  uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  /// uniform double in the open interval (0, 1)
  double uniform_oo() { return (double(next() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  uint64_t state_;
};

}  // namespace upb

#endif
