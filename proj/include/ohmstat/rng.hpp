#pragma once

#include <cstdint>

namespace ohmstat {

// splitmix64 finalizer. Full-avalanche 64-bit mixer: every output bit
// depends on every input bit, so mix(seed, index) gives an independent
// stream position regardless of evaluation order.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derive a substream seed from a master seed and an index.
inline std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ mix64(index));
}

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return mix(mix(seed, a), b);
}

// Uniform double in [0,1) from the top 53 bits.
inline double u01(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Small counter-based generator: stateless apart from (seed, counter),
// so parallel consumers can never race on shared RNG state.
class SeedStream {
  public:
    explicit SeedStream(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64() { return mix(seed_, counter_++); }
    double next_u01() { return u01(next_u64()); }

  private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

} // namespace ohmstat
