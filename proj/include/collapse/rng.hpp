#pragma once

#include <cstdint>
#include <random>

namespace collapse {

// Seeded random source with a documented draw format: every uniform() is the
// top 53 bits of one mt19937_64 output scaled into [0,1). One engine output
// per draw, so the stream layout is reproducible across platforms.
class RandomSource {
  public:
    explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    std::uint64_t bits() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

// splitmix64 finalizer, used for deriving per-run seeds in sweeps.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace collapse
