#pragma once

#include <cstdint>

namespace podforge {

// Counter-free splitmix64 stream. std::mt19937 with std::uniform_*_distribution
// is not bit-stable across standard libraries, so all randomness goes through
// this generator: identical draw sequences on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 bits of precision.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform index in [0, n). Modulo bias is negligible for pool-sized n.
    std::size_t next_index(std::size_t n) {
        return static_cast<std::size_t>(next_u64() % n);
    }

private:
    std::uint64_t state_;
};

// Derives a decorrelated per-scene stream as a pure function of
// (master_seed, scene_index): both words are mixed through splitmix64 finalizers
// before seeding, so nearby indices do not produce nearby states.
inline Rng derive_scene_rng(std::uint64_t master_seed, std::uint64_t scene_index) {
    auto mix = [](std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    const std::uint64_t seed =
        mix(master_seed + 0x9e3779b97f4a7c15ULL) ^ mix(scene_index + 0x3c6ef372fe94f82aULL);
    return Rng(seed);
}

}  // namespace podforge
