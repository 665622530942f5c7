#pragma once

#include <cstdint>

namespace nv {

// Counter-based 64-bit generator (splitmix64 finalizer over key ^ counter).
// Output depends only on (seed, stream, counter), so streams can be split
// deterministically and results are bitwise identical across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ 0x6a09e667f3bcc909ULL, stream)), counter_(0) {}

    std::uint64_t next_u64() { return mix(key_, counter_++); }

    // Uniform double in [0, 1) with 53 bits of mantissa.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Child generator with an independent stream, unaffected by this
    // generator's position.
    Rng split(std::uint64_t stream) const { return Rng(key_, stream + 1); }

private:
    static std::uint64_t mix(std::uint64_t key, std::uint64_t ctr) {
        std::uint64_t z = key + ctr * 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace nv
