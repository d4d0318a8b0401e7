#pragma once

#include <cstdint>
#include <random>

namespace qreset {

/// SplitMix64 mixing step; used to derive independent per-trajectory seeds
/// from (base seed, index) so ensemble results do not depend on how work is
/// scheduled across threads.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(base ^ splitmix64(index + 1));
}

/// mt19937_64 stream with bit-reproducible uniforms; the standard library
/// distributions are implementation-defined, so doubles are built from raw
/// 53-bit draws.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform in (0, 1].
    double uniform01() {
        return static_cast<double>((eng_() >> 11) + 1ULL) * 0x1.0p-53;
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace qreset
