#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gazelab {

/// Deterministic random source. std::mt19937_64 has a fixed, portable
/// output sequence, but the standard distributions do not, so sampling is
/// done by hand here:
///  - uniform doubles take the top 53 bits, shifted into (0, 1];
///  - gaussians come from the Box-Muller transform (both values used);
///  - bounded ints use modulo, which is biased by < 2^-40 for our ranges.
/// Streams therefore replay bit-for-bit across platforms for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on (0, 1]; never returns 0 so log() below is safe.
    double next_unit() {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    /// Uniform on [0, n).
    std::uint64_t next_below(std::uint64_t n) { return engine_() % n; }

    /// Standard normal via Box-Muller; caches the second value of each pair.
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Name recorded in session logs so a reader knows which noise process
/// produced them.
inline constexpr const char* kGeneratorTag = "mt19937_64-boxmuller-ar1";

} // namespace gazelab
