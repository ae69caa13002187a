// Counter-based random number generation.
//
// Every draw is a pure function of (seed, stream id, purpose, step, draw index),
// so the value a consumer sees does not depend on the order in which other
// consumers draw. That keeps simulations bitwise reproducible across thread
// counts and lets a cell created late in a run own an independent substream.
//
// The block function is the Philox 4x32 bijection (10 rounds of multiply-xor
// rounds with Weyl key schedule), which passes standard statistical batteries
// and costs a few nanoseconds per 128-bit block.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "spheroid/vec3.hpp"

namespace spheroid {

// Purpose tags separating the substreams a single stream id may use.
namespace rng_purpose {
inline constexpr std::uint8_t kPlacement = 1;   // initial cell positions
inline constexpr std::uint8_t kLocomotion = 2;  // locomotive magnitude + direction
inline constexpr std::uint8_t kDivision = 3;    // division trial + daughter direction
inline constexpr std::uint8_t kSeparation = 4;  // tie-break for coincident cells
inline constexpr std::uint8_t kSampling = 5;    // design-of-experiments draws
inline constexpr std::uint8_t kMcmc = 6;        // proposal + accept draws
inline constexpr std::uint8_t kGeneral = 7;     // tests and miscellaneous
}  // namespace rng_purpose

namespace detail {

struct PhiloxBlock {
    std::uint32_t v[4];
};

inline void philox_round(std::uint32_t x[4], std::uint32_t k0, std::uint32_t k1) {
    constexpr std::uint64_t kM0 = 0xD2511F53ULL;
    constexpr std::uint64_t kM1 = 0xCD9E8D57ULL;
    const std::uint64_t p0 = kM0 * x[0];
    const std::uint64_t p1 = kM1 * x[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t y0 = hi1 ^ x[1] ^ k0;
    const std::uint32_t y2 = hi0 ^ x[3] ^ k1;
    x[0] = y0;
    x[1] = lo1;
    x[2] = y2;
    x[3] = lo0;
}

inline PhiloxBlock philox4x32(std::uint32_t c0, std::uint32_t c1, std::uint32_t c2,
                              std::uint32_t c3, std::uint32_t k0, std::uint32_t k1) {
    constexpr std::uint32_t kW0 = 0x9E3779B9u;
    constexpr std::uint32_t kW1 = 0xBB67AE85u;
    std::uint32_t x[4] = {c0, c1, c2, c3};
    for (int r = 0; r < 10; ++r) {
        philox_round(x, k0, k1);
        k0 += kW0;
        k1 += kW1;
    }
    return PhiloxBlock{{x[0], x[1], x[2], x[3]}};
}

// Seed scrambler so that nearby user seeds give unrelated key material.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

class Draws;

// A keyed substream: (seed, id) select the stream, (purpose, step) select the
// slice within it, and consecutive draws within a slice walk a 16-bit index.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t id)
        : id_(id) {
        const std::uint64_t mixed = detail::splitmix64(seed);
        key0_ = static_cast<std::uint32_t>(mixed);
        key1_ = static_cast<std::uint32_t>(mixed >> 32);
    }

    std::uint64_t id() const { return id_; }

    // Same key, different stream id; used to address per-cell substreams.
    RngStream with_id(std::uint64_t id) const {
        RngStream s(*this);
        s.id_ = id;
        return s;
    }

    // One uniform double in [0, 1) at an explicit (purpose, step, index) address.
    double uniform_at(std::uint8_t purpose, std::uint64_t step, std::uint32_t index) const {
        const detail::PhiloxBlock b = block(purpose, step, index / 2);
        const int half = static_cast<int>(index % 2);
        return to_unit_double(b.v[2 * half], b.v[2 * half + 1]);
    }

    Draws draws(std::uint8_t purpose, std::uint64_t step) const;

  private:
    detail::PhiloxBlock block(std::uint8_t purpose, std::uint64_t step,
                              std::uint32_t pair_index) const {
        // Counter layout: stream id in c0/c1, step low bits in c2, then the
        // remaining step bits, the purpose tag and the in-slice pair index.
        // Steps are limited to 2^40 and draw indices to 2^17 per slice.
        const auto c0 = static_cast<std::uint32_t>(id_);
        const auto c1 = static_cast<std::uint32_t>(id_ >> 32);
        const auto c2 = static_cast<std::uint32_t>(step);
        const auto c3 = static_cast<std::uint32_t>(((step >> 32) & 0xFFu) |
                                                   (static_cast<std::uint32_t>(purpose) << 8) |
                                                   (pair_index << 16));
        return detail::philox4x32(c0, c1, c2, c3, key0_, key1_);
    }

    static double to_unit_double(std::uint32_t hi, std::uint32_t lo) {
        // 53 random bits scaled to [0, 1).
        const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) | (lo >> 11);
        return static_cast<double>(bits) * 0x1p-53;
    }

    std::uint64_t id_;
    std::uint32_t key0_;
    std::uint32_t key1_;
};

// Sequential-draw view on one (purpose, step) slice. Holds its own copy of
// the stream so it stays valid past temporaries like with_id(i).
class Draws {
  public:
    Draws(const RngStream& s, std::uint8_t purpose, std::uint64_t step)
        : stream_(s), purpose_(purpose), step_(step) {}

    double uniform() { return stream_.uniform_at(purpose_, step_, index_++); }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller (two uniforms per call, no caching,
    // so the draw count stays predictable).
    double normal() {
        double u1 = uniform();
        const double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1p-54;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    // Uniformly distributed direction on the unit sphere.
    Vec3 unit_vector() {
        const double z = 2.0 * uniform() - 1.0;
        const double phi = 6.283185307179586 * uniform();
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {r * std::cos(phi), r * std::sin(phi), z};
    }

  private:
    RngStream stream_;
    std::uint8_t purpose_;
    std::uint64_t step_;
    std::uint32_t index_ = 0;
};

inline Draws RngStream::draws(std::uint8_t purpose, std::uint64_t step) const {
    return Draws(*this, purpose, step);
}

}  // namespace spheroid
