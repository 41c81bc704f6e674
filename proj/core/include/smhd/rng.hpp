#pragma once

// Counter-based random streams (Philox4x32-10).
//
// Every draw is a pure function of (root seed, path index, substream,
// stream key, step, draw index), so paths can be simulated in any order,
// on any number of threads, with bit-identical results.  Wiener streams
// are keyed by wavevector rather than by mode position, so two Galerkin
// resolutions of the same path see identical increments on shared modes.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace smhd {

namespace detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr,
                         std::array<std::uint32_t, 2>& key) {
    const std::uint64_t p0 = std::uint64_t(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = std::uint64_t(kPhiloxM1) * ctr[2];
    const std::array<std::uint32_t, 4> out = {
        std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
        std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
    ctr = out;
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
}

}  // namespace detail

inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    for (int r = 0; r < 10; ++r) detail::philox_round(ctr, key);
    return ctr;
}

// Substream tags.  Disjoint tags keep Gaussian, jump-time and mark draws
// independent; changing dt cannot desynchronize jump times.
enum class Substream : std::uint32_t {
    wiener = 1,
    jump_times = 2,
    jump_marks = 3,
    initial_state = 4,
    scalar = 5,
    calibration = 6,
};

struct StreamId {
    std::uint64_t seed = 0;
    std::uint32_t path = 0;
};

// One counter-based block of four 32-bit words.
inline std::array<std::uint32_t, 4> rng_block(const StreamId& id, Substream sub,
                                              std::uint32_t stream_key,
                                              std::uint32_t step,
                                              std::uint32_t draw = 0) {
    const std::array<std::uint32_t, 2> key = {std::uint32_t(id.seed),
                                              std::uint32_t(id.seed >> 32)};
    const std::array<std::uint32_t, 4> ctr = {
        stream_key, step, id.path,
        (std::uint32_t(sub) << 24) | (draw & 0xFFFFFFu)};
    return philox4x32(ctr, key);
}

// Uniform in (0, 1]; never returns 0 so log() is safe.
inline double to_unit_double(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t v = (std::uint64_t(hi) << 32) | lo;
    return (double(v >> 11) + 1.0) * 0x1.0p-53;
}

struct GaussianPair {
    double a, b;
};

// Box-Muller on one Philox block.
inline GaussianPair to_gaussian_pair(const std::array<std::uint32_t, 4>& w) {
    const double u1 = to_unit_double(w[0], w[1]);
    const double u2 = to_unit_double(w[2], w[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(th), r * std::sin(th)};
}

inline GaussianPair gaussian_pair(const StreamId& id, Substream sub,
                                  std::uint32_t stream_key, std::uint32_t step,
                                  std::uint32_t draw = 0) {
    return to_gaussian_pair(rng_block(id, sub, stream_key, step, draw));
}

inline double uniform(const StreamId& id, Substream sub, std::uint32_t stream_key,
                      std::uint32_t step, std::uint32_t draw = 0) {
    const auto w = rng_block(id, sub, stream_key, step, draw);
    return to_unit_double(w[0], w[1]);
}

// Exact wavevector/field packing for Wiener stream keys: k1 in [0,N],
// k2 in [-N,N], N <= 511, field in {0,1}.  Collision-free by construction.
inline std::uint32_t mode_stream_key(int field, int k1, int k2) {
    return (std::uint32_t(field) << 20) | (std::uint32_t(k1 + 512) << 10) |
           std::uint32_t(k2 + 512);
}

}  // namespace smhd
