#pragma once

// Counter-based random numbers. Every draw is a pure function of
// (key, counter), so any pixel or element can be generated independently
// of evaluation order or thread layout.
//
// Generator: Philox4x32 with 10 rounds (Salmon et al., SC'11), the same
// bijection Random123 ships as philox4x32_10.
//
// Uniforms: two 32-bit words w_hi, w_lo give a 52-bit integer
// m = (w_hi << 20) ^ (w_lo >> 12), mapped exactly to (m + 0.5) * 2^-52, which lies
// strictly inside (0, 1).
//
// Normals: Box-Muller on a uniform pair (u1, u2):
//   r = sqrt(-2 ln u1), g1 = r cos(2 pi u2), g2 = r sin(2 pi u2).

#include <array>
#include <cstdint>

namespace polsar::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

Counter philox4x32_10(Counter ctr, Key key);

inline Key key_from_seed(std::uint64_t seed) {
    return {std::uint32_t(seed), std::uint32_t(seed >> 32)};
}

double unit_open(std::uint32_t hi, std::uint32_t lo);

// Two uniforms in (0, 1) from one Philox block.
std::array<double, 2> uniform_pair(Counter ctr, Key key);

// Two independent N(0, 1) draws from one Philox block.
std::array<double, 2> normal_pair(Counter ctr, Key key);

// Uniform integer in [0, bound) by 64-bit multiply-shift; bias is at most
// bound / 2^64.
std::uint64_t below(Counter ctr, Key key, std::uint64_t bound);

} // namespace polsar::rng
