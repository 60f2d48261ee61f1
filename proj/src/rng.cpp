#include "polsar/rng.hpp"

#include <cmath>
#include <numbers>

namespace polsar::rng {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = std::uint64_t(a) * b;
    hi = std::uint32_t(p >> 32);
    lo = std::uint32_t(p);
}

} // namespace

Counter philox4x32_10(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

double unit_open(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t m = (std::uint64_t(hi) << 20) ^ (std::uint64_t(lo) >> 12);
    return (double(m) + 0.5) * 0x1.0p-52;
}

std::array<double, 2> uniform_pair(Counter ctr, Key key) {
    const Counter r = philox4x32_10(ctr, key);
    return {unit_open(r[0], r[1]), unit_open(r[2], r[3])};
}

std::array<double, 2> normal_pair(Counter ctr, Key key) {
    const auto [u1, u2] = uniform_pair(ctr, key);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(theta), radius * std::sin(theta)};
}

std::uint64_t below(Counter ctr, Key key, std::uint64_t bound) {
    const Counter r = philox4x32_10(ctr, key);
    const std::uint64_t x = (std::uint64_t(r[0]) << 32) | r[1];
    return std::uint64_t((static_cast<unsigned __int128>(x) * bound) >> 64);
}

} // namespace polsar::rng
