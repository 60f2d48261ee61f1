#include <set>

#include <gtest/gtest.h>

#include "polsar/rng.hpp"

using namespace polsar;

// Known-answer vectors published with the Random123 library.
TEST(Philox, KnownAnswers) {
    using C = rng::Counter;
    EXPECT_EQ(rng::philox4x32_10({0, 0, 0, 0}, {0, 0}), (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(rng::philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(rng::philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, SeedSplitsIntoKeyWords) {
    EXPECT_EQ(rng::key_from_seed(0x0123456789abcdefull), (rng::Key{0x89abcdef, 0x01234567}));
}

TEST(Uniform, OpenIntervalEndpoints) {
    EXPECT_EQ(rng::unit_open(0, 0), 0.5 * 0x1.0p-52);
    EXPECT_EQ(rng::unit_open(0xffffffff, 0xffffffff), 1.0 - 0.5 * 0x1.0p-52);
    EXPECT_GT(rng::unit_open(0, 0), 0.0);
    EXPECT_LT(rng::unit_open(0xffffffff, 0xffffffff), 1.0);
}

TEST(Normal, MomentsOverManyDraws) {
    const auto key = rng::key_from_seed(42);
    const std::uint32_t n = 200000;
    double s = 0, s2 = 0, s4 = 0, cross = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto g = rng::normal_pair({i, 0, 0, 9}, key);
        s += g[0] + g[1];
        s2 += g[0] * g[0] + g[1] * g[1];
        s4 += g[0] * g[0] * g[0] * g[0] + g[1] * g[1] * g[1] * g[1];
        cross += g[0] * g[1];
    }
    const double m = 2.0 * n;
    EXPECT_NEAR(s / m, 0.0, 0.01);
    EXPECT_NEAR(s2 / m, 1.0, 0.01);
    EXPECT_NEAR(s4 / m, 3.0, 0.05);
    EXPECT_NEAR(cross / n, 0.0, 0.01);
}

TEST(Below, RangeAndCoverage) {
    const auto key = rng::key_from_seed(3);
    std::set<std::uint64_t> seen;
    for (std::uint32_t i = 0; i < 1000; ++i) {
        const auto v = rng::below({i, 0, 0, 2}, key, 7);
        ASSERT_LT(v, 7u);
        seen.insert(v);
    }
    EXPECT_EQ(seen.size(), 7u);
    EXPECT_EQ(rng::below({1, 2, 3, 4}, key, 1), 0u);
}

TEST(Draws, PureFunctionOfCounter) {
    const auto key = rng::key_from_seed(77);
    EXPECT_EQ(rng::normal_pair({5, 6, 0, 0}, key), rng::normal_pair({5, 6, 0, 0}, key));
    EXPECT_NE(rng::normal_pair({5, 6, 0, 0}, key), rng::normal_pair({6, 5, 0, 0}, key));
    EXPECT_NE(rng::normal_pair({5, 6, 0, 0}, key), rng::normal_pair({5, 6, 0, 0}, rng::key_from_seed(78)));
}
