#include <gtest/gtest.h>

#include "polsar/covariance.hpp"
#include "polsar/parallel.hpp"
#include "polsar/reference.hpp"
#include "polsar/wishart.hpp"
#include "support.hpp"

using namespace polsar;

namespace {

CovarianceField field_of(const Raster<Herm2>& cells) { return {cells, 1, Basis::pauli, {}}; }

CovarianceField random_field(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    Raster<Herm2> cells(n, n);
    for (auto& c : cells.values()) c = test::random_psd(gen);
    return field_of(cells);
}

ClassMap random_labels(std::size_t n, std::size_t k, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    ClassMap m{Raster<std::uint8_t>(n, n), {}};
    for (std::size_t i = 0; i < k; ++i) m.class_names.push_back("c" + std::to_string(i));
    for (auto& l : m.labels.values()) l = std::uint8_t(gen() % k);
    return m;
}

} // namespace

TEST(WishartDistance, Examples) {
    EXPECT_DOUBLE_EQ(wishart_distance(Herm2::identity(), Herm2::identity()), 2.0);
    EXPECT_DOUBLE_EQ(wishart_distance(Herm2::diag(2, 2), Herm2::identity()), 4.0);
    EXPECT_NEAR(wishart_distance(Herm2::identity(), Herm2::diag(2, 2)), std::log(4.0) + 1.0, 1e-15);
    EXPECT_NEAR(wishart_distance(Herm2::identity(), Herm2::diag(2, 2)), 2.3863, 1e-4);
}

TEST(WishartDistance, SingularCenterRejected) {
    EXPECT_THROW(wishart_distance(Herm2::identity(), Herm2::diag(1, 0)), ArgumentError);
    EXPECT_THROW(wishart_distance(Herm2::identity(), Herm2{1, 1, {1, 0}}), ArgumentError);
}

TEST(WishartDistance, MatchesDenseFormula) {
    std::mt19937_64 gen(8);
    for (int i = 0; i < 2000; ++i) {
        const Herm2 c = test::random_psd(gen, true), v = test::random_psd(gen);
        const Eigen::Matrix2cd vm = test::to_eigen(v);
        const double want = std::log(vm.determinant().real()) +
                            (vm.inverse() * test::to_eigen(c)).trace().real();
        ASSERT_NEAR(wishart_distance(c, v), want, 1e-9 * std::max(1.0, std::abs(want)));
    }
}

TEST(WishartDistance, LowerBoundAndCongruenceInvariance) {
    std::mt19937_64 gen(13);
    for (int i = 0; i < 10000; ++i) {
        const Herm2 c = test::random_psd(gen), v = test::random_psd(gen);
        const double d = wishart_distance(c, v);
        ASSERT_GE(d, std::log(c.det()) + 2.0 - 1e-9 * std::max(1.0, std::abs(d)));
        const double dp = wishart_distance(pauli_congruence(c), pauli_congruence(v));
        ASSERT_NEAR(dp, d, 1e-9 * std::max(1.0, std::abs(d)));
    }
}

TEST(ClassCenters, Examples) {
    Raster<Herm2> cells(1, 2);
    cells(0, 0) = Herm2::diag(1, 0);
    cells(0, 1) = Herm2::diag(0, 1);
    ClassMap one{Raster<std::uint8_t>(1, 2, 0), {"a"}};
    const auto c = class_centers(field_of(cells), one);
    ASSERT_EQ(c.centers.size(), 1u);
    EXPECT_EQ(c.centers[0], Herm2::diag(0.5, 0.5));
    EXPECT_EQ(c.counts[0], 2u);

    ClassMap split{Raster<std::uint8_t>(1, 2, 0), {"a", "b", "c"}};
    split.labels(0, 1) = kIgnoreLabel;
    const auto r = class_centers(field_of(cells), split);
    ASSERT_EQ(r.centers.size(), 1u);
    EXPECT_DOUBLE_EQ(r.centers[0].c11, 1.0 + 1e-6);
    EXPECT_DOUBLE_EQ(r.centers[0].c22, 1e-6);
    EXPECT_EQ(r.empty_classes, (std::vector<std::uint8_t>{1, 2}));
    EXPECT_EQ(r.class_ids, (std::vector<std::uint8_t>{0}));
}

TEST(ClassCenters, AllIgnoredIsAnError) {
    Raster<Herm2> cells(2, 2, Herm2::identity());
    ClassMap m{Raster<std::uint8_t>(2, 2, kIgnoreLabel), {"a"}};
    EXPECT_THROW(class_centers(field_of(cells), m), ArgumentError);
}

TEST(ClassCenters, MatchesLoopOracle) {
    const auto cov = random_field(32, 4);
    const auto labels = random_labels(32, 3, 5);
    const auto fast = class_centers(cov, labels);
    const auto slow = reference::class_centers(cov, labels);
    ASSERT_EQ(fast.centers.size(), slow.centers.size());
    for (std::size_t k = 0; k < fast.centers.size(); ++k) {
        const double scale = slow.centers[k].trace();
        EXPECT_NEAR(fast.centers[k].c11, slow.centers[k].c11, 1e-9 * scale);
        EXPECT_NEAR(fast.centers[k].c22, slow.centers[k].c22, 1e-9 * scale);
        EXPECT_NEAR(std::abs(fast.centers[k].c12 - slow.centers[k].c12), 0.0, 1e-9 * scale);
        EXPECT_EQ(fast.counts[k], slow.counts[k]);
    }
}

TEST(WishartIterate, SingleClassFixedPoint) {
    Raster<Herm2> cells(6, 6, Herm2::identity());
    ClassMap init{Raster<std::uint8_t>(6, 6, 0), {"a", "b"}};
    init.labels(0, 0) = kIgnoreLabel;
    const auto r = wishart_iterate(field_of(cells), init);
    EXPECT_EQ(r.map.labels, init.labels);
    ASSERT_EQ(r.log.size(), 1u);
    EXPECT_EQ(r.log[0].changed_fraction, 0.0);
    EXPECT_DOUBLE_EQ(r.log[0].objective, 35.0 * 2.0);
}

TEST(WishartIterate, OptionValidation) {
    Raster<Herm2> cells(2, 2, Herm2::identity());
    ClassMap init{Raster<std::uint8_t>(2, 2, 0), {"a"}};
    EXPECT_THROW(wishart_iterate(field_of(cells), init, {0, 0.001}), ArgumentError);
    EXPECT_THROW(wishart_iterate(field_of(cells), init, {5, 0.0}), ArgumentError);
    EXPECT_THROW(wishart_iterate(field_of(cells), init, {5, 1.0}), ArgumentError);
    ClassMap wrong{Raster<std::uint8_t>(3, 2, 0), {"a"}};
    EXPECT_THROW(wishart_iterate(field_of(cells), wrong), ArgumentError);
}

TEST(WishartIterate, SeparatesTwoPopulations) {
    const std::size_t n = 40;
    std::mt19937_64 gen(31);
    Raster<Herm2> cells(n, n);
    ClassMap truth{Raster<std::uint8_t>(n, n), {"a", "b"}};
    for (std::size_t i = 0; i < cells.size(); ++i) {
        truth.labels[i] = std::uint8_t((i / n + i % n) % 2);
        cells[i] = truth.labels[i] ? Herm2::diag(0.1, 10.0) : Herm2::diag(10.0, 0.1);
    }
    ClassMap init = truth;
    for (auto& l : init.labels.values()) {
        if (gen() % 10 == 0) l ^= 1;
    }
    const auto r = wishart_iterate(field_of(cells), init);
    EXPECT_EQ(r.map.labels, truth.labels);
    EXPECT_EQ(r.log.back().changed_fraction, 0.0);
}

TEST(WishartIterate, TiesGoToLowerClass) {
    // Two identical centers: every pixel must end in class 0.
    Raster<Herm2> cells(4, 4, Herm2::diag(2.0, 1.0));
    ClassMap init{Raster<std::uint8_t>(4, 4, 1), {"a", "b"}};
    for (std::size_t i = 0; i < 8; ++i) init.labels[i] = 0;
    const auto r = wishart_iterate(field_of(cells), init);
    for (auto l : r.map.labels.values()) EXPECT_EQ(l, 0);
}

TEST(WishartIterate, ObjectiveNonIncreasing) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto cov = random_field(64, seed);
        const auto r = wishart_iterate(cov, random_labels(64, 5, seed + 100), {20, 1e-9});
        for (std::size_t i = 1; i < r.log.size(); ++i) {
            ASSERT_LE(r.log[i].objective, r.log[i - 1].objective * (1 + 1e-12))
                << "seed " << seed << " iteration " << r.log[i].iteration;
        }
    }
}

TEST(WishartIterate, MatchesSerialReferenceAndThreadCount) {
    const auto cov = compute_covariance(test::random_slc(48, 48, 9), 5, Basis::pauli);
    const auto init = random_labels(48, 4, 10);
    const auto ref = reference::wishart_iterate(cov, init);
    for (int threads : {1, 2, 5}) {
        set_thread_count(threads);
        const auto r = wishart_iterate(cov, init);
        EXPECT_EQ(r.map.labels, ref.map.labels) << threads << " threads";
        ASSERT_EQ(r.log.size(), ref.log.size());
        for (std::size_t i = 0; i < r.log.size(); ++i) {
            EXPECT_EQ(r.log[i].changed_fraction, ref.log[i].changed_fraction);
            EXPECT_NEAR(r.log[i].objective, ref.log[i].objective, 1e-9 * std::abs(ref.log[i].objective));
        }
    }
    set_thread_count(0);
}

TEST(WishartIterate, BasisInvariantAssignments) {
    const auto slc = test::random_slc(40, 40, 21);
    const auto lex = compute_covariance(slc, 5, Basis::lexicographic);
    const auto pauli = change_basis(lex, Basis::pauli);
    const auto init = random_labels(40, 4, 22);
    EXPECT_EQ(wishart_iterate(lex, init).map.labels, wishart_iterate(pauli, init).map.labels);
}

TEST(SplitBySpan, QuantileSubclasses) {
    Raster<Herm2> cells(1, 8);
    ClassMap init{Raster<std::uint8_t>(1, 8, 0), {"a", "b"}};
    for (std::size_t i = 0; i < 8; ++i) {
        cells[i] = Herm2::diag(double(i + 1), 0.0);
        init.labels[i] = std::uint8_t(i % 2);
    }
    init.labels[7] = kIgnoreLabel;
    const auto s = split_by_span(init, field_of(cells), 2);
    EXPECT_EQ(s.class_names, (std::vector<std::string>{"a/s0", "a/s1", "b/s0", "b/s1"}));
    // class a spans 1,3,5,7 -> cut at 5; class b spans 2,4,6 -> cut at 4.
    const std::vector<std::uint8_t> want = {0, 2, 0, 3, 1, 3, 1, kIgnoreLabel};
    EXPECT_EQ(s.labels.values(), want);
    EXPECT_EQ(split_by_span(init, field_of(cells), 1).labels, init.labels);
    EXPECT_THROW(split_by_span(init, field_of(cells), 0), ArgumentError);
    EXPECT_THROW(split_by_span(init, field_of(cells), 200), ArgumentError);
}

TEST(Merge, ExplicitMapping) {
    ZoneMap z{Raster<std::uint8_t>(3, 3, 9)};
    std::map<std::uint8_t, std::uint8_t> table;
    for (auto zone : kFeasibleZones) table[zone] = 1;
    table[9] = 0;
    const auto m = merge_zones_to_classes(z, table, {"water", "vegetation"});
    for (auto l : m.labels.values()) EXPECT_EQ(l, 0);

    z.labels(1, 1) = 5;
    z.labels(2, 2) = kInvalidZone;
    const auto m2 = merge_zones_to_classes(z, table, {"water", "vegetation"});
    EXPECT_EQ(m2.labels(1, 1), 1);
    EXPECT_EQ(m2.labels(2, 2), kIgnoreLabel);

    table.erase(4);
    EXPECT_THROW(merge_zones_to_classes(z, table, {"water", "vegetation"}), ArgumentError);
}

TEST(Merge, ReferenceMajority) {
    ZoneMap z{Raster<std::uint8_t>(1, 10, 5)};
    ClassMap ref{Raster<std::uint8_t>(1, 10, 0), {"a", "b"}};
    for (std::size_t i = 0; i < 4; ++i) ref.labels[i] = 1;
    const auto m = merge_zones_to_classes(z, ref);
    for (auto l : m.labels.values()) EXPECT_EQ(l, 0);
    EXPECT_EQ(m.class_names, ref.class_names);

    for (std::size_t i = 0; i < 5; ++i) ref.labels[i] = 1; // 50/50 tie
    const auto tie = merge_zones_to_classes(z, ref);
    for (auto l : tie.labels.values()) EXPECT_EQ(l, 0);

    for (std::size_t i = 0; i < 6; ++i) ref.labels[i] = 1;
    const auto flipped = merge_zones_to_classes(z, ref);
    for (auto l : flipped.labels.values()) EXPECT_EQ(l, 1);

    ref.labels = Raster<std::uint8_t>(1, 10, kIgnoreLabel);
    EXPECT_THROW(merge_zones_to_classes(z, ref), ArgumentError);
}
