#include <algorithm>
#include <fstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "polsar/dataset.hpp"
#include "polsar/pfr.hpp"
#include "support.hpp"

using namespace polsar;

namespace {

ChannelStack ramp_stack(std::size_t h, std::size_t w, std::size_t channels) {
    ChannelStack s;
    s.valid = Raster<std::uint8_t>(h, w, 1);
    for (std::size_t k = 0; k < channels; ++k) {
        Raster<float> r(h, w);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = float(i) + 0.25f * float(k);
        s.channels.push_back(std::move(r));
        s.names.push_back("ch" + std::to_string(k));
    }
    return s;
}

ClassMap labels_of(std::size_t h, std::size_t w, std::uint8_t fill, std::size_t k = 5) {
    ClassMap m{Raster<std::uint8_t>(h, w, fill), {}};
    for (std::size_t i = 0; i < k; ++i) m.class_names.push_back("c" + std::to_string(i));
    return m;
}

PatchSet synthetic_set(std::size_t count, std::size_t n, std::size_t channels, PlatformKind kind,
                       std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    PatchSet ps;
    ps.patch_height = ps.patch_width = n;
    for (std::size_t k = 0; k < channels; ++k) ps.channel_names.push_back("ch" + std::to_string(k));
    ps.class_names = {"a", "b", "c"};
    ps.platform_kind = kind;
    for (std::size_t i = 0; i < count; ++i) {
        PatchData d;
        d.values.resize(n * n * channels);
        d.mask.resize(n * n);
        for (auto& v : d.values) v = float(gen() % 1000) / 1000.0f;
        for (auto& m : d.mask) m = std::uint8_t(gen() % 4 == 0 ? kIgnoreLabel : gen() % 3);
        ps.add(std::move(d), {"s" + std::to_string(seed), i, 0, "id", i});
    }
    return ps;
}

} // namespace

TEST(Stack, ChannelOrderAndEncoding) {
    const std::size_t n = 4;
    std::vector<NamedRaster> in = {{"hh_db", Raster<float>(n, n, 0.1f)}, {"vv_db", Raster<float>(n, n, 0.2f)}};
    ClassMap zones = labels_of(n, n, 0, 8);
    for (std::size_t i = 0; i < zones.labels.size(); ++i) zones.labels[i] = std::uint8_t(i % 8);
    zones.labels[5] = kIgnoreLabel;
    ClassMap wishart = labels_of(n, n, 2, 5);
    std::vector<NamedClassMap> cls = {{"zones", zones}, {"wishart", wishart}};
    const auto s = stack_channels(in, cls);
    EXPECT_EQ(s.names, (std::vector<std::string>{"hh_db", "vv_db", "zones", "wishart"}));
    ASSERT_EQ(s.channels.size(), 4u);
    EXPECT_FLOAT_EQ(s.channels[1][0], 0.2f);
    for (std::size_t i = 0; i < zones.labels.size(); ++i) {
        if (i == 5) {
            EXPECT_EQ(s.channels[2][i], 1.0f);
            EXPECT_EQ(s.valid[i], 0);
        } else {
            EXPECT_FLOAT_EQ(s.channels[2][i], float(i % 8) / 7.0f);
            EXPECT_EQ(s.valid[i], 1);
        }
    }
    EXPECT_FLOAT_EQ(s.channels[3][0], 0.5f);

    const auto only = stack_channels(in, {});
    EXPECT_EQ(only.channels.size(), 2u);

    std::vector<NamedRaster> bad = {{"hh_db", Raster<float>(n, n + 1)}};
    EXPECT_THROW(stack_channels(bad, cls), ArgumentError);
}

TEST(Tile, CountsFollowFloorArithmetic) {
    const auto s512 = ramp_stack(512, 512, 1);
    TileOptions opt{256, 256, 0.0};
    EXPECT_EQ(tile(s512, labels_of(512, 512, 0), opt, "a", PlatformKind::synthetic).size(), 4u);
    const auto s600 = ramp_stack(600, 600, 1);
    EXPECT_EQ(tile(s600, labels_of(600, 600, 0), opt, "a", PlatformKind::synthetic).size(), 4u);
    opt.min_labeled_fraction = 0.5;
    EXPECT_EQ(tile(s512, labels_of(512, 512, kIgnoreLabel), opt, "a", PlatformKind::synthetic).size(), 0u);
    opt = {256, 128, 0.0};
    EXPECT_EQ(tile(s512, labels_of(512, 512, 0), opt, "a", PlatformKind::synthetic).size(), 9u);
}

TEST(Tile, ProvenanceAndContent) {
    const auto s = ramp_stack(40, 30, 2);
    auto mask = labels_of(40, 30, 1);
    const auto ps = tile(s, mask, {16, 16, 0.0}, "scene7", PlatformKind::spaceborne);
    ASSERT_EQ(ps.size(), 2u * 1u);
    EXPECT_EQ(ps.platform_kind, PlatformKind::spaceborne);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto& p = ps.samples[i].provenance;
        EXPECT_EQ(p.scene_id, "scene7");
        EXPECT_EQ(p.base_id, i);
        EXPECT_LE(p.row + 16, 40u);
        EXPECT_LE(p.col + 16, 30u);
        const auto v = ps.patch(i);
        // Pixel (3, 5) of the tile, channel 1.
        EXPECT_EQ(v[(3 * 16 + 5) * 2 + 1], s.channels[1](p.row + 3, p.col + 5));
    }
    EXPECT_EQ(ps.samples[1].provenance.row, 16u);
    EXPECT_THROW(tile(s, mask, {41, 41, 0.0}, "x", PlatformKind::synthetic), ArgumentError);
}

TEST(Tile, InvalidStackPixelsAreMasked) {
    auto s = ramp_stack(16, 16, 1);
    s.valid(2, 3) = 0;
    const auto ps = tile(s, labels_of(16, 16, 2), {16, 16, 0.0}, "a", PlatformKind::synthetic);
    ASSERT_EQ(ps.size(), 1u);
    EXPECT_EQ(ps.mask(0)[2 * 16 + 3], kIgnoreLabel);
    EXPECT_EQ(ps.mask(0)[0], 2);
}

TEST(Tile, StrideEqualSizeGivesDisjointTiles) {
    const auto ps = tile(ramp_stack(100, 90, 1), labels_of(100, 90, 0), {20, 20, 0.0}, "a",
                         PlatformKind::synthetic);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        for (std::size_t j = i + 1; j < ps.size(); ++j) {
            const auto& a = ps.samples[i].provenance;
            const auto& b = ps.samples[j].provenance;
            const bool overlap = a.row < b.row + 20 && b.row < a.row + 20 && a.col < b.col + 20 && b.col < a.col + 20;
            EXPECT_FALSE(overlap);
        }
    }
}

TEST(Transform, MatchesIndexDefinitions) {
    const std::size_t n = 3;
    std::vector<int> src(n * n);
    for (std::size_t i = 0; i < src.size(); ++i) src[i] = int(i);
    std::vector<float> f(src.begin(), src.end());
    auto t = [&](Augmentation a) { return transform_square<float>(f, n, 1, a); };
    // Counter-clockwise rotation: the top row becomes the right-to-left first column.
    EXPECT_EQ(t(Augmentation::rot90), (std::vector<float>{2, 5, 8, 1, 4, 7, 0, 3, 6}));
    EXPECT_EQ(t(Augmentation::rot180), (std::vector<float>{8, 7, 6, 5, 4, 3, 2, 1, 0}));
    EXPECT_EQ(t(Augmentation::rot270), (std::vector<float>{6, 3, 0, 7, 4, 1, 8, 5, 2}));
    EXPECT_EQ(t(Augmentation::flip_h), (std::vector<float>{2, 1, 0, 5, 4, 3, 8, 7, 6}));
    EXPECT_EQ(t(Augmentation::flip_v), (std::vector<float>{6, 7, 8, 3, 4, 5, 0, 1, 2}));
    EXPECT_EQ(t(Augmentation::identity), f);
}

TEST(Transform, GroupLaws) {
    std::mt19937_64 gen(1);
    const std::size_t n = 8, c = 3;
    std::vector<float> v(n * n * c);
    for (auto& x : v) x = float(gen() % 10000);
    auto t = [&](const std::vector<float>& d, Augmentation a) { return transform_square<float>(d, n, c, a); };
    EXPECT_EQ(t(t(v, Augmentation::rot180), Augmentation::rot180), v);
    EXPECT_EQ(t(t(v, Augmentation::rot90), Augmentation::rot270), v);
    EXPECT_EQ(t(t(v, Augmentation::rot90), Augmentation::rot90), t(v, Augmentation::rot180));
    EXPECT_EQ(t(t(v, Augmentation::flip_h), Augmentation::flip_h), v);
    EXPECT_EQ(t(t(v, Augmentation::flip_v), Augmentation::flip_h), t(v, Augmentation::rot180));
    // Pixel vectors move as units.
    const auto r = t(v, Augmentation::rot90);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < c; ++k) {
                EXPECT_EQ(r[(i * n + j) * c + k], v[(j * n + (n - 1 - i)) * c + k]);
            }
        }
    }
    EXPECT_THROW(transform_square<float>(std::span<const float>(v).first(10), n, c, Augmentation::rot90),
                 ArgumentError);
}

TEST(Augment, SixVariantsPerPatch) {
    const auto ps = synthetic_set(1, 8, 2, PlatformKind::synthetic, 3);
    const auto aug = augment(ps);
    ASSERT_EQ(aug.size(), 6u);
    std::vector<std::string> tags;
    for (const auto& s : aug.samples) tags.push_back(s.provenance.augmentation);
    EXPECT_EQ(tags, (std::vector<std::string>{"id", "rot90", "rot180", "rot270", "fliph", "flipv"}));
    auto base = ps.patch(0);
    std::sort(base.begin(), base.end());
    for (std::size_t i = 0; i < aug.size(); ++i) {
        EXPECT_EQ(aug.samples[i].provenance.base_id, 0u);
        auto v = aug.patch(i);
        std::sort(v.begin(), v.end());
        EXPECT_EQ(v, base);
        // Mask follows the same transform as the values.
        EXPECT_EQ(aug.mask(i), transform_square<std::uint8_t>(ps.mask(0), 8, 1, kAugmentations[i]));
        EXPECT_EQ(aug.patch(i), transform_square<float>(ps.patch(0), 8, 2, kAugmentations[i]));
    }
    // Siblings share one source tile.
    EXPECT_EQ(aug.samples[0].source.get(), aug.samples[5].source.get());
}

TEST(Augment, CountLawAndSquareRequirement) {
    for (std::size_t count : {1u, 7u, 50u}) {
        EXPECT_EQ(augment(synthetic_set(count, 4, 1, PlatformKind::synthetic, count)).size(), 6 * count);
    }
    auto ps = synthetic_set(1, 4, 1, PlatformKind::synthetic, 1);
    ps.patch_width = 2;
    EXPECT_THROW(augment(ps), ArgumentError);
}

TEST(Split, TenFamilies) {
    const auto aug = augment(synthetic_set(10, 4, 1, PlatformKind::synthetic, 5));
    const auto m = split(aug, 0.2, 42);
    EXPECT_EQ(m.train.size(), 48u);
    EXPECT_EQ(m.val.size(), 12u);
    EXPECT_EQ(split(aug, 0.2, 42), m);
    EXPECT_NE(split(aug, 0.2, 43).val, m.val);
    EXPECT_TRUE(std::is_sorted(m.train.begin(), m.train.end()));
    EXPECT_THROW(split(aug, 0.0, 1), ArgumentError);
    EXPECT_THROW(split(PatchSet{}, 0.2, 1), ArgumentError);
}

TEST(Split, SiblingsStayTogether) {
    const auto aug = augment(synthetic_set(23, 2, 1, PlatformKind::synthetic, 6));
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto m = split(aug, 0.3, seed);
        ASSERT_EQ(m.train.size() + m.val.size(), aug.size());
        std::map<std::size_t, int> side;
        for (auto i : m.train) side[aug.samples[i].provenance.base_id] |= 1;
        for (auto i : m.val) side[aug.samples[i].provenance.base_id] |= 2;
        for (const auto& [base, s] : side) ASSERT_NE(s, 3) << "family " << base << " seed " << seed;
        ASSERT_FALSE(m.train.empty());
    }
}

TEST(Merge, PlatformRule) {
    const auto a = synthetic_set(2, 4, 1, PlatformKind::spaceborne, 1);
    const auto b = synthetic_set(3, 4, 1, PlatformKind::spaceborne, 2);
    const auto c = synthetic_set(1, 4, 1, PlatformKind::airborne, 3);

    const std::vector<PatchSet> same = {a, b};
    const auto m = merge(same, false);
    EXPECT_EQ(m.size(), 5u);
    EXPECT_FALSE(m.mixed_platforms);
    std::set<std::size_t> bases;
    for (const auto& s : m.samples) bases.insert(s.provenance.base_id);
    EXPECT_EQ(bases.size(), 5u);

    const std::vector<PatchSet> mixed = {a, c};
    try {
        merge(mixed, false);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("airborne"), std::string::npos) << e.what();
    }
    const auto forced = merge(mixed, true);
    EXPECT_EQ(forced.size(), 3u);
    EXPECT_TRUE(forced.mixed_platforms);
    EXPECT_FALSE(forced.warning.empty());

    auto d = synthetic_set(1, 4, 2, PlatformKind::spaceborne, 4);
    const std::vector<PatchSet> schema = {a, d};
    EXPECT_THROW(merge(schema, true), ValidationError);
}

TEST(Export, RoundTripIsElementwiseIdentical) {
    test::TempDir dir("dataset");
    const auto aug = augment(synthetic_set(5, 8, 3, PlatformKind::spaceborne, 9));
    const auto m = split(aug, 0.4, 1);
    export_dataset(aug, m, dir.path());
    for (auto f : {"manifest.json", "train.pfr", "train_mask.pfr", "val.pfr", "val_mask.pfr"}) {
        EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
    }
    const auto header = pfr::read_header(dir / "train.pfr");
    EXPECT_EQ(header.height, m.train.size() * 8);
    EXPECT_EQ(header.width, 8u);
    EXPECT_EQ(header.channels, 3u);

    const auto back = import_dataset(dir.path());
    EXPECT_EQ(back.patches.channel_names, aug.channel_names);
    EXPECT_EQ(back.patches.class_names, aug.class_names);
    EXPECT_EQ(back.patches.platform_kind, PlatformKind::spaceborne);
    ASSERT_EQ(back.manifest.train.size(), m.train.size());
    ASSERT_EQ(back.manifest.val.size(), m.val.size());
    for (std::size_t i = 0; i < m.train.size(); ++i) {
        EXPECT_EQ(back.patches.patch(back.manifest.train[i]), aug.patch(m.train[i]));
        EXPECT_EQ(back.patches.mask(back.manifest.train[i]), aug.mask(m.train[i]));
        EXPECT_EQ(back.patches.samples[back.manifest.train[i]].provenance, aug.samples[m.train[i]].provenance);
    }
    for (std::size_t i = 0; i < m.val.size(); ++i) {
        EXPECT_EQ(back.patches.patch(back.manifest.val[i]), aug.patch(m.val[i]));
    }

    std::ifstream in(dir / "manifest.json");
    const auto j = nlohmann::json::parse(in);
    EXPECT_EQ(j["counts"]["total"], 30);
    EXPECT_EQ(j["counts"]["base_patches"], 5);
    EXPECT_EQ(j["counts"]["total"].get<int>(), 6 * j["counts"]["base_patches"].get<int>());
}

TEST(Export, EmptyValSplitWritesNoValFiles) {
    test::TempDir dir("dataset");
    const auto ps = synthetic_set(3, 4, 1, PlatformKind::synthetic, 2);
    SplitManifest m{{0, 1, 2}, {}, 0, 0.0};
    export_dataset(ps, m, dir.path());
    EXPECT_FALSE(std::filesystem::exists(dir / "val.pfr"));
    EXPECT_FALSE(std::filesystem::exists(dir / "val_mask.pfr"));
    std::ifstream in(dir / "manifest.json");
    EXPECT_EQ(nlohmann::json::parse(in)["counts"]["val"], 0);
    EXPECT_EQ(import_dataset(dir.path()).manifest.val.size(), 0u);
}

TEST(Export, MissingManifestIsIoError) {
    test::TempDir dir("dataset");
    EXPECT_THROW(import_dataset(dir.path()), IoError);
}
