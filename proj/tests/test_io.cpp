#include <fstream>

#include <gtest/gtest.h>

#include "polsar/covariance.hpp"
#include "polsar/io.hpp"
#include "polsar/pfr.hpp"
#include "support.hpp"

using namespace polsar;

TEST(Io, SlcOnesFile) {
    test::TempDir dir("io");
    std::vector<float> ones;
    for (int i = 0; i < 16; ++i) ones.insert(ones.end(), {1.0f, 0.0f, 1.0f, 0.0f});
    pfr::write_complex64(dir / "ones.pfr", 4, 4, 2, ones);
    const auto slc = load_slc(dir / "ones.pfr");
    EXPECT_EQ(slc.hh(0, 0), Complex64(1.0f, 0.0f));
    EXPECT_EQ(slc.height(), 4u);
    EXPECT_EQ(slc.meta.scene_id, "ones");
}

TEST(Io, SlcRoundTripBitIdentical) {
    test::TempDir dir("io");
    auto slc = test::random_slc(20, 13, 4);
    slc.meta.platform_kind = PlatformKind::spaceborne;
    slc.meta.incidence_near = 30.0;
    slc.meta.incidence_far = 35.0;
    slc.meta.range_spacing = 0.909;
    save_slc(slc, dir / "a.pfr");
    const auto back = load_slc(dir / "a.pfr");
    EXPECT_TRUE(back.hh == slc.hh);
    EXPECT_TRUE(back.vv == slc.vv);
    EXPECT_EQ(back.meta, slc.meta);
}

TEST(Io, SlcWrongChannelsOrDtype) {
    test::TempDir dir("io");
    pfr::write_complex64(dir / "one.pfr", 2, 2, 1, std::vector<float>(8, 0.0f));
    try {
        load_slc(dir / "one.pfr");
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("channels"), std::string::npos) << e.what();
    }
    pfr::write_f32(dir / "f.pfr", 2, 2, 2, std::vector<float>(8, 0.0f));
    try {
        load_slc(dir / "f.pfr");
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("dtype"), std::string::npos) << e.what();
    }
}

TEST(Io, CovarianceRoundTrip) {
    test::TempDir dir("io");
    const auto cov = compute_covariance(test::random_slc(16, 16, 1), 3, Basis::pauli);
    save_covariance(cov, dir / "c.pfr");
    const auto back = load_covariance(dir / "c.pfr");
    EXPECT_EQ(back.looks, 9u);
    EXPECT_EQ(back.basis, Basis::pauli);
    for (std::size_t i = 0; i < cov.cells.size(); ++i) {
        EXPECT_EQ(back.cells[i].c11, double(float(cov.cells[i].c11)));
        EXPECT_EQ(back.cells[i].c12.imag(), double(float(cov.cells[i].c12.imag())));
    }
}

TEST(Io, CovarianceRejectsNonPsdCells) {
    test::TempDir dir("io");
    pfr::write_f32(dir / "c.pfr", 1, 1, 4, std::vector<float>{1.0f, 1.0f, 3.0f, 0.0f});
    EXPECT_THROW(load_covariance(dir / "c.pfr"), FormatError);
}

TEST(Io, HalphaAndZonesRoundTrip) {
    test::TempDir dir("io");
    const auto f = h_alpha_field(compute_covariance(test::random_slc(12, 12, 2), 3, Basis::pauli));
    save_halpha(f, dir / "h.pfr");
    const auto back = load_halpha(dir / "h.pfr");
    for (std::size_t i = 0; i < f.entropy.size(); ++i) {
        EXPECT_EQ(back.entropy[i], double(float(f.entropy[i])));
        EXPECT_EQ(back.valid[i], f.valid[i]);
    }
    const auto z = zone_map(f);
    save_zones(z, dir / "z.pfr");
    EXPECT_EQ(load_zones(dir / "z.pfr").labels, z.labels);

    pfr::write_u8(dir / "bad.pfr", 1, 1, 1, std::vector<std::uint8_t>{3});
    EXPECT_THROW(load_zones(dir / "bad.pfr"), FormatError);
}

TEST(Io, ClassMapSidecar) {
    test::TempDir dir("io");
    ClassMap m{Raster<std::uint8_t>(3, 2, 1), {"water", "roads"}};
    m.labels(0, 0) = kIgnoreLabel;
    save_classmap(m, dir / "m.pfr");
    const auto back = load_classmap(dir / "m.pfr");
    EXPECT_EQ(back.labels, m.labels);
    EXPECT_EQ(back.class_names, m.class_names);

    std::filesystem::remove(pfr::sidecar_path(dir / "m.pfr"));
    EXPECT_EQ(load_classmap(dir / "m.pfr").class_names, (std::vector<std::string>{"class0", "class1"}));
}

TEST(Io, SceneSpecJson) {
    const auto s = scene_spec_from_json({{"height", 64}, {"width", 32}, {"seed", 9}, {"classes", "presets"}});
    EXPECT_EQ(s.height, 64u);
    EXPECT_EQ(s.classes.size(), 5u);
    const auto again = scene_spec_from_json(to_json(s));
    EXPECT_EQ(again.classes[4].rho_phase, s.classes[4].rho_phase);
    EXPECT_EQ(again.seed, 9u);

    EXPECT_THROW(scene_spec_from_json({{"height", 8}}), ValidationError);
    EXPECT_THROW(scene_spec_from_json({{"layout", "spiral"}}), ValidationError);
    EXPECT_THROW(
        scene_spec_from_json({{"classes", {{{"name", "x"}, {"sigma_hh", 1.0}, {"sigma_vv", 1.0}, {"rho_mag", 1.5}}}}}),
        ValidationError);
}

TEST(Io, TruthJsonCarriesAnalyticValues) {
    SceneSpec s;
    s.classes = default_presets();
    const auto j = truth_json(s);
    ASSERT_EQ(j["classes"].size(), 5u);
    EXPECT_EQ(j["classes"][0]["name"], "water");
    EXPECT_DOUBLE_EQ(j["classes"][4]["alpha_deg"].get<double>(), analytic_truth(s.classes[4]).alpha_deg);
}
