#include "polsar/io.hpp"

#include "polsar/pfr.hpp"

namespace polsar {

using nlohmann::json;

namespace {

std::uint32_t dim(std::size_t v) { return static_cast<std::uint32_t>(v); }

pfr::Image read_checked(const std::filesystem::path& path, pfr::Dtype dtype, std::uint32_t channels,
                        const char* what) {
    auto img = pfr::read(path);
    if (img.header.dtype != dtype) {
        throw FormatError(path.string() + ": dtype code " +
                          std::to_string(int(img.header.dtype)) + " is wrong for a " + what +
                          " (expected " + std::to_string(int(dtype)) + ")");
    }
    if (img.header.channels != channels) {
        throw FormatError(path.string() + ": channels = " + std::to_string(img.header.channels) +
                          ", a " + what + " needs " + std::to_string(channels));
    }
    if (img.header.height == 0 || img.header.width == 0) {
        throw FormatError(path.string() + ": height/width must be >= 1");
    }
    return img;
}

} // namespace

json to_json(const AcquisitionMeta& meta) {
    return {{"platform_kind", to_string(meta.platform_kind)},
            {"incidence_near", meta.incidence_near},
            {"incidence_far", meta.incidence_far},
            {"range_spacing", meta.range_spacing},
            {"azimuth_spacing", meta.azimuth_spacing},
            {"scene_id", meta.scene_id}};
}

AcquisitionMeta meta_from_json(const json& j) {
    AcquisitionMeta m;
    try {
        if (j.contains("platform_kind")) m.platform_kind = parse_platform_kind(j.at("platform_kind"));
        m.incidence_near = j.value("incidence_near", m.incidence_near);
        m.incidence_far = j.value("incidence_far", m.incidence_far);
        m.range_spacing = j.value("range_spacing", m.range_spacing);
        m.azimuth_spacing = j.value("azimuth_spacing", m.azimuth_spacing);
        m.scene_id = j.value("scene_id", m.scene_id);
    } catch (const json::exception& e) {
        throw FormatError(std::string("acquisition metadata: ") + e.what());
    }
    m.validate();
    return m;
}

void save_slc(const SlcImage& slc, const std::filesystem::path& path) {
    slc.validate();
    std::vector<float> payload;
    payload.reserve(slc.hh.size() * 4);
    for (std::size_t i = 0; i < slc.hh.size(); ++i) {
        payload.push_back(slc.hh[i].real());
        payload.push_back(slc.hh[i].imag());
        payload.push_back(slc.vv[i].real());
        payload.push_back(slc.vv[i].imag());
    }
    pfr::write_complex64(path, dim(slc.height()), dim(slc.width()), 2, payload);
    json side = to_json(slc.meta);
    side["kind"] = "slc";
    side["channel_names"] = {"hh", "vv"};
    pfr::write_sidecar(path, side);
}

SlcImage load_slc(const std::filesystem::path& path) {
    const auto img = read_checked(path, pfr::Dtype::complex64, 2, "dual-pol SLC");
    SlcImage slc;
    slc.hh = Raster<Complex64>(img.header.height, img.header.width);
    slc.vv = Raster<Complex64>(img.header.height, img.header.width);
    for (std::size_t i = 0; i < slc.hh.size(); ++i) {
        slc.hh[i] = {img.floats[4 * i], img.floats[4 * i + 1]};
        slc.vv[i] = {img.floats[4 * i + 2], img.floats[4 * i + 3]};
    }
    slc.meta = meta_from_json(pfr::read_sidecar(path));
    if (slc.meta.scene_id.empty()) slc.meta.scene_id = path.stem().string();
    slc.validate();
    return slc;
}

void save_covariance(const CovarianceField& cov, const std::filesystem::path& path) {
    std::vector<float> payload;
    payload.reserve(cov.cells.size() * 4);
    for (const auto& m : cov.cells.values()) {
        payload.push_back(float(m.c11));
        payload.push_back(float(m.c22));
        payload.push_back(float(m.c12.real()));
        payload.push_back(float(m.c12.imag()));
    }
    pfr::write_f32(path, dim(cov.height()), dim(cov.width()), 4, payload);
    json side = to_json(cov.meta);
    side["kind"] = "covariance";
    side["looks"] = cov.looks;
    side["basis"] = to_string(cov.basis);
    side["channel_names"] = {"c11", "c22", "c12_re", "c12_im"};
    pfr::write_sidecar(path, side);
}

CovarianceField load_covariance(const std::filesystem::path& path) {
    const auto img = read_checked(path, pfr::Dtype::f32, 4, "covariance field");
    const json side = pfr::read_sidecar(path);
    CovarianceField cov;
    cov.cells = Raster<Herm2>(img.header.height, img.header.width);
    for (std::size_t i = 0; i < cov.cells.size(); ++i) {
        const float* v = img.floats.data() + 4 * i;
        const Herm2 m{v[0], v[1], {v[2], v[3]}};
        // f32 storage perturbs det by ~1e-7 trace^2 relative.
        const double tr = m.trace();
        if (!m.finite() || m.c11 < 0.0 || m.c22 < 0.0 || m.det() < -1e-6 * tr * tr) {
            throw FormatError(path.string() + ": cell " + std::to_string(i) + " is not Hermitian PSD");
        }
        cov.cells[i] = m;
    }
    try {
        cov.looks = side.value("looks", 1u);
        cov.basis = parse_basis(side.value("basis", std::string("lexicographic")));
    } catch (const json::exception& e) {
        throw FormatError(path.string() + " sidecar: " + e.what());
    }
    if (cov.looks < 1) throw FormatError(path.string() + ": looks must be >= 1");
    cov.meta = meta_from_json(side);
    return cov;
}

void save_halpha(const HAlphaField& f, const std::filesystem::path& path) {
    std::vector<float> payload;
    payload.reserve(f.entropy.size() * 4);
    for (std::size_t i = 0; i < f.entropy.size(); ++i) {
        const bool ok = f.valid[i] != 0;
        payload.push_back(ok ? float(f.entropy[i]) : 0.0f);
        payload.push_back(ok ? float(f.alpha[i]) : 0.0f);
        payload.push_back(ok ? float(f.lambda1[i]) : 0.0f);
        payload.push_back(ok ? float(f.lambda2[i]) : 0.0f);
    }
    pfr::write_f32(path, dim(f.height()), dim(f.width()), 4, payload);
    pfr::write_sidecar(path, {{"kind", "halpha"},
                              {"channel_names", {"entropy", "alpha_deg", "lambda1", "lambda2"}}});
}

HAlphaField load_halpha(const std::filesystem::path& path) {
    const auto img = read_checked(path, pfr::Dtype::f32, 4, "H/alpha field");
    const std::size_t H = img.header.height, W = img.header.width;
    HAlphaField f{Raster<double>(H, W), Raster<double>(H, W), Raster<double>(H, W),
                  Raster<double>(H, W), Raster<std::uint8_t>(H, W)};
    for (std::size_t i = 0; i < f.entropy.size(); ++i) {
        const float* v = img.floats.data() + 4 * i;
        f.entropy[i] = v[0];
        f.alpha[i] = v[1];
        f.lambda1[i] = v[2];
        f.lambda2[i] = v[3];
        f.valid[i] = (double(v[2]) + double(v[3])) > 0.0 ? 1 : 0;
        if (f.valid[i] && !(v[0] >= 0.0f && v[0] <= 1.0f && v[1] >= 0.0f && v[1] <= 90.0f)) {
            throw FormatError(path.string() + ": pixel " + std::to_string(i) +
                              " has H or alpha out of range");
        }
    }
    return f;
}

void save_zones(const ZoneMap& zones, const std::filesystem::path& path) {
    pfr::write_u8(path, dim(zones.labels.height()), dim(zones.labels.width()), 1,
                  zones.labels.values());
    json names = json::array();
    for (auto z : kFeasibleZones) names.push_back("Z" + std::to_string(z));
    pfr::write_sidecar(path, {{"kind", "zones"}, {"zone_ids", kFeasibleZones}, {"zone_names", names}});
}

ZoneMap load_zones(const std::filesystem::path& path) {
    const auto img = read_checked(path, pfr::Dtype::u8, 1, "zone map");
    ZoneMap z{Raster<std::uint8_t>(img.header.height, img.header.width)};
    z.labels.values() = img.bytes;
    for (auto v : img.bytes) {
        if (v == kInvalidZone) continue;
        if (v < 1 || v > 9 || v == 3) {
            throw FormatError(path.string() + ": zone id " + std::to_string(v) + " is not feasible");
        }
    }
    return z;
}

void save_classmap(const ClassMap& map, const std::filesystem::path& path, const json& extra) {
    map.validate();
    pfr::write_u8(path, dim(map.height()), dim(map.width()), 1, map.labels.values());
    json side = extra.is_object() ? extra : json::object();
    side["kind"] = side.value("kind", std::string("classmap"));
    side["class_names"] = map.class_names;
    side["ignore_label"] = kIgnoreLabel;
    pfr::write_sidecar(path, side);
}

ClassMap load_classmap(const std::filesystem::path& path) {
    const auto img = read_checked(path, pfr::Dtype::u8, 1, "class map");
    const json side = pfr::read_sidecar(path);
    ClassMap cm;
    cm.labels = Raster<std::uint8_t>(img.header.height, img.header.width);
    cm.labels.values() = img.bytes;
    if (side.contains("class_names")) {
        try {
            cm.class_names = side.at("class_names").get<std::vector<std::string>>();
        } catch (const json::exception& e) {
            throw FormatError(path.string() + " sidecar class_names: " + e.what());
        }
    } else {
        // No schema on disk: name classes by index up to the largest label.
        int max_label = -1;
        for (auto v : img.bytes) {
            if (v != kIgnoreLabel) max_label = std::max(max_label, int(v));
        }
        for (int i = 0; i <= max_label; ++i) cm.class_names.push_back("class" + std::to_string(i));
    }
    try {
        cm.validate();
    } catch (const ValidationError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return cm;
}

json to_json(const ClassSpec& spec) {
    return {{"name", spec.name},
            {"sigma_hh", spec.sigma_hh},
            {"sigma_vv", spec.sigma_vv},
            {"rho_mag", spec.rho_mag},
            {"rho_phase", spec.rho_phase}};
}

ClassSpec class_spec_from_json(const json& j) {
    ClassSpec c;
    try {
        c.name = j.at("name").get<std::string>();
        c.sigma_hh = j.at("sigma_hh").get<double>();
        c.sigma_vv = j.at("sigma_vv").get<double>();
        c.rho_mag = j.value("rho_mag", 0.0);
        c.rho_phase = j.value("rho_phase", 0.0);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("class spec: ") + e.what());
    }
    c.validate();
    return c;
}

SceneSpec scene_spec_from_json(const json& j) {
    SceneSpec s;
    try {
        s.height = j.value("height", s.height);
        s.width = j.value("width", s.width);
        s.layout = parse_layout(j.value("layout", to_string(s.layout)));
        s.seed_count = j.value("seed_count", s.seed_count);
        s.seed = j.value("seed", s.seed);
        s.scene_id = j.value("scene_id", s.scene_id);
        const json& classes = j.contains("classes") ? j.at("classes") : json("presets");
        if (classes.is_string()) {
            if (classes.get<std::string>() != "presets") {
                throw ValidationError("scene.classes: expected a list or \"presets\"");
            }
            s.classes = default_presets();
        } else {
            for (const auto& c : classes) s.classes.push_back(class_spec_from_json(c));
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("scene spec: ") + e.what());
    } catch (const ArgumentError& e) {
        throw ValidationError(std::string("scene spec: ") + e.what());
    }
    try {
        s.validate();
    } catch (const ArgumentError& e) {
        throw ValidationError(e.what());
    }
    return s;
}

json to_json(const SceneSpec& spec) {
    json classes = json::array();
    for (const auto& c : spec.classes) classes.push_back(to_json(c));
    return {{"height", spec.height},
            {"width", spec.width},
            {"layout", to_string(spec.layout)},
            {"seed_count", spec.seed_count},
            {"seed", spec.seed},
            {"scene_id", spec.scene_id},
            {"classes", classes}};
}

json to_json(const Herm2& m) {
    return {{"c11", m.c11}, {"c22", m.c22}, {"c12_re", m.c12.real()}, {"c12_im", m.c12.imag()}};
}

json truth_json(const SceneSpec& spec) {
    json classes = json::array();
    for (std::size_t i = 0; i < spec.classes.size(); ++i) {
        const auto t = analytic_truth(spec.classes[i]);
        classes.push_back({{"id", i},
                           {"name", spec.classes[i].name},
                           {"c2_lexicographic", to_json(t.c2)},
                           {"t2_pauli", to_json(t.t2)},
                           {"entropy", t.entropy},
                           {"alpha_deg", t.alpha_deg},
                           {"zone", zone_classify(t.entropy, t.alpha_deg)}});
    }
    return {{"scene", to_json(spec)}, {"classes", classes}};
}

} // namespace polsar
