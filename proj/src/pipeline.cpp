#include "polsar/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "polsar/io.hpp"

#ifndef POLSAR_VERSION
#define POLSAR_VERSION "unknown"
#endif

namespace polsar {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ValidationError("config." + path + ": " + message);
}

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
    if (!j.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
    for (const auto& [key, value] : j.items()) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
            fail((path.empty() ? "" : path + ".") + key, "unknown key");
        }
    }
}

template <class T>
T get(const json& j, const char* key, const std::string& path, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        fail(path, "has the wrong type");
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw IoError("short write to '" + path.string() + "'");
}

} // namespace

void PipelineConfig::validate() const {
    try {
        scene.validate();
    } catch (const ArgumentError& e) {
        fail("scene", e.what());
    }
    if (window < 1 || window % 2 == 0) fail("window", "must be an odd integer >= 1");
    if (std::size_t(window) > std::min(scene.height, scene.width)) {
        fail("window", "exceeds the scene dimensions");
    }
    if (wishart.max_iter < 1) fail("wishart.max_iter", "must be >= 1");
    if (!(wishart.change_tol > 0.0 && wishart.change_tol < 1.0)) {
        fail("wishart.change_tol", "must lie in (0, 1)");
    }
    if (span_bins < 1 || span_bins * int(kFeasibleZones.size()) > int(kIgnoreLabel)) {
        fail("wishart.span_bins", "must lie in [1, " +
                                      std::to_string(int(kIgnoreLabel) / int(kFeasibleZones.size())) + "]");
    }
    if (merge == MergeMode::table) {
        for (auto z : kFeasibleZones) {
            const auto it = zone_to_class.find(z);
            if (it == zone_to_class.end()) fail("zone_to_class", "zone " + std::to_string(z) + " is not mapped");
            if (it->second >= scene.classes.size()) {
                fail("zone_to_class." + std::to_string(z), "class index out of range");
            }
        }
        for (const auto& [z, c] : zone_to_class) {
            if (std::find(kFeasibleZones.begin(), kFeasibleZones.end(), z) == kFeasibleZones.end()) {
                fail("zone_to_class." + std::to_string(z), "not a feasible zone id");
            }
        }
    }
    if (channels.empty()) fail("channels", "select at least one channel");
    std::set<std::string> seen;
    bool classified_seen = false;
    for (const auto& c : channels) {
        if (std::find(kKnownChannels.begin(), kKnownChannels.end(), c) == kKnownChannels.end()) {
            fail("channels", "unknown channel '" + c + "'");
        }
        if (!seen.insert(c).second) fail("channels", "duplicate channel '" + c + "'");
        const bool classified = c == "zones" || c == "wishart";
        if (!classified && classified_seen) fail("channels", "intensity channels must precede classified channels");
        classified_seen = classified_seen || classified;
    }
    if (tile.size < 1 || tile.size > std::min(scene.height, scene.width)) {
        fail("tile.size", "must lie in [1, min(scene.height, scene.width)]");
    }
    if (tile.stride < 1) fail("tile.stride", "must be >= 1");
    if (!(tile.min_labeled_fraction >= 0.0 && tile.min_labeled_fraction <= 1.0)) {
        fail("tile.min_labeled_fraction", "must lie in [0, 1]");
    }
    if (!(val_ratio > 0.0 && val_ratio < 1.0)) fail("split.val_ratio", "must lie in (0, 1)");
    if (!(db_clamp.high_db > db_clamp.low_db)) fail("db_clamp", "high must exceed low");
    if (density.entropy_bins < 2 || density.alpha_bins < 2) fail("density", "need at least 2 bins per axis");
}

PipelineConfig pipeline_config_from_json(const json& j) {
    reject_unknown(j, "", {"scene", "window", "basis", "wishart", "merge", "zone_to_class", "channels", "tile",
                           "augment", "split", "db_clamp", "density"});
    PipelineConfig c;
    if (j.contains("scene")) {
        try {
            c.scene = scene_spec_from_json(j.at("scene"));
        } catch (const ValidationError& e) {
            fail("scene", e.what());
        }
    } else {
        c.scene.classes = default_presets();
    }
    c.window = get(j, "window", "window", c.window);
    try {
        c.basis = parse_basis(get<std::string>(j, "basis", "basis", to_string(c.basis)));
    } catch (const ArgumentError& e) {
        fail("basis", e.what());
    }

    if (j.contains("wishart")) {
        const json& w = j.at("wishart");
        reject_unknown(w, "wishart", {"max_iter", "change_tol", "span_bins"});
        c.wishart.max_iter = get(w, "max_iter", "wishart.max_iter", c.wishart.max_iter);
        c.wishart.change_tol = get(w, "change_tol", "wishart.change_tol", c.wishart.change_tol);
        c.span_bins = get(w, "span_bins", "wishart.span_bins", c.span_bins);
    }

    const auto merge = get<std::string>(j, "merge", "merge", "reference");
    if (merge == "reference") {
        c.merge = MergeMode::reference;
    } else if (merge == "table") {
        c.merge = MergeMode::table;
    } else {
        fail("merge", "expected \"reference\" or \"table\"");
    }
    if (j.contains("zone_to_class")) {
        const json& t = j.at("zone_to_class");
        if (!t.is_object()) fail("zone_to_class", "expected an object of zone -> class");
        for (const auto& [key, value] : t.items()) {
            const std::string path = "zone_to_class." + key;
            int zone = 0;
            try {
                std::size_t used = 0;
                zone = std::stoi(key, &used);
                if (used != key.size()) throw std::invalid_argument(key);
            } catch (const std::exception&) {
                fail(path, "zone keys must be integers");
            }
            if (std::find(kFeasibleZones.begin(), kFeasibleZones.end(), zone) == kFeasibleZones.end()) {
                fail(path, "not a feasible zone id");
            }
            std::size_t cls = 0;
            if (value.is_string()) {
                const auto name = value.get<std::string>();
                const auto& classes = c.scene.classes;
                const auto it = std::find_if(classes.begin(), classes.end(),
                                             [&](const ClassSpec& s) { return s.name == name; });
                if (it == classes.end()) fail(path, "unknown class '" + name + "'");
                cls = std::size_t(it - classes.begin());
            } else if (value.is_number_unsigned()) {
                cls = value.get<std::size_t>();
            } else {
                fail(path, "expected a class name or index");
            }
            if (cls >= c.scene.classes.size()) fail(path, "class index out of range");
            c.zone_to_class[std::uint8_t(zone)] = std::uint8_t(cls);
        }
    }

    c.channels = get(j, "channels", "channels", c.channels);
    if (j.contains("tile")) {
        const json& t = j.at("tile");
        reject_unknown(t, "tile", {"size", "stride", "min_labeled_fraction"});
        c.tile.size = get(t, "size", "tile.size", c.tile.size);
        c.tile.stride = get(t, "stride", "tile.stride", c.tile.stride);
        c.tile.min_labeled_fraction =
            get(t, "min_labeled_fraction", "tile.min_labeled_fraction", c.tile.min_labeled_fraction);
    }
    c.augment = get(j, "augment", "augment", c.augment);
    if (j.contains("split")) {
        const json& s = j.at("split");
        reject_unknown(s, "split", {"val_ratio", "seed"});
        c.val_ratio = get(s, "val_ratio", "split.val_ratio", c.val_ratio);
        c.split_seed = get(s, "seed", "split.seed", c.split_seed);
    }
    if (j.contains("db_clamp")) {
        const auto v = get<std::vector<double>>(j, "db_clamp", "db_clamp", {});
        if (v.size() != 2) fail("db_clamp", "expected [low_db, high_db]");
        c.db_clamp = {v[0], v[1]};
    }
    if (j.contains("density")) {
        const json& d = j.at("density");
        reject_unknown(d, "density", {"entropy_bins", "alpha_bins"});
        c.density.entropy_bins = get(d, "entropy_bins", "density.entropy_bins", c.density.entropy_bins);
        c.density.alpha_bins = get(d, "alpha_bins", "density.alpha_bins", c.density.alpha_bins);
    }
    c.validate();
    return c;
}

json to_json(const PipelineConfig& c) {
    json table = json::object();
    for (const auto& [z, cls] : c.zone_to_class) table[std::to_string(z)] = cls;
    return {{"scene", to_json(c.scene)},
            {"window", c.window},
            {"basis", to_string(c.basis)},
            {"wishart",
             {{"max_iter", c.wishart.max_iter}, {"change_tol", c.wishart.change_tol}, {"span_bins", c.span_bins}}},
            {"merge", c.merge == MergeMode::reference ? "reference" : "table"},
            {"zone_to_class", table},
            {"channels", c.channels},
            {"tile",
             {{"size", c.tile.size}, {"stride", c.tile.stride}, {"min_labeled_fraction", c.tile.min_labeled_fraction}}},
            {"augment", c.augment},
            {"split", {{"val_ratio", c.val_ratio}, {"seed", c.split_seed}}},
            {"db_clamp", {c.db_clamp.low_db, c.db_clamp.high_db}},
            {"density", {{"entropy_bins", c.density.entropy_bins}, {"alpha_bins", c.density.alpha_bins}}}};
}

std::string config_hash(const json& config) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : config.dump()) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json version_info() {
    json v = {{"polsar", POLSAR_VERSION},
              {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
              {"cxx_standard", long(__cplusplus)}};
#ifdef _OPENMP
    v["openmp"] = _OPENMP;
#endif
#ifdef __VERSION__
    v["compiler"] = __VERSION__;
#endif
    return v;
}

json run_log(const std::string& command, const json& config, const std::vector<std::string>& outputs) {
    return {{"command", command},
            {"config", config},
            {"config_hash", config_hash(config)},
            {"versions", version_info()},
            {"outputs", outputs}};
}

PipelineResult run_pipeline(const PipelineConfig& config, const std::filesystem::path& out_dir) {
    config.validate();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

    PipelineResult result;
    auto& outputs = result.outputs;
    auto out = [&](const std::string& name) {
        outputs.push_back(name);
        return out_dir / name;
    };

    const Scene scene = generate_scene(config.scene);
    save_slc(scene.slc, out("slc.pfr"));
    save_classmap(scene.truth, out("truth.pfr"), {{"kind", "truth"}, {"scene_id", config.scene.scene_id}});
    write_text(out("truth.json"), truth_json(config.scene).dump(2) + "\n");

    const CovarianceField cov = compute_covariance(scene.slc, config.window, config.basis);
    save_covariance(cov, out("covariance.pfr"));
    const CovarianceField pauli = config.basis == Basis::pauli ? cov : change_basis(cov, Basis::pauli);
    const CovarianceField lex = config.basis == Basis::lexicographic ? cov : change_basis(cov, Basis::lexicographic);

    const HAlphaField ha = h_alpha_field(pauli);
    save_halpha(ha, out("halpha.pfr"));
    const ZoneMap zones = zone_map(ha);
    save_zones(zones, out("zones.pfr"));

    for (const auto& p : export_halpha_density(ha, &scene.truth, config.density, out_dir / "density")) {
        outputs.push_back(std::filesystem::relative(p, out_dir).string());
    }
    for (const auto& p : export_halpha_density(ha, nullptr, config.density, out_dir / "density")) {
        outputs.push_back(std::filesystem::relative(p, out_dir).string());
    }

    const ClassMap zone_classes = zones_as_classes(zones);
    const ClassMap init = split_by_span(zone_classes, cov, config.span_bins);
    const WishartResult wr = wishart_iterate(cov, init, config.wishart);
    result.wishart_log = wr.log;
    save_classmap(wr.map, out("wishart_clusters.pfr"), {{"kind", "wishart_clusters"}});
    {
        std::string lines;
        for (const auto& it : wr.log) {
            lines += json{{"iter", it.iteration}, {"changed_fraction", it.changed_fraction},
                          {"objective", it.objective}}
                         .dump() +
                     "\n";
        }
        write_text(out("wishart_log.jsonl"), lines);
    }

    ClassMap classes;
    if (config.merge == MergeMode::reference) {
        classes = merge_by_reference(wr.map, scene.truth);
    } else {
        classes.labels = Raster<std::uint8_t>(wr.map.height(), wr.map.width(), kIgnoreLabel);
        classes.class_names = scene.truth.class_names;
        for (std::size_t i = 0; i < classes.labels.size(); ++i) {
            const auto c = wr.map.labels[i];
            if (c == kIgnoreLabel) continue;
            classes.labels[i] = config.zone_to_class.at(kFeasibleZones[c / std::size_t(config.span_bins)]);
        }
    }
    save_classmap(classes, out("classes.pfr"), {{"kind", "classification"}});

    result.confusion = confusion(classes, scene.truth);
    result.metrics = metrics(result.confusion);
    write_text(out("eval.json"), report_json(result.confusion, result.metrics).dump(2) + "\n");
    write_text(out("eval.txt"), report_text(result.confusion, result.metrics));

    const IntensityChannels inten = intensity_channels(lex, config.db_clamp);
    std::vector<NamedRaster> intensities;
    std::vector<NamedClassMap> classified;
    for (const auto& c : config.channels) {
        if (c == "hh_db") intensities.push_back({c, inten.c11_db});
        if (c == "vv_db") intensities.push_back({c, inten.c22_db});
        if (c == "zones") classified.push_back({c, zone_classes});
        if (c == "wishart") classified.push_back({c, wr.map});
    }
    const ChannelStack stack = stack_channels(intensities, classified);
    PatchSet ps = tile(stack, scene.truth, config.tile, config.scene.scene_id, scene.slc.meta.platform_kind);
    if (config.augment) ps = augment(ps);
    const SplitManifest manifest =
        ps.size() > 0 ? split(ps, config.val_ratio, config.split_seed) : SplitManifest{{}, {}, config.split_seed, config.val_ratio};
    export_dataset(ps, manifest, out_dir / "dataset");
    outputs.push_back("dataset/");
    result.samples = ps.size();

    outputs.push_back("run_log.json");
    json log = run_log("pipeline", to_json(config), outputs);
    log["summary"] = {{"overall_accuracy", result.metrics.overall_accuracy},
                      {"kappa", result.metrics.kappa},
                      {"wishart_iterations", wr.log.size()},
                      {"samples", result.samples},
                      {"train", manifest.train.size()},
                      {"val", manifest.val.size()}};
    write_text(out_dir / "run_log.json", log.dump(2) + "\n");
    return result;
}

} // namespace polsar
