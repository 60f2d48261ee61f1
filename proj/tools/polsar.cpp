// polsar: command-line front end. Every subcommand writes a run log next to
// its outputs. Exit status: 0 ok, 1 bad input, 2 I/O failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "polsar/covariance.hpp"
#include "polsar/dataset.hpp"
#include "polsar/decomposition.hpp"
#include "polsar/eval.hpp"
#include "polsar/io.hpp"
#include "polsar/parallel.hpp"
#include "polsar/pipeline.hpp"
#include "polsar/simulate.hpp"
#include "polsar/wishart.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace polsar;

namespace {

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw IoError("short write to '" + path.string() + "'");
}

void ensure_parent(const fs::path& file) {
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
}

// <out>.run_log.json for file outputs, <out>/run_log.json for directories.
void write_log(const std::string& command, const json& config, const fs::path& out, bool out_is_dir,
               std::vector<std::string> outputs) {
    const fs::path path = out_is_dir ? out / "run_log.json" : fs::path(out.string() + ".run_log.json");
    outputs.push_back(path.string());
    write_text(path, run_log(command, config, outputs).dump(2) + "\n");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

struct Options {
    // simulate
    std::string spec;
    // shared
    std::string out, slc, cov, halpha, zones, pred, truth, mask, config;
    int window = 7;
    std::string basis = "pauli";
    // wishart
    int max_iter = 20;
    double change_tol = 1e-3;
    int span_bins = 1;
    std::string init;
    // merge-classes
    std::string clusters, reference, table;
    // dataset
    std::string channels = "hh_db,vv_db";
    std::vector<std::string> classified;
    std::size_t tile_size = 256, stride = 256;
    double min_labeled = 0.5;
    bool no_augment = false;
    double val_ratio = 0.2;
    std::uint64_t seed = 0;
    std::vector<double> db_clamp = {-35.0, 5.0};
    // plot-halpha
    std::size_t entropy_bins = 10, alpha_bins = 9;
};

int cmd_simulate(const Options& o) {
    const SceneSpec spec = scene_spec_from_json(read_json(o.spec));
    const Scene scene = generate_scene(spec);
    const fs::path dir(o.out);
    fs::create_directories(dir);
    save_slc(scene.slc, dir / "slc.pfr");
    save_classmap(scene.truth, dir / "truth.pfr", {{"kind", "truth"}, {"scene_id", spec.scene_id}});
    write_text(dir / "truth.json", truth_json(spec).dump(2) + "\n");
    write_log("simulate", {{"scene", to_json(spec)}}, dir, true, {"slc.pfr", "truth.pfr", "truth.json"});
    return 0;
}

int cmd_covariance(const Options& o) {
    const SlcImage slc = load_slc(o.slc);
    const Basis basis = parse_basis(o.basis);
    const CovarianceField cov = compute_covariance(slc, o.window, basis);
    ensure_parent(o.out);
    save_covariance(cov, o.out);
    write_log("covariance", {{"slc", o.slc}, {"window", o.window}, {"basis", to_string(basis)}}, o.out, false,
              {o.out});
    return 0;
}

int cmd_halpha(const Options& o) {
    CovarianceField cov = load_covariance(o.cov);
    if (cov.basis != Basis::pauli) cov = change_basis(cov, Basis::pauli);
    ensure_parent(o.out);
    save_halpha(h_alpha_field(cov), o.out);
    write_log("halpha", {{"cov", o.cov}}, o.out, false, {o.out});
    return 0;
}

int cmd_zones(const Options& o) {
    ensure_parent(o.out);
    save_zones(zone_map(load_halpha(o.halpha)), o.out);
    write_log("zones", {{"halpha", o.halpha}}, o.out, false, {o.out});
    return 0;
}

int cmd_wishart(const Options& o) {
    const CovarianceField cov = load_covariance(o.cov);
    ClassMap init = !o.zones.empty() ? zones_as_classes(load_zones(o.zones)) : load_classmap(o.init);
    init = split_by_span(init, cov, o.span_bins);
    const WishartOptions options{o.max_iter, o.change_tol};
    const WishartResult r = wishart_iterate(cov, init, options);
    ensure_parent(o.out);
    save_classmap(r.map, o.out, {{"kind", "wishart_clusters"}});
    std::string lines;
    for (const auto& it : r.log) {
        lines += json{{"iter", it.iteration}, {"changed_fraction", it.changed_fraction}, {"objective", it.objective}}
                     .dump() +
                 "\n";
    }
    const std::string log_path = o.out + ".log.jsonl";
    write_text(log_path, lines);
    write_log("wishart",
              {{"cov", o.cov},
               {"zones", o.zones},
               {"init", o.init},
               {"max_iter", o.max_iter},
               {"change_tol", o.change_tol},
               {"span_bins", o.span_bins}},
              o.out, false, {o.out, log_path});
    return 0;
}

int cmd_merge(const Options& o) {
    ClassMap out;
    json config;
    if (!o.reference.empty()) {
        out = merge_by_reference(load_classmap(o.clusters), load_classmap(o.reference));
        config = {{"clusters", o.clusters}, {"reference", o.reference}};
    } else {
        // {"classes": [names], "zone_to_class": {"<zone>": name or index}}
        const json t = read_json(o.table);
        std::vector<std::string> names;
        std::map<std::uint8_t, std::uint8_t> lut;
        try {
            names = t.at("classes").get<std::vector<std::string>>();
            for (const auto& [key, value] : t.at("zone_to_class").items()) {
                std::size_t cls = 0;
                if (value.is_string()) {
                    const auto it = std::find(names.begin(), names.end(), value.get<std::string>());
                    if (it == names.end()) throw ValidationError("table: unknown class '" + value.get<std::string>() + "'");
                    cls = std::size_t(it - names.begin());
                } else {
                    cls = value.get<std::size_t>();
                }
                lut[std::uint8_t(std::stoi(key))] = std::uint8_t(cls);
            }
        } catch (const json::exception& e) {
            throw ValidationError("table: " + std::string(e.what()));
        } catch (const std::logic_error& e) {
            throw ValidationError("table: bad zone key");
        }
        out = merge_zones_to_classes(load_zones(o.zones), lut, names);
        config = {{"zones", o.zones}, {"table", t}};
    }
    ensure_parent(o.out);
    save_classmap(out, o.out, {{"kind", "classification"}});
    write_log("merge-classes", config, o.out, false, {o.out});
    return 0;
}

int cmd_dataset(const Options& o) {
    if (o.db_clamp.size() != 2) throw ArgumentError("--db-clamp takes LOW HIGH");
    CovarianceField cov = load_covariance(o.cov);
    if (cov.basis != Basis::lexicographic) cov = change_basis(cov, Basis::lexicographic);
    const IntensityChannels inten = intensity_channels(cov, {o.db_clamp[0], o.db_clamp[1]});
    std::vector<NamedRaster> intensities;
    for (const auto& c : split_list(o.channels)) {
        if (c == "hh_db") {
            intensities.push_back({c, inten.c11_db});
        } else if (c == "vv_db") {
            intensities.push_back({c, inten.c22_db});
        } else {
            throw ArgumentError("--channels: unknown intensity channel '" + c + "'");
        }
    }
    std::vector<NamedClassMap> classified;
    for (const auto& spec : o.classified) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) throw ArgumentError("--classified expects NAME=PATH, got '" + spec + "'");
        const fs::path path = spec.substr(eq + 1);
        const std::string name = spec.substr(0, eq);
        // Zone rasters are recognised by their sidecar and re-encoded as ordinals.
        const json side = read_json(fs::path(path).replace_extension(".meta.json"));
        if (side.value("kind", "") == "zones") {
            classified.push_back({name, zones_as_classes(load_zones(path))});
        } else {
            classified.push_back({name, load_classmap(path)});
        }
    }
    const ChannelStack stack = stack_channels(intensities, classified);
    const ClassMap mask = load_classmap(o.mask);
    const TileOptions tile_opts{o.tile_size, o.stride, o.min_labeled};
    PatchSet ps = tile(stack, mask, tile_opts, cov.meta.scene_id, cov.meta.platform_kind);
    if (!o.no_augment) ps = augment(ps);
    const SplitManifest manifest =
        ps.size() > 0 ? split(ps, o.val_ratio, o.seed) : SplitManifest{{}, {}, o.seed, o.val_ratio};
    export_dataset(ps, manifest, o.out);
    write_log("dataset",
              {{"cov", o.cov},
               {"mask", o.mask},
               {"channels", split_list(o.channels)},
               {"classified", o.classified},
               {"tile", {{"size", o.tile_size}, {"stride", o.stride}, {"min_labeled_fraction", o.min_labeled}}},
               {"augment", !o.no_augment},
               {"split", {{"val_ratio", o.val_ratio}, {"seed", o.seed}}},
               {"db_clamp", o.db_clamp}},
              o.out, true, {"manifest.json"});
    std::cout << ps.size() << " samples: " << manifest.train.size() << " train, " << manifest.val.size()
              << " val\n";
    return 0;
}

int cmd_eval(const Options& o) {
    const ClassMap pred = load_classmap(o.pred);
    const ClassMap truth = load_classmap(o.truth);
    if (pred.height() != truth.height() || pred.width() != truth.width()) {
        throw ValidationError("eval: prediction is " + std::to_string(pred.height()) + "x" +
                              std::to_string(pred.width()) + " but truth is " + std::to_string(truth.height()) +
                              "x" + std::to_string(truth.width()));
    }
    const ConfusionMatrix cm = confusion(pred, truth);
    const Metrics m = metrics(cm);
    ensure_parent(o.out);
    write_text(o.out, report_json(cm, m).dump(2) + "\n");
    std::cout << report_text(cm, m);
    write_log("eval", {{"pred", o.pred}, {"truth", o.truth}}, o.out, false, {o.out});
    return 0;
}

int cmd_plot_halpha(const Options& o) {
    const HAlphaField field = load_halpha(o.halpha);
    const DensityBins bins{o.entropy_bins, o.alpha_bins};
    std::vector<std::string> written;
    if (!o.mask.empty()) {
        const ClassMap mask = load_classmap(o.mask);
        for (const auto& p : export_halpha_density(field, &mask, bins, o.out)) written.push_back(p.string());
    } else {
        for (const auto& p : export_halpha_density(field, nullptr, bins, o.out)) written.push_back(p.string());
    }
    write_log("plot-halpha",
              {{"halpha", o.halpha}, {"mask", o.mask}, {"entropy_bins", o.entropy_bins}, {"alpha_bins", o.alpha_bins}},
              o.out, true, written);
    return 0;
}

int cmd_pipeline(const Options& o) {
    const PipelineConfig config = pipeline_config_from_json(read_json(o.config));
    const PipelineResult r = run_pipeline(config, o.out);
    std::printf("OA %.4f  kappa %.4f  wishart iterations %zu  samples %zu\n", r.metrics.overall_accuracy,
                r.metrics.kappa, r.wishart_log.size(), r.samples);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dual-pol SAR H/alpha, Wishart and dataset toolkit"};
    app.failure_message(CLI::FailureMessage::help);
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(POLSAR_VERSION));

    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (default: POLSAR_THREADS, else all cores)")
        ->check(CLI::NonNegativeNumber);

    Options o;
    auto* sim = app.add_subcommand("simulate", "Generate a synthetic dual-pol scene");
    sim->add_option("--spec", o.spec, "Scene spec JSON")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", o.out, "Output directory")->required();

    auto* cov = app.add_subcommand("covariance", "Boxcar covariance of an SLC");
    cov->add_option("--slc", o.slc, "SLC PFR")->required();
    cov->add_option("--window", o.window, "Odd boxcar window")->capture_default_str();
    cov->add_option("--basis", o.basis, "lexicographic or pauli")->capture_default_str()
        ->check(CLI::IsMember({"lexicographic", "pauli"}));
    cov->add_option("--out", o.out, "Covariance PFR")->required();

    auto* ha = app.add_subcommand("halpha", "Entropy / alpha decomposition");
    ha->add_option("--cov", o.cov, "Covariance PFR")->required();
    ha->add_option("--out", o.out, "H/alpha PFR")->required();

    auto* zn = app.add_subcommand("zones", "H-alpha plane zone map");
    zn->add_option("--halpha", o.halpha, "H/alpha PFR")->required();
    zn->add_option("--out", o.out, "Zone PFR")->required();

    auto* wi = app.add_subcommand("wishart", "Iterative complex Wishart clustering");
    wi->add_option("--cov", o.cov, "Covariance PFR")->required();
    auto* wz = wi->add_option("--zones", o.zones, "Initialize from a zone map");
    auto* wc = wi->add_option("--init", o.init, "Initialize from a class map");
    wz->excludes(wc);
    wi->add_option("--max-iter", o.max_iter, "Iteration cap")->capture_default_str();
    wi->add_option("--change-tol", o.change_tol, "Stop when the changed fraction drops below this")->capture_default_str();
    wi->add_option("--span-bins", o.span_bins, "Span-quantile sub-classes per initial class")->capture_default_str();
    wi->add_option("--out", o.out, "Cluster map PFR")->required();

    auto* mg = app.add_subcommand("merge-classes", "Map clusters or zones to land-cover classes");
    auto* mc = mg->add_option("--clusters", o.clusters, "Cluster map PFR");
    auto* mr = mg->add_option("--reference", o.reference, "Reference class map for majority voting");
    auto* mz = mg->add_option("--zones", o.zones, "Zone map PFR");
    auto* mt = mg->add_option("--table", o.table, "Zone-to-class table JSON");
    mc->needs(mr);
    mr->needs(mc);
    mz->needs(mt);
    mt->needs(mz);
    mr->excludes(mt);
    mg->add_option("--out", o.out, "Class map PFR")->required();

    auto* ds = app.add_subcommand("dataset", "Stack channels, tile, augment, split and export");
    ds->add_option("--cov", o.cov, "Covariance PFR (intensities)")->required();
    ds->add_option("--mask", o.mask, "Label mask class map PFR")->required();
    ds->add_option("--channels", o.channels, "Comma-separated intensity channels")->capture_default_str();
    ds->add_option("--classified", o.classified, "Classified channel NAME=PATH, repeatable");
    ds->add_option("--tile-size", o.tile_size, "Tile edge")->capture_default_str();
    ds->add_option("--stride", o.stride, "Tile stride")->capture_default_str();
    ds->add_option("--min-labeled", o.min_labeled, "Minimum labeled fraction per tile")->capture_default_str();
    ds->add_flag("--no-augment", o.no_augment, "Skip the six-fold augmentation");
    ds->add_option("--val-ratio", o.val_ratio, "Validation share of tile families")->capture_default_str();
    ds->add_option("--seed", o.seed, "Split seed")->capture_default_str();
    ds->add_option("--db-clamp", o.db_clamp, "LOW HIGH in dB")->capture_default_str()->expected(2);
    ds->add_option("--out", o.out, "Dataset directory")->required();

    auto* ev = app.add_subcommand("eval", "Confusion matrix, OA, kappa, F1, IoU");
    ev->add_option("--pred", o.pred, "Predicted class map PFR")->required();
    ev->add_option("--truth", o.truth, "Truth class map PFR")->required();
    auto* ev_out = ev->add_option("--out", o.out, "Report JSON (default eval.json)");

    auto* ph = app.add_subcommand("plot-halpha", "Per-class H-alpha plane density CSVs");
    ph->add_option("--halpha", o.halpha, "H/alpha PFR")->required();
    ph->add_option("--mask", o.mask, "Class map; omit for a single 'all' density");
    ph->add_option("--entropy-bins", o.entropy_bins, "Bins along H")->capture_default_str();
    ph->add_option("--alpha-bins", o.alpha_bins, "Bins along alpha")->capture_default_str();
    ph->add_option("--out", o.out, "Output directory")->required();

    auto* pl = app.add_subcommand("pipeline", "simulate through dataset and eval in one run");
    pl->add_option("--config", o.config, "Pipeline config JSON")->required();
    pl->add_option("--out", o.out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    if (ev->parsed() && ev_out->count() == 0) o.out = "eval.json";
    if (mg->parsed() && o.reference.empty() && o.table.empty()) {
        std::cerr << "merge-classes: give --clusters/--reference or --zones/--table\n" << mg->help();
        return 1;
    }
    if (wi->parsed() && o.zones.empty() && o.init.empty()) {
        std::cerr << "wishart: give --zones or --init\n" << wi->help();
        return 1;
    }

    set_thread_count(threads > 0 ? threads : thread_count_from_env());

    try {
        if (sim->parsed()) return cmd_simulate(o);
        if (cov->parsed()) return cmd_covariance(o);
        if (ha->parsed()) return cmd_halpha(o);
        if (zn->parsed()) return cmd_zones(o);
        if (wi->parsed()) return cmd_wishart(o);
        if (mg->parsed()) return cmd_merge(o);
        if (ds->parsed()) return cmd_dataset(o);
        if (ev->parsed()) return cmd_eval(o);
        if (ph->parsed()) return cmd_plot_halpha(o);
        if (pl->parsed()) return cmd_pipeline(o);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
