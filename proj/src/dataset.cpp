#include "polsar/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "polsar/pfr.hpp"
#include "polsar/rng.hpp"

namespace polsar {

using nlohmann::json;

std::string to_string(Augmentation a) {
    switch (a) {
    case Augmentation::identity: return "id";
    case Augmentation::rot90: return "rot90";
    case Augmentation::rot180: return "rot180";
    case Augmentation::rot270: return "rot270";
    case Augmentation::flip_h: return "fliph";
    case Augmentation::flip_v: return "flipv";
    }
    return "id";
}

ChannelStack stack_channels(std::span<const NamedRaster> intensities,
                            std::span<const NamedClassMap> classified) {
    if (intensities.empty() && classified.empty()) {
        throw ArgumentError("stack_channels: no channels selected");
    }
    const std::size_t H = intensities.empty() ? classified.front().map.height()
                                              : intensities.front().data.height();
    const std::size_t W = intensities.empty() ? classified.front().map.width()
                                              : intensities.front().data.width();
    ChannelStack out;
    out.valid = Raster<std::uint8_t>(H, W, 1);

    for (const auto& in : intensities) {
        if (in.data.height() != H || in.data.width() != W) {
            throw ArgumentError("stack_channels: channel '" + in.name + "' has mismatched dimensions");
        }
        out.channels.push_back(in.data);
        out.names.push_back(in.name);
    }
    for (const auto& cm : classified) {
        if (cm.map.height() != H || cm.map.width() != W) {
            throw ArgumentError("stack_channels: channel '" + cm.name + "' has mismatched dimensions");
        }
        cm.map.validate();
        const std::size_t K = cm.map.class_count();
        const float scale = K > 1 ? 1.0f / float(K - 1) : 0.0f;
        Raster<float> enc(H, W);
        for (std::size_t i = 0; i < enc.size(); ++i) {
            const auto label = cm.map.labels[i];
            if (label == kIgnoreLabel) {
                enc[i] = 1.0f;
                out.valid[i] = 0;
            } else {
                enc[i] = float(label) * scale;
            }
        }
        out.channels.push_back(std::move(enc));
        out.names.push_back(cm.name);
    }
    return out;
}

template <class T>
std::vector<T> transform_square(std::span<const T> data, std::size_t n, std::size_t channels,
                                Augmentation a) {
    if (data.size() != n * n * channels) {
        throw ArgumentError("transform: buffer is not " + std::to_string(n) + "x" +
                            std::to_string(n) + "x" + std::to_string(channels));
    }
    std::vector<T> out(data.size());
    const std::size_t last = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t si = i, sj = j;
            switch (a) {
            case Augmentation::identity: break;
            case Augmentation::rot90: si = j; sj = last - i; break;
            case Augmentation::rot180: si = last - i; sj = last - j; break;
            case Augmentation::rot270: si = last - j; sj = i; break;
            case Augmentation::flip_h: sj = last - j; break;
            case Augmentation::flip_v: si = last - i; break;
            }
            std::copy_n(data.begin() + (si * n + sj) * channels, channels,
                        out.begin() + (i * n + j) * channels);
        }
    }
    return out;
}

template std::vector<float> transform_square(std::span<const float>, std::size_t, std::size_t,
                                             Augmentation);
template std::vector<std::uint8_t> transform_square(std::span<const std::uint8_t>, std::size_t,
                                                    std::size_t, Augmentation);

std::vector<float> PatchSet::patch(std::size_t i) const {
    const Sample& s = samples.at(i);
    std::vector<float> v = s.source->values;
    for (auto a : s.transforms) v = transform_square<float>(v, patch_width, channel_count(), a);
    return v;
}

std::vector<std::uint8_t> PatchSet::mask(std::size_t i) const {
    const Sample& s = samples.at(i);
    std::vector<std::uint8_t> m = s.source->mask;
    for (auto a : s.transforms) m = transform_square<std::uint8_t>(m, patch_width, 1, a);
    return m;
}

void PatchSet::add(PatchData data, Provenance provenance) {
    samples.push_back({std::make_shared<const PatchData>(std::move(data)), {}, std::move(provenance)});
}

void PatchSet::validate() const {
    const std::size_t pixels = patch_height * patch_width;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!s.source || s.source->values.size() != pixels * channel_count() ||
            s.source->mask.size() != pixels) {
            throw ValidationError("patch " + std::to_string(i) + " does not match the " +
                                  std::to_string(patch_height) + "x" + std::to_string(patch_width) +
                                  "x" + std::to_string(channel_count()) + " schema");
        }
        for (auto v : s.source->mask) {
            if (v != kIgnoreLabel && v >= class_names.size()) {
                throw ValidationError("patch " + std::to_string(i) + ": mask label " +
                                      std::to_string(v) + " exceeds class count");
            }
        }
    }
}

PatchSet tile(const ChannelStack& stack, const ClassMap& mask, const TileOptions& options,
              const std::string& scene_id, PlatformKind platform) {
    require_same_shape(stack.valid, mask.labels, "tile");
    const std::size_t H = stack.height(), W = stack.width(), n = options.size;
    if (n < 1 || n > H || n > W) {
        throw ArgumentError("tile: size " + std::to_string(n) + " does not fit a " +
                            std::to_string(H) + "x" + std::to_string(W) + " raster");
    }
    if (options.stride < 1) throw ArgumentError("tile: stride must be >= 1");
    if (!(options.min_labeled_fraction >= 0.0 && options.min_labeled_fraction <= 1.0)) {
        throw ArgumentError("tile: min_labeled_fraction must lie in [0, 1]");
    }

    PatchSet ps;
    ps.patch_height = ps.patch_width = n;
    ps.channel_names = stack.names;
    ps.class_names = mask.class_names;
    ps.platform_kind = platform;
    const std::size_t C = stack.channels.size();

    std::size_t base_id = 0;
    for (std::size_t r = 0; r + n <= H; r += options.stride) {
        for (std::size_t c = 0; c + n <= W; c += options.stride) {
            PatchData d;
            d.values.resize(n * n * C);
            d.mask.resize(n * n);
            std::size_t labeled = 0;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    const std::size_t y = r + i, x = c + j;
                    for (std::size_t k = 0; k < C; ++k) {
                        d.values[(i * n + j) * C + k] = stack.channels[k](y, x);
                    }
                    const auto label = stack.valid(y, x) ? mask.labels(y, x) : kIgnoreLabel;
                    d.mask[i * n + j] = label;
                    labeled += (label != kIgnoreLabel);
                }
            }
            if (double(labeled) < options.min_labeled_fraction * double(n * n)) continue;
            ps.add(std::move(d), {scene_id, r, c, "id", base_id++});
        }
    }
    return ps;
}

PatchSet augment(const PatchSet& ps) {
    if (ps.patch_height != ps.patch_width) {
        throw ArgumentError("augment: patches are " + std::to_string(ps.patch_height) + "x" +
                            std::to_string(ps.patch_width) + ", rotations need square patches");
    }
    PatchSet out = ps;
    out.samples.clear();
    out.samples.reserve(ps.samples.size() * kAugmentations.size());
    for (const auto& s : ps.samples) {
        for (auto a : kAugmentations) {
            Sample v = s;
            v.transforms.push_back(a);
            v.provenance.augmentation =
                s.transforms.empty() ? to_string(a) : s.provenance.augmentation + "+" + to_string(a);
            out.samples.push_back(std::move(v));
        }
    }
    return out;
}

SplitManifest split(const PatchSet& ps, double val_ratio, std::uint64_t seed) {
    if (ps.size() == 0) throw ArgumentError("split: empty patch set");
    if (!(val_ratio > 0.0 && val_ratio < 1.0)) throw ArgumentError("split: val_ratio must lie in (0, 1)");

    std::vector<std::size_t> families;
    std::map<std::size_t, std::size_t> family_of;
    for (const auto& s : ps.samples) {
        if (family_of.emplace(s.provenance.base_id, families.size()).second) {
            families.push_back(s.provenance.base_id);
        }
    }
    const auto key = rng::key_from_seed(seed);
    for (std::size_t i = families.size() - 1; i > 0; --i) {
        const auto j = rng::below({std::uint32_t(i), std::uint32_t(i >> 32), 0, 2}, key, i + 1);
        std::swap(families[i], families[j]);
    }
    auto n_val = std::size_t(std::llround(val_ratio * double(families.size())));
    n_val = std::min(n_val, families.size() - 1);

    std::map<std::size_t, bool> is_val;
    for (std::size_t i = 0; i < families.size(); ++i) is_val[families[i]] = i < n_val;

    SplitManifest m;
    m.seed = seed;
    m.val_ratio = val_ratio;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        (is_val[ps.samples[i].provenance.base_id] ? m.val : m.train).push_back(i);
    }
    return m;
}

PatchSet merge(std::span<const PatchSet> sets, bool force) {
    if (sets.empty()) throw ArgumentError("merge: nothing to merge");
    const PatchSet& first = sets.front();
    PatchSet out = first;
    out.samples.clear();

    std::size_t offset = 0;
    for (const auto& ps : sets) {
        if (ps.channel_names != first.channel_names || ps.patch_height != first.patch_height ||
            ps.patch_width != first.patch_width || ps.class_names != first.class_names) {
            throw ValidationError("merge: patch sets have different channel or class schemas");
        }
        if (ps.platform_kind != first.platform_kind || ps.mixed_platforms) {
            if (!force) {
                throw ValidationError("merge: refusing to mix " + to_string(first.platform_kind) +
                                      " and " + to_string(ps.platform_kind) +
                                      " training data; imaging geometry and resolution differ "
                                      "between platforms (pass force to override)");
            }
            out.mixed_platforms = true;
            out.warning = "training data mixes platform kinds (" + to_string(first.platform_kind) +
                          ", " + to_string(ps.platform_kind) + "); merged with force";
        }
        std::size_t max_base = 0;
        for (const auto& s : ps.samples) {
            Sample copy = s;
            copy.provenance.base_id += offset;
            max_base = std::max(max_base, s.provenance.base_id + 1);
            out.samples.push_back(std::move(copy));
        }
        offset += max_base;
    }
    return out;
}

namespace {

json provenance_json(const Provenance& p) {
    return {{"scene_id", p.scene_id},
            {"row", p.row},
            {"col", p.col},
            {"augmentation", p.augmentation},
            {"base_id", p.base_id}};
}

Provenance provenance_from(const json& j) {
    return {j.at("scene_id").get<std::string>(), j.at("row").get<std::size_t>(),
            j.at("col").get<std::size_t>(), j.at("augmentation").get<std::string>(),
            j.at("base_id").get<std::size_t>()};
}

void write_split(const PatchSet& ps, const std::vector<std::size_t>& indices,
                 const std::filesystem::path& tensor, const std::filesystem::path& mask) {
    const auto n = std::uint32_t(indices.size() * ps.patch_height);
    const auto w = std::uint32_t(ps.patch_width);
    pfr::StreamWriter tw(tensor, {pfr::Dtype::f32, n, w, std::uint32_t(ps.channel_count())});
    pfr::StreamWriter mw(mask, {pfr::Dtype::u8, n, w, 1});
    for (auto i : indices) {
        tw.append(std::span<const float>(ps.patch(i)));
        mw.append(std::span<const std::uint8_t>(ps.mask(i)));
    }
    tw.finish();
    mw.finish();
}

} // namespace

void export_dataset(const PatchSet& ps, const SplitManifest& manifest,
                    const std::filesystem::path& dir) {
    ps.validate();
    for (auto i : manifest.train) {
        if (i >= ps.size()) throw ArgumentError("export: split index out of range");
    }
    for (auto i : manifest.val) {
        if (i >= ps.size()) throw ArgumentError("export: split index out of range");
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

    std::set<std::size_t> families;
    for (const auto& s : ps.samples) families.insert(s.provenance.base_id);

    json j;
    j["format"] = "polsar-patchset/1";
    j["patch_height"] = ps.patch_height;
    j["patch_width"] = ps.patch_width;
    j["channels"] = ps.channel_count();
    j["channel_names"] = ps.channel_names;
    j["class_names"] = ps.class_names;
    j["platform_kind"] = to_string(ps.platform_kind);
    j["mixed_platforms"] = ps.mixed_platforms;
    j["warning"] = ps.warning;
    j["split"] = {{"seed", manifest.seed}, {"val_ratio", manifest.val_ratio}};
    j["counts"] = {{"train", manifest.train.size()},
                   {"val", manifest.val.size()},
                   {"total", manifest.train.size() + manifest.val.size()},
                   {"base_patches", families.size()}};

    for (const auto& [name, indices] :
         {std::pair{std::string("train"), &manifest.train}, std::pair{std::string("val"), &manifest.val}}) {
        json entry = {{"count", indices->size()}};
        json prov = json::array();
        for (auto i : *indices) prov.push_back(provenance_json(ps.samples[i].provenance));
        entry["provenance"] = std::move(prov);
        if (!indices->empty()) {
            entry["tensor"] = name + ".pfr";
            entry["mask"] = name + "_mask.pfr";
            write_split(ps, *indices, dir / (name + ".pfr"), dir / (name + "_mask.pfr"));
        } else {
            std::filesystem::remove(dir / (name + ".pfr"), ec);
            std::filesystem::remove(dir / (name + "_mask.pfr"), ec);
        }
        j[name] = std::move(entry);
    }

    std::ofstream out(dir / "manifest.json", std::ios::trunc);
    if (!out) throw IoError("cannot write manifest in '" + dir.string() + "'");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("short write to manifest in '" + dir.string() + "'");
}

ImportedDataset import_dataset(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw IoError("no manifest.json in '" + dir.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError("manifest.json: " + std::string(e.what()));
    }

    ImportedDataset out;
    PatchSet& ps = out.patches;
    try {
        ps.patch_height = j.at("patch_height").get<std::size_t>();
        ps.patch_width = j.at("patch_width").get<std::size_t>();
        ps.channel_names = j.at("channel_names").get<std::vector<std::string>>();
        ps.class_names = j.at("class_names").get<std::vector<std::string>>();
        ps.platform_kind = parse_platform_kind(j.at("platform_kind").get<std::string>());
        ps.mixed_platforms = j.value("mixed_platforms", false);
        ps.warning = j.value("warning", std::string());
        out.manifest.seed = j.at("split").at("seed").get<std::uint64_t>();
        out.manifest.val_ratio = j.at("split").at("val_ratio").get<double>();
    } catch (const json::exception& e) {
        throw FormatError("manifest.json: " + std::string(e.what()));
    }

    const std::size_t C = ps.channel_count(), ph = ps.patch_height, pw = ps.patch_width;
    try {
        for (const std::string name : {"train", "val"}) {
            const json& entry = j.at(name);
            const auto count = entry.at("count").get<std::size_t>();
            auto& indices = name == "train" ? out.manifest.train : out.manifest.val;
            if (count == 0) continue;

            const auto tensor = pfr::read(dir / entry.at("tensor").get<std::string>());
            const auto mask = pfr::read(dir / entry.at("mask").get<std::string>());
            const auto& th = tensor.header;
            if (th.dtype != pfr::Dtype::f32 || th.height != count * ph || th.width != pw ||
                th.channels != C) {
                throw FormatError(name + ".pfr: shape does not match manifest");
            }
            if (mask.header.dtype != pfr::Dtype::u8 || mask.header.height != count * ph ||
                mask.header.width != pw || mask.header.channels != 1) {
                throw FormatError(name + "_mask.pfr: shape does not match manifest");
            }
            const auto& prov = entry.at("provenance");
            if (prov.size() != count) throw FormatError(name + ": provenance count mismatch");
            const std::size_t vals = ph * pw * C, pix = ph * pw;
            for (std::size_t i = 0; i < count; ++i) {
                PatchData d;
                d.values.assign(tensor.floats.begin() + std::ptrdiff_t(i * vals),
                                tensor.floats.begin() + std::ptrdiff_t((i + 1) * vals));
                d.mask.assign(mask.bytes.begin() + std::ptrdiff_t(i * pix),
                              mask.bytes.begin() + std::ptrdiff_t((i + 1) * pix));
                indices.push_back(ps.size());
                ps.add(std::move(d), provenance_from(prov[i]));
            }
        }
    } catch (const json::exception& e) {
        throw FormatError("manifest.json: " + std::string(e.what()));
    }
    return out;
}

} // namespace polsar
