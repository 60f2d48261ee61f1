#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "polsar/core.hpp"

namespace polsar {

struct NamedRaster {
    std::string name;
    Raster<float> data;
};

struct NamedClassMap {
    std::string name;
    ClassMap map;
};

/// Multi-channel input raster. `valid` is 0 wherever any classified channel
/// was ignore-labeled; tile() folds it into the mask.
struct ChannelStack {
    std::vector<Raster<float>> channels;
    std::vector<std::string> names;
    Raster<std::uint8_t> valid;

    std::size_t height() const { return valid.height(); }
    std::size_t width() const { return valid.width(); }
};

/// Intensities first, in the given order, then each classified map encoded
/// as label / (class_count - 1). Ignore labels encode as 1.0 and clear the
/// validity bit.
ChannelStack stack_channels(std::span<const NamedRaster> intensities,
                            std::span<const NamedClassMap> classified);

enum class Augmentation : std::uint8_t { identity, rot90, rot180, rot270, flip_h, flip_v };

inline constexpr std::array<Augmentation, 6> kAugmentations = {
    Augmentation::identity, Augmentation::rot90,  Augmentation::rot180,
    Augmentation::rot270,   Augmentation::flip_h, Augmentation::flip_v};

// "id", "rot90", "rot180", "rot270", "fliph", "flipv"
std::string to_string(Augmentation a);

struct Provenance {
    std::string scene_id;
    std::size_t row = 0;
    std::size_t col = 0;
    std::string augmentation = "id"; // applied tags joined by '+'
    std::size_t base_id = 0;         // shared by all augmentations of one tile

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// One tile as cut from the source: HWC f32 values and its label mask.
struct PatchData {
    std::vector<float> values;
    std::vector<std::uint8_t> mask;
};

/// A sample is a shared source tile plus the spatial transforms applied to
/// it, in order. Augmented siblings share storage and are materialized on
/// access, so a 6x augmentation costs no extra tensor memory.
struct Sample {
    std::shared_ptr<const PatchData> source;
    std::vector<Augmentation> transforms;
    Provenance provenance;
};

struct PatchSet {
    std::size_t patch_height = 0;
    std::size_t patch_width = 0;
    std::vector<std::string> channel_names;
    std::vector<std::string> class_names;
    std::vector<Sample> samples;
    PlatformKind platform_kind = PlatformKind::synthetic;
    bool mixed_platforms = false;
    std::string warning;

    std::size_t size() const { return samples.size(); }
    std::size_t channel_count() const { return channel_names.size(); }

    std::vector<float> patch(std::size_t i) const;
    std::vector<std::uint8_t> mask(std::size_t i) const;

    /// Appends an untransformed sample.
    void add(PatchData data, Provenance provenance);

    void validate() const;
};

struct TileOptions {
    std::size_t size = 256;
    std::size_t stride = 256;
    double min_labeled_fraction = 0.5;
};

/// Grid-aligned tiles from the top-left corner; partial tiles at the right
/// and bottom edges are dropped, as are tiles whose labeled fraction falls
/// below the threshold.
PatchSet tile(const ChannelStack& stack, const ClassMap& mask, const TileOptions& options,
              const std::string& scene_id, PlatformKind platform);

/// Applies `a` to a square n x n HWC buffer with `channels` values per
/// pixel. Rotations are counter-clockwise.
template <class T>
std::vector<T> transform_square(std::span<const T> data, std::size_t n, std::size_t channels,
                                Augmentation a);

/// Six variants per patch (kAugmentations order), masks transformed alike.
PatchSet augment(const PatchSet& ps);

struct SplitManifest {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::uint64_t seed = 0;
    double val_ratio = 0.0;

    friend bool operator==(const SplitManifest&, const SplitManifest&) = default;
};

/// Splits whole base-patch families: round(val_ratio * families) go to
/// validation (at most families - 1), chosen by a seeded Fisher-Yates
/// shuffle. Index lists are ascending.
SplitManifest split(const PatchSet& ps, double val_ratio, std::uint64_t seed);

/// Concatenates patch sets with identical schemas. Mixing platform kinds
/// is refused unless `force`, which marks the result as mixed.
PatchSet merge(std::span<const PatchSet> sets, bool force);

/// Writes manifest.json, train.pfr, train_mask.pfr and, when the
/// validation split is non-empty, val.pfr and val_mask.pfr.
void export_dataset(const PatchSet& ps, const SplitManifest& manifest,
                    const std::filesystem::path& dir);

struct ImportedDataset {
    PatchSet patches; // train samples followed by val samples
    SplitManifest manifest;
};

ImportedDataset import_dataset(const std::filesystem::path& dir);

} // namespace polsar
