#pragma once

// End-to-end run: simulate -> covariance -> H/alpha -> zones -> Wishart ->
// merge -> dataset -> eval, with every intermediate written to one
// directory.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "polsar/covariance.hpp"
#include "polsar/dataset.hpp"
#include "polsar/decomposition.hpp"
#include "polsar/eval.hpp"
#include "polsar/simulate.hpp"
#include "polsar/wishart.hpp"

namespace polsar {

enum class MergeMode { reference, table };

struct PipelineConfig {
    SceneSpec scene;
    int window = 7;
    Basis basis = Basis::pauli;
    WishartOptions wishart;
    int span_bins = 4; // 1 = plain zone initialization
    MergeMode merge = MergeMode::reference;
    std::map<std::uint8_t, std::uint8_t> zone_to_class; // table mode only
    std::vector<std::string> channels = {"hh_db", "vv_db", "zones", "wishart"};
    TileOptions tile;
    bool augment = true;
    double val_ratio = 0.2;
    std::uint64_t split_seed = 0;
    DbClamp db_clamp;
    DensityBins density;

    void validate() const;
};

inline const std::vector<std::string> kKnownChannels = {"hh_db", "vv_db", "zones", "wishart"};

/// Missing keys take the defaults above. Every violation is reported as a
/// ValidationError prefixed with its field path, e.g. "config.wishart.max_iter".
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PipelineConfig& config);

/// FNV-1a 64 of the compact dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

/// Tool, library and compiler versions for run logs.
nlohmann::json version_info();

nlohmann::json run_log(const std::string& command, const nlohmann::json& config,
                       const std::vector<std::string>& outputs);

struct PipelineResult {
    ConfusionMatrix confusion;
    Metrics metrics;
    std::vector<WishartIteration> wishart_log;
    std::size_t samples = 0;
    std::vector<std::string> outputs; // relative to the output directory
};

PipelineResult run_pipeline(const PipelineConfig& config, const std::filesystem::path& out_dir);

} // namespace polsar
