#pragma once

// Persistence of the toolkit's rasters as PFR files plus JSON sidecars,
// and JSON forms of the scene description.

#include <filesystem>

#include <json.hpp>

#include "polsar/core.hpp"
#include "polsar/decomposition.hpp"
#include "polsar/simulate.hpp"

namespace polsar {

nlohmann::json to_json(const AcquisitionMeta& meta);
AcquisitionMeta meta_from_json(const nlohmann::json& j);

/// complex64, 2 channels (hh, vv).
void save_slc(const SlcImage& slc, const std::filesystem::path& path);
SlcImage load_slc(const std::filesystem::path& path);

/// f32, 4 channels (c11, c22, re c12, im c12); looks and basis in the sidecar.
void save_covariance(const CovarianceField& cov, const std::filesystem::path& path);
CovarianceField load_covariance(const std::filesystem::path& path);

/// f32, 4 channels (H, alpha, lambda1, lambda2). Invalid pixels are
/// written as all zeros and read back as invalid.
void save_halpha(const HAlphaField& field, const std::filesystem::path& path);
HAlphaField load_halpha(const std::filesystem::path& path);

void save_zones(const ZoneMap& zones, const std::filesystem::path& path);
ZoneMap load_zones(const std::filesystem::path& path);

/// u8, 1 channel; class_names in the sidecar.
void save_classmap(const ClassMap& map, const std::filesystem::path& path,
                   const nlohmann::json& extra = nlohmann::json::object());
ClassMap load_classmap(const std::filesystem::path& path);

nlohmann::json to_json(const ClassSpec& spec);
ClassSpec class_spec_from_json(const nlohmann::json& j);

/// Accepts "classes": "presets" as shorthand for default_presets().
SceneSpec scene_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SceneSpec& spec);

nlohmann::json to_json(const Herm2& m);

/// Analytic C2, T2, H and alpha for every class of the scene.
nlohmann::json truth_json(const SceneSpec& spec);

} // namespace polsar
