#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polsar/core.hpp"

namespace polsar {

/// One land-cover class as a dual-pol Gaussian scatterer.
struct ClassSpec {
    std::string name;
    double sigma_hh = 1.0; // mean power, linear
    double sigma_vv = 1.0;
    double rho_mag = 0.0;   // |HH-VV correlation|, [0, 1]
    double rho_phase = 0.0; // radians

    /// [[s_hh, rho sqrt(s_hh s_vv)], [conj, s_vv]]
    Herm2 lexicographic() const;
    void validate() const;
};

enum class Layout { stripes, rectangles, voronoi };

std::string to_string(Layout layout);
Layout parse_layout(const std::string& text);

struct SceneSpec {
    std::size_t height = 256;
    std::size_t width = 256;
    std::vector<ClassSpec> classes;
    Layout layout = Layout::voronoi;
    std::size_t seed_count = 16; // voronoi only
    std::uint64_t seed = 0;
    std::string scene_id = "synthetic";

    void validate() const;
};

struct Scene {
    SlcImage slc;
    ClassMap truth;
};

/// Label raster for the layout:
///   stripes    - K vertical bands of equal width
///   rectangles - ceil(sqrt K) columns by ceil(K / cols) rows of blocks,
///                block i gets class i mod K
///   voronoi    - nearest of `seed_count` seeded sites, site i has class
///                i mod K; equidistant pixels take the lower site index
Raster<std::uint8_t> layout_labels(const SceneSpec& spec);

/// Single-look speckle: k = L z per pixel, L the Cholesky factor of the
/// class C2 and z two independent circular complex N(0, 1) samples drawn
/// from Philox keyed by the scene seed with counter (x, y, j, 0).
Scene generate_scene(const SceneSpec& spec);

/// water, roads, bare_soil, vegetation, built_up (class ids 0..4).
std::vector<ClassSpec> default_presets();

struct AnalyticTruth {
    Herm2 c2;
    Herm2 t2;
    double entropy = 0.0;
    double alpha_deg = 0.0;
};

AnalyticTruth analytic_truth(const ClassSpec& spec);

} // namespace polsar
