#include "polsar/simulate.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "polsar/covariance.hpp"
#include "polsar/decomposition.hpp"
#include "polsar/rng.hpp"

namespace polsar {

Herm2 ClassSpec::lexicographic() const {
    const double mag = rho_mag * std::sqrt(sigma_hh * sigma_vv);
    return {sigma_hh, sigma_vv, std::polar(mag, rho_phase)};
}

void ClassSpec::validate() const {
    if (!(sigma_hh > 0.0 && sigma_vv > 0.0) || !std::isfinite(sigma_hh) || !std::isfinite(sigma_vv)) {
        throw ArgumentError("class '" + name + "': powers must be positive and finite");
    }
    if (!(rho_mag >= 0.0 && rho_mag <= 1.0)) {
        throw ArgumentError("class '" + name + "': rho_mag " + std::to_string(rho_mag) +
                            " makes the covariance non-PSD (need 0 <= rho_mag <= 1)");
    }
    if (!std::isfinite(rho_phase)) throw ArgumentError("class '" + name + "': rho_phase not finite");
}

std::string to_string(Layout layout) {
    switch (layout) {
    case Layout::stripes: return "stripes";
    case Layout::rectangles: return "rectangles";
    case Layout::voronoi: return "voronoi";
    }
    return "voronoi";
}

Layout parse_layout(const std::string& text) {
    if (text == "stripes") return Layout::stripes;
    if (text == "rectangles") return Layout::rectangles;
    if (text == "voronoi") return Layout::voronoi;
    throw ArgumentError("unknown layout '" + text + "'");
}

void SceneSpec::validate() const {
    if (height < 16 || width < 16) throw ArgumentError("scene: height and width must be >= 16");
    if (classes.empty()) throw ArgumentError("scene: at least one class is required");
    if (classes.size() > 254) throw ArgumentError("scene: at most 254 classes");
    if (layout == Layout::voronoi && seed_count < 1) {
        throw ArgumentError("scene: voronoi layout needs seed_count >= 1");
    }
    for (const auto& c : classes) c.validate();
}

namespace {

// Counter word 3 separates draw families under one key.
constexpr std::uint32_t kPixelFamily = 0;
constexpr std::uint32_t kSiteFamily = 1;

} // namespace

Raster<std::uint8_t> layout_labels(const SceneSpec& spec) {
    const std::size_t H = spec.height, W = spec.width, K = spec.classes.size();
    Raster<std::uint8_t> labels(H, W);
    const long h = long(H), w = long(W);

    switch (spec.layout) {
    case Layout::stripes:
#pragma omp parallel for schedule(static)
        for (long y = 0; y < h; ++y) {
            for (long x = 0; x < w; ++x) labels(y, x) = std::uint8_t(std::size_t(x) * K / W);
        }
        break;
    case Layout::rectangles: {
        const auto cols = std::size_t(std::ceil(std::sqrt(double(K))));
        const std::size_t rows = (K + cols - 1) / cols;
#pragma omp parallel for schedule(static)
        for (long y = 0; y < h; ++y) {
            for (long x = 0; x < w; ++x) {
                const std::size_t cell = (std::size_t(y) * rows / H) * cols + std::size_t(x) * cols / W;
                labels(y, x) = std::uint8_t(cell % K);
            }
        }
        break;
    }
    case Layout::voronoi: {
        const auto key = rng::key_from_seed(spec.seed);
        std::vector<std::array<double, 2>> sites(spec.seed_count);
        for (std::size_t i = 0; i < sites.size(); ++i) {
            const auto u = rng::uniform_pair({std::uint32_t(i), 0, 0, kSiteFamily}, key);
            sites[i] = {u[0] * double(H), u[1] * double(W)};
        }
#pragma omp parallel for schedule(static)
        for (long y = 0; y < h; ++y) {
            for (long x = 0; x < w; ++x) {
                const double py = double(y) + 0.5, px = double(x) + 0.5;
                std::size_t best = 0;
                double best_d = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < sites.size(); ++i) {
                    const double dy = py - sites[i][0], dx = px - sites[i][1];
                    const double d = dy * dy + dx * dx;
                    if (d < best_d) {
                        best_d = d;
                        best = i;
                    }
                }
                labels(y, x) = std::uint8_t(best % K);
            }
        }
        break;
    }
    }
    return labels;
}

Scene generate_scene(const SceneSpec& spec) {
    spec.validate();
    const std::size_t H = spec.height, W = spec.width;

    // Cholesky factor rows: k_hh = l11 z1, k_vv = l21 z1 + l22 z2.
    struct Factor {
        double l11;
        Complex l21;
        double l22;
    };
    std::vector<Factor> factors;
    for (const auto& c : spec.classes) {
        const Herm2 m = c.lexicographic();
        const double l11 = std::sqrt(m.c11);
        const Complex l21 = std::conj(m.c12) / l11;
        const double l22 = std::sqrt(std::max(0.0, m.c22 - std::norm(l21)));
        factors.push_back({l11, l21, l22});
    }

    Scene scene;
    scene.truth.labels = layout_labels(spec);
    for (const auto& c : spec.classes) scene.truth.class_names.push_back(c.name);
    scene.slc.hh = Raster<Complex64>(H, W);
    scene.slc.vv = Raster<Complex64>(H, W);
    scene.slc.meta.platform_kind = PlatformKind::synthetic;
    scene.slc.meta.scene_id = spec.scene_id;

    const auto key = rng::key_from_seed(spec.seed);
    const double scale = 1.0 / std::numbers::sqrt2; // E|z|^2 = 1
    const long h = long(H), w = long(W);
#pragma omp parallel for schedule(static)
    for (long y = 0; y < h; ++y) {
        for (long x = 0; x < w; ++x) {
            const auto ux = std::uint32_t(x), uy = std::uint32_t(y);
            const auto g1 = rng::normal_pair({ux, uy, 0, kPixelFamily}, key);
            const auto g2 = rng::normal_pair({ux, uy, 1, kPixelFamily}, key);
            const Complex z1(scale * g1[0], scale * g1[1]);
            const Complex z2(scale * g2[0], scale * g2[1]);
            const Factor& f = factors[scene.truth.labels(y, x)];
            const Complex hh = f.l11 * z1;
            const Complex vv = f.l21 * z1 + f.l22 * z2;
            scene.slc.hh(y, x) = Complex64(float(hh.real()), float(hh.imag()));
            scene.slc.vv(y, x) = Complex64(float(vv.real()), float(vv.imag()));
        }
    }
    return scene;
}

std::vector<ClassSpec> default_presets() {
    return {
        {"water", 0.02, 0.02, 0.98, 0.0},
        {"roads", 0.01, 0.01, 0.95, 0.0},
        {"bare_soil", 0.10, 0.08, 0.90, 0.0},
        {"vegetation", 0.15, 0.15, 0.30, 0.0},
        {"built_up", 0.50, 0.40, 0.80, std::numbers::pi},
    };
}

AnalyticTruth analytic_truth(const ClassSpec& spec) {
    spec.validate();
    AnalyticTruth t;
    t.c2 = spec.lexicographic();
    t.t2 = pauli_congruence(t.c2);
    const HAlpha ha = h_alpha(t.t2);
    t.entropy = ha.entropy;
    t.alpha_deg = ha.alpha_deg;
    return t;
}

} // namespace polsar
