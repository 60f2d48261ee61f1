#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polsar/raster.hpp"

namespace polsar {

using Complex = std::complex<double>;
using Complex64 = std::complex<float>;

enum class PlatformKind { spaceborne, airborne, synthetic };
enum class Basis { lexicographic, pauli };

std::string to_string(PlatformKind kind);
std::string to_string(Basis basis);
PlatformKind parse_platform_kind(const std::string& text);
Basis parse_basis(const std::string& text);

struct AcquisitionMeta {
    PlatformKind platform_kind = PlatformKind::synthetic;
    double incidence_near = 0.0; // degrees
    double incidence_far = 0.0;
    double range_spacing = 1.0; // meters
    double azimuth_spacing = 1.0;
    std::string scene_id;

    // Throws ArgumentError on out-of-range angles or non-positive spacings.
    void validate() const;

    friend bool operator==(const AcquisitionMeta&, const AcquisitionMeta&) = default;
};

/// Dual-pol single-look complex image. Both channels share dimensions.
struct SlcImage {
    Raster<Complex64> hh;
    Raster<Complex64> vv;
    AcquisitionMeta meta;

    std::size_t height() const { return hh.height(); }
    std::size_t width() const { return hh.width(); }

    void validate() const;
};

/// 2x2 Hermitian matrix [[c11, c12], [conj(c12), c22]].
struct Herm2 {
    double c11 = 0.0;
    double c22 = 0.0;
    Complex c12{0.0, 0.0};

    double trace() const { return c11 + c22; }
    double det() const { return c11 * c22 - std::norm(c12); }
    bool finite() const;

    /// PSD within det >= -1e-9 * trace^2.
    bool is_psd() const;

    Herm2 scaled(double s) const { return {s * c11, s * c22, s * c12}; }

    static Herm2 identity() { return {1.0, 1.0, {0.0, 0.0}}; }
    static Herm2 diag(double a, double b) { return {a, b, {0.0, 0.0}}; }

    friend bool operator==(const Herm2&, const Herm2&) = default;
};

inline constexpr double kPsdTolerance = 1e-9;

struct CovarianceField {
    Raster<Herm2> cells;
    unsigned looks = 1;
    Basis basis = Basis::lexicographic;
    AcquisitionMeta meta;

    std::size_t height() const { return cells.height(); }
    std::size_t width() const { return cells.width(); }
};

inline constexpr std::uint8_t kIgnoreLabel = 255;

/// Per-pixel labels; every non-ignore label indexes class_names.
struct ClassMap {
    Raster<std::uint8_t> labels;
    std::vector<std::string> class_names;

    std::size_t height() const { return labels.height(); }
    std::size_t width() const { return labels.width(); }
    std::size_t class_count() const { return class_names.size(); }

    void validate() const;
};

} // namespace polsar
