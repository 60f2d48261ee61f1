#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "polsar/core.hpp"

namespace polsar {

/// Eigenvalues of a 2x2 Hermitian matrix (lambda1 >= lambda2) and the
/// magnitudes of the first components of their unit eigenvectors. The
/// magnitudes do not depend on eigenvector phase.
struct EigenPair2 {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double e1_abs_first = 1.0;
    double e2_abs_first = 0.0;
};

// Relative eigenvalue gap below which the matrix is treated as isotropic:
// lambda1 = lambda2 = trace/2, e1_abs_first = 1, e2_abs_first = 0.
inline constexpr double kIsotropicGap = 1e-12;
// lambda2/lambda1 at or below this counts as rank one (H = 0).
inline constexpr double kRankOneRatio = 1e-15;

EigenPair2 eigen2(const Herm2& m);

struct HAlpha {
    double entropy = 0.0;   // [0, 1], base-2
    double alpha_deg = 0.0; // [0, 90]
    bool valid = false;     // false when total power underflows
};

/// Dual-pol entropy and mean alpha of a coherency matrix.
HAlpha h_alpha(const Herm2& m);
HAlpha h_alpha(const EigenPair2& eig);

struct HAlphaField {
    Raster<double> entropy;
    Raster<double> alpha;
    Raster<double> lambda1;
    Raster<double> lambda2;
    Raster<std::uint8_t> valid;

    std::size_t height() const { return entropy.height(); }
    std::size_t width() const { return entropy.width(); }
};

/// Requires a Pauli-basis field (alpha = 0 surface, 90 double bounce).
HAlphaField h_alpha_field(const CovarianceField& cov);

// Zones of the dual-pol H-alpha plane. Zone 3 (high-entropy surface) is
// infeasible and never produced.
inline constexpr std::array<std::uint8_t, 8> kFeasibleZones = {1, 2, 4, 5, 6, 7, 8, 9};
inline constexpr std::uint8_t kInvalidZone = 255;

/// Zone table:
///   H in [0, 0.5]:   alpha <= 42.5 -> 9, <= 47.5 -> 8, else 7
///   H in (0.5, 0.9]: alpha <= 40   -> 6, <= 50   -> 5, else 4
///   H in (0.9, 1]:   alpha <= 55   -> 2,                else 1
/// Values on a boundary fall into the lower band.
std::uint8_t zone_classify(double entropy, double alpha_deg);

struct ZoneMap {
    Raster<std::uint8_t> labels; // 1..9 or 255
};

ZoneMap zone_map(const HAlphaField& field);

// Ordinal index of a feasible zone (Z1 -> 0, Z2 -> 1, Z4 -> 2, ... Z9 -> 7);
// throws for 3 and values outside 1..9.
std::uint8_t zone_ordinal(std::uint8_t zone);

/// ZoneMap as a ClassMap with labels 0..7 and names "Z1", "Z2", "Z4", ...
ClassMap zones_as_classes(const ZoneMap& zones);

struct DensityBins {
    std::size_t entropy_bins = 10;
    std::size_t alpha_bins = 9;
};

/// Writes one CSV ("h,alpha,count") per class of `mask`, or a single
/// "all" file without a mask. Rows list non-empty bins by bin center.
/// Classes with no valid pixels get a header-only file. Returns the paths
/// written, in class order.
std::vector<std::filesystem::path> export_halpha_density(const HAlphaField& field,
                                                         const ClassMap* mask,
                                                         const DensityBins& bins,
                                                         const std::filesystem::path& out_dir,
                                                         const std::string& prefix = "halpha_density");

} // namespace polsar
