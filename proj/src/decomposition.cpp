#include "polsar/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

namespace polsar {

EigenPair2 eigen2(const Herm2& m) {
    if (!m.finite()) throw ArgumentError("eigen2: non-finite matrix entry");

    const double tr = m.trace();
    const double diff = m.c11 - m.c22;
    const double off2 = std::norm(m.c12);
    // tr^2 - 4 det written as a sum of squares, so it cannot go negative.
    const double disc = std::sqrt(diff * diff + 4.0 * off2);

    EigenPair2 e;
    if (disc <= kIsotropicGap * std::abs(tr)) {
        e.lambda1 = e.lambda2 = 0.5 * tr;
        return e;
    }
    e.lambda1 = 0.5 * (tr + disc);
    e.lambda2 = 0.5 * (tr - disc);

    // Unit eigenvector of lambda1 is proportional to (lambda1 - c22, conj c12)
    // or (c12, lambda1 - c11); pick whichever avoids cancellation. The second
    // eigenvector is orthogonal, so its first component has the magnitude of
    // the first eigenvector's second component.
    double first2, second2;
    if (diff >= 0.0) {
        const double g = 0.5 * (diff + disc); // lambda1 - c22
        first2 = g * g;
        second2 = off2;
    } else {
        const double g = 0.5 * (disc - diff); // lambda1 - c11
        first2 = off2;
        second2 = g * g;
    }
    const double norm = first2 + second2;
    e.e1_abs_first = std::min(1.0, std::sqrt(first2 / norm));
    e.e2_abs_first = std::min(1.0, std::sqrt(second2 / norm));
    return e;
}

HAlpha h_alpha(const EigenPair2& eig) {
    const double l1 = std::max(eig.lambda1, 0.0);
    double l2 = std::max(eig.lambda2, 0.0);
    const double span = l1 + l2;
    if (!(span >= std::numeric_limits<double>::min())) return {};
    if (l2 <= kRankOneRatio * l1) l2 = 0.0;

    const double p1 = l1 / (l1 + l2);
    const double p2 = l2 / (l1 + l2);
    auto term = [](double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; };
    constexpr double deg = 180.0 / std::numbers::pi;
    const double a1 = std::acos(eig.e1_abs_first) * deg;
    const double a2 = std::acos(eig.e2_abs_first) * deg;

    HAlpha out;
    out.entropy = std::clamp(term(p1) + term(p2), 0.0, 1.0);
    out.alpha_deg = std::clamp(p1 * a1 + p2 * a2, 0.0, 90.0);
    out.valid = true;
    return out;
}

HAlpha h_alpha(const Herm2& m) { return h_alpha(eigen2(m)); }

HAlphaField h_alpha_field(const CovarianceField& cov) {
    if (cov.basis != Basis::pauli) {
        throw ArgumentError("h_alpha_field: covariance is in the lexicographic basis; "
                            "convert with change_basis(cov, Basis::pauli) first");
    }
    const std::size_t H = cov.height(), W = cov.width();
    HAlphaField f{Raster<double>(H, W), Raster<double>(H, W), Raster<double>(H, W),
                  Raster<double>(H, W), Raster<std::uint8_t>(H, W)};
    for (const auto& m : cov.cells.values()) {
        if (!m.finite()) throw ArgumentError("h_alpha_field: non-finite covariance cell");
    }
    const long n = long(cov.cells.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        const EigenPair2 eig = eigen2(cov.cells[i]);
        const HAlpha ha = h_alpha(eig);
        f.entropy[i] = ha.entropy;
        f.alpha[i] = ha.alpha_deg;
        f.lambda1[i] = eig.lambda1;
        f.lambda2[i] = eig.lambda2;
        f.valid[i] = ha.valid ? 1 : 0;
    }
    return f;
}

namespace {

std::uint8_t zone_of(double entropy, double alpha_deg) {
    if (entropy <= 0.5) {
        if (alpha_deg <= 42.5) return 9;
        if (alpha_deg <= 47.5) return 8;
        return 7;
    }
    if (entropy <= 0.9) {
        if (alpha_deg <= 40.0) return 6;
        if (alpha_deg <= 50.0) return 5;
        return 4;
    }
    // The high-entropy surface cell is folded into Z2.
    return alpha_deg <= 55.0 ? 2 : 1;
}

} // namespace

std::uint8_t zone_classify(double entropy, double alpha_deg) {
    if (!(entropy >= 0.0 && entropy <= 1.0)) {
        throw ArgumentError("zone_classify: entropy " + std::to_string(entropy) + " outside [0, 1]");
    }
    if (!(alpha_deg >= 0.0 && alpha_deg <= 90.0)) {
        throw ArgumentError("zone_classify: alpha " + std::to_string(alpha_deg) +
                            " outside [0, 90] degrees");
    }
    return zone_of(entropy, alpha_deg);
}

ZoneMap zone_map(const HAlphaField& field) {
    ZoneMap z{Raster<std::uint8_t>(field.height(), field.width(), kInvalidZone)};
    const long n = long(field.entropy.size());
    for (long i = 0; i < n; ++i) {
        if (field.valid[i]) zone_classify(field.entropy[i], field.alpha[i]); // range check
    }
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        if (field.valid[i]) z.labels[i] = zone_of(field.entropy[i], field.alpha[i]);
    }
    return z;
}

std::uint8_t zone_ordinal(std::uint8_t zone) {
    for (std::size_t i = 0; i < kFeasibleZones.size(); ++i) {
        if (kFeasibleZones[i] == zone) return std::uint8_t(i);
    }
    throw ArgumentError("zone " + std::to_string(zone) + " is not a feasible zone id");
}

ClassMap zones_as_classes(const ZoneMap& zones) {
    ClassMap cm;
    cm.labels = Raster<std::uint8_t>(zones.labels.height(), zones.labels.width(), kIgnoreLabel);
    for (auto z : kFeasibleZones) cm.class_names.push_back("Z" + std::to_string(z));
    for (std::size_t i = 0; i < zones.labels.size(); ++i) {
        const auto z = zones.labels[i];
        if (z != kInvalidZone) cm.labels[i] = zone_ordinal(z);
    }
    return cm;
}

std::vector<std::filesystem::path> export_halpha_density(const HAlphaField& field,
                                                         const ClassMap* mask,
                                                         const DensityBins& bins,
                                                         const std::filesystem::path& out_dir,
                                                         const std::string& prefix) {
    if (bins.entropy_bins < 2 || bins.alpha_bins < 2) {
        throw ArgumentError("density export needs at least 2 bins per axis");
    }
    if (mask != nullptr) require_same_shape(mask->labels, field.entropy, "density mask");

    const std::size_t groups = mask ? mask->class_count() : 1;
    const std::size_t nh = bins.entropy_bins, na = bins.alpha_bins;
    std::vector<std::vector<std::uint64_t>> counts(groups, std::vector<std::uint64_t>(nh * na, 0));

    for (std::size_t i = 0; i < field.entropy.size(); ++i) {
        if (!field.valid[i]) continue;
        std::size_t g = 0;
        if (mask) {
            const auto label = mask->labels[i];
            if (label == kIgnoreLabel || label >= groups) continue;
            g = label;
        }
        const auto hb = std::min(nh - 1, std::size_t(field.entropy[i] * double(nh)));
        const auto ab = std::min(na - 1, std::size_t(field.alpha[i] / 90.0 * double(na)));
        ++counts[g][hb * na + ab];
    }

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

    std::vector<std::filesystem::path> written;
    for (std::size_t g = 0; g < groups; ++g) {
        const std::string name = mask ? mask->class_names[g] : std::string("all");
        const auto path = out_dir / (prefix + "_" + name + ".csv");
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
        out << "h,alpha,count\n";
        for (std::size_t hb = 0; hb < nh; ++hb) {
            for (std::size_t ab = 0; ab < na; ++ab) {
                const auto c = counts[g][hb * na + ab];
                if (c == 0) continue;
                out << (double(hb) + 0.5) / double(nh) << ',' << (double(ab) + 0.5) * 90.0 / double(na)
                    << ',' << c << '\n';
            }
        }
        if (!out) throw IoError("short write to '" + path.string() + "'");
        written.push_back(path);
    }
    return written;
}

} // namespace polsar
