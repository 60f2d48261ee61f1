#include "polsar/core.hpp"

#include <cmath>

namespace polsar {

std::string to_string(PlatformKind kind) {
    switch (kind) {
    case PlatformKind::spaceborne: return "spaceborne";
    case PlatformKind::airborne: return "airborne";
    case PlatformKind::synthetic: return "synthetic";
    }
    return "synthetic";
}

std::string to_string(Basis basis) {
    return basis == Basis::pauli ? "pauli" : "lexicographic";
}

PlatformKind parse_platform_kind(const std::string& text) {
    if (text == "spaceborne") return PlatformKind::spaceborne;
    if (text == "airborne") return PlatformKind::airborne;
    if (text == "synthetic") return PlatformKind::synthetic;
    throw ArgumentError("unknown platform_kind '" + text + "'");
}

Basis parse_basis(const std::string& text) {
    if (text == "pauli") return Basis::pauli;
    if (text == "lexicographic") return Basis::lexicographic;
    throw ArgumentError("unknown basis '" + text + "' (expected pauli or lexicographic)");
}

void AcquisitionMeta::validate() const {
    if (!(incidence_near >= 0.0 && incidence_near <= incidence_far && incidence_far <= 90.0)) {
        throw ArgumentError("meta: incidence angles must satisfy 0 <= near <= far <= 90");
    }
    if (!(range_spacing > 0.0)) throw ArgumentError("meta.range_spacing must be > 0");
    if (!(azimuth_spacing > 0.0)) throw ArgumentError("meta.azimuth_spacing must be > 0");
}

void SlcImage::validate() const {
    if (hh.height() < 1 || hh.width() < 1) throw ArgumentError("slc: empty image");
    require_same_shape(hh, vv, "slc hh/vv");
    for (const auto* ch : {&hh, &vv}) {
        for (const auto& v : ch->values()) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                throw ArgumentError("slc: non-finite sample");
            }
        }
    }
    meta.validate();
}

bool Herm2::finite() const {
    return std::isfinite(c11) && std::isfinite(c22) && std::isfinite(c12.real()) &&
           std::isfinite(c12.imag());
}

bool Herm2::is_psd() const {
    const double tr = trace();
    return finite() && c11 >= 0.0 && c22 >= 0.0 && det() >= -kPsdTolerance * tr * tr;
}

void ClassMap::validate() const {
    for (auto v : labels.values()) {
        if (v != kIgnoreLabel && v >= class_names.size()) {
            throw ValidationError("class map: label " + std::to_string(v) + " has no class name (" +
                                  std::to_string(class_names.size()) + " classes)");
        }
    }
}

} // namespace polsar
