#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "polsar/core.hpp"
#include "polsar/decomposition.hpp"

namespace polsar {

/// ln det(v) + tr(v^-1 c). Terms of the full Wishart log-likelihood that do
/// not depend on the class are dropped. Throws ArgumentError when
/// det(v) <= 0.
double wishart_distance(const Herm2& c, const Herm2& v);

/// Per-class mean covariance. Only populated classes get a center;
/// `class_ids[i]` is the label of `centers[i]`.
struct ClassCenters {
    std::vector<Herm2> centers;
    std::vector<std::uint64_t> counts;
    std::vector<std::uint8_t> class_ids;
    std::vector<std::uint8_t> empty_classes;
};

// Centers with det <= 1e-12 trace^2 get 1e-6 * trace added on the diagonal.
inline constexpr double kSingularRatio = 1e-12;
inline constexpr double kRegularizer = 1e-6;

ClassCenters class_centers(const CovarianceField& cov, const ClassMap& labels);

struct WishartOptions {
    int max_iter = 20;
    double change_tol = 0.001;
};

struct WishartIteration {
    int iteration = 0;
    double changed_fraction = 0.0;
    double objective = 0.0; // sum over labeled pixels of d(C_px, V_label)
};

struct WishartResult {
    ClassMap map;
    std::vector<WishartIteration> log;
};

/// Alternates class_centers and minimum-distance reassignment until fewer
/// than `change_tol` of the labeled pixels move or `max_iter` is reached.
/// Ties go to the lower class id; ignore-labeled pixels stay ignored;
/// classes that empty out are dropped.
/// Splits every class of `init` into `bins` sub-classes at the within-class
/// quantiles of span (c11 + c22). Sub-class b of class k gets label
/// k * bins + b and name "<name>/s<b>". bins = 1 returns init unchanged.
ClassMap split_by_span(const ClassMap& init, const CovarianceField& cov, int bins);

WishartResult wishart_iterate(const CovarianceField& cov, const ClassMap& init,
                              const WishartOptions& options = {});

/// Explicit relabeling. `zone_to_class` must cover every feasible zone.
ClassMap merge_zones_to_classes(const ZoneMap& zones,
                                const std::map<std::uint8_t, std::uint8_t>& zone_to_class,
                                const std::vector<std::string>& class_names);

/// Maps every populated cluster (zone or Wishart class) to the reference
/// class holding the majority of its overlapping pixels; ties go to the
/// lower class index. Throws if a populated cluster has no labeled
/// reference pixel.
ClassMap merge_by_reference(const ClassMap& clusters, const ClassMap& reference);
ClassMap merge_zones_to_classes(const ZoneMap& zones, const ClassMap& reference);

} // namespace polsar
