#pragma once

// Serial reference implementations. Straight loops, no blocking and no
// OpenMP; they define what the parallel kernels must reproduce and are used
// by the tests and the benchmark only.

#include <vector>

#include "polsar/core.hpp"
#include "polsar/decomposition.hpp"
#include "polsar/eval.hpp"
#include "polsar/wishart.hpp"

namespace polsar::reference {

/// Per-pixel mean of k k^H over the clamped window, O(window^2) per pixel.
CovarianceField covariance(const SlcImage& slc, int window, Basis basis);

/// h_alpha applied pixel by pixel.
HAlphaField h_alpha_field(const CovarianceField& cov);

/// Per-class accumulation in a single raster-order pass.
ClassCenters class_centers(const CovarianceField& cov, const ClassMap& labels);

WishartResult wishart_iterate(const CovarianceField& cov, const ClassMap& init,
                              const WishartOptions& options = {});

ConfusionMatrix confusion(const ClassMap& pred, const ClassMap& truth);

/// Minimum Wishart distance to fixed class matrices (ties to the lower
/// index). With the true class covariances this is the per-pixel maximum
/// likelihood classifier.
ClassMap ml_classify(const CovarianceField& cov, const std::vector<Herm2>& centers,
                     const std::vector<std::string>& class_names);

} // namespace polsar::reference
