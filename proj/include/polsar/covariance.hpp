#pragma once

#include <array>

#include "polsar/core.hpp"

namespace polsar {

/// Scattering vector of one pixel: [hh, vv] (lexicographic) or
/// (1/sqrt 2)[hh + vv, hh - vv] (pauli).
std::array<Complex, 2> scattering_vector(Complex hh, Complex vv, Basis basis);

/// k k^H as a Herm2.
Herm2 outer(const std::array<Complex, 2>& k);

/// Boxcar estimate of <k k^H> over an odd `window`. Border pixels average
/// over the part of the window inside the raster, so output dimensions
/// match the input. looks = window^2.
CovarianceField compute_covariance(const SlcImage& slc, int window, Basis basis);

struct DbClamp {
    double low_db = -35.0;
    double high_db = 5.0;
};

// clamp(10 log10(max(p, 1e-10)), low, high) mapped affinely onto [0, 1].
float normalize_db(double power, const DbClamp& clamp = {});

struct IntensityChannels {
    Raster<double> c11;
    Raster<double> c22;
    Raster<float> c11_db; // normalized to [0, 1]
    Raster<float> c22_db;
};

IntensityChannels intensity_channels(const CovarianceField& cov, const DbClamp& clamp = {});

// U C U^H with U = (1/sqrt 2)[[1, 1], [1, -1]]. U is real symmetric and
// self-inverse, so the same map converts in both directions.
Herm2 pauli_congruence(const Herm2& m);

CovarianceField change_basis(const CovarianceField& cov, Basis target);

} // namespace polsar
