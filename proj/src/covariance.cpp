#include "polsar/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace polsar {

std::array<Complex, 2> scattering_vector(Complex hh, Complex vv, Basis basis) {
    if (basis == Basis::lexicographic) return {hh, vv};
    constexpr double s = 1.0 / std::numbers::sqrt2;
    return {s * (hh + vv), s * (hh - vv)};
}

Herm2 outer(const std::array<Complex, 2>& k) {
    return {std::norm(k[0]), std::norm(k[1]), k[0] * std::conj(k[1])};
}

namespace {

// Four real planes summed independently: c11, c22, re(c12), im(c12).
struct Accum {
    double a = 0, b = 0, re = 0, im = 0;
    void add(const Accum& o) {
        a += o.a;
        b += o.b;
        re += o.re;
        im += o.im;
    }
};

} // namespace

CovarianceField compute_covariance(const SlcImage& slc, int window, Basis basis) {
    slc.validate();
    if (window < 1 || window % 2 == 0) {
        throw ArgumentError("covariance window must be odd and >= 1, got " + std::to_string(window));
    }
    const std::size_t H = slc.height(), W = slc.width();
    if (std::size_t(window) > std::min(H, W)) {
        throw ArgumentError("covariance window " + std::to_string(window) +
                            " exceeds image size " + std::to_string(H) + "x" + std::to_string(W));
    }
    const long r = window / 2;
    const long h = long(H), w = long(W);

    Raster<Accum> prod(H, W);
#pragma omp parallel for schedule(static)
    for (long y = 0; y < h; ++y) {
        for (long x = 0; x < w; ++x) {
            const auto k = scattering_vector(Complex(slc.hh(y, x)), Complex(slc.vv(y, x)), basis);
            const Herm2 o = outer(k);
            prod(y, x) = {o.c11, o.c22, o.c12.real(), o.c12.imag()};
        }
    }

    // Vertical then horizontal pass. Each output value is summed in a fixed
    // order that depends only on its position, so results are identical for
    // any thread count.
    Raster<Accum> vert(H, W);
#pragma omp parallel for schedule(static)
    for (long y = 0; y < h; ++y) {
        const long y0 = std::max(0L, y - r), y1 = std::min(h - 1, y + r);
        auto out = vert.row(y);
        for (long yy = y0; yy <= y1; ++yy) {
            const auto in = prod.row(yy);
            for (long x = 0; x < w; ++x) out[x].add(in[x]);
        }
    }

    CovarianceField cov;
    cov.cells = Raster<Herm2>(H, W);
    cov.looks = unsigned(window * window);
    cov.basis = basis;
    cov.meta = slc.meta;
#pragma omp parallel for schedule(static)
    for (long y = 0; y < h; ++y) {
        const long rows = std::min(h - 1, y + r) - std::max(0L, y - r) + 1;
        const auto in = vert.row(y);
        auto out = cov.cells.row(y);
        for (long x = 0; x < w; ++x) {
            const long x0 = std::max(0L, x - r), x1 = std::min(w - 1, x + r);
            Accum s;
            for (long xx = x0; xx <= x1; ++xx) s.add(in[xx]);
            const double inv = 1.0 / double(rows * (x1 - x0 + 1));
            out[x] = {s.a * inv, s.b * inv, {s.re * inv, s.im * inv}};
        }
    }
    return cov;
}

float normalize_db(double power, const DbClamp& clamp) {
    const double db = 10.0 * std::log10(std::max(power, 1e-10));
    const double c = std::clamp(db, clamp.low_db, clamp.high_db);
    return float((c - clamp.low_db) / (clamp.high_db - clamp.low_db));
}

IntensityChannels intensity_channels(const CovarianceField& cov, const DbClamp& clamp) {
    if (!(clamp.high_db > clamp.low_db)) throw ArgumentError("db clamp: high must exceed low");
    const std::size_t H = cov.height(), W = cov.width();
    IntensityChannels out{Raster<double>(H, W), Raster<double>(H, W), Raster<float>(H, W),
                          Raster<float>(H, W)};
    const long n = long(cov.cells.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        const Herm2& m = cov.cells[i];
        out.c11[i] = m.c11;
        out.c22[i] = m.c22;
        out.c11_db[i] = normalize_db(m.c11, clamp);
        out.c22_db[i] = normalize_db(m.c22, clamp);
    }
    return out;
}

Herm2 pauli_congruence(const Herm2& m) {
    // With U = (1/sqrt 2)[[1,1],[1,-1]]:
    //   t11 = (c11 + c22)/2 + re c12
    //   t22 = (c11 + c22)/2 - re c12
    //   t12 = (c11 - c22)/2 - i im c12
    const double half_sum = 0.5 * (m.c11 + m.c22);
    return {half_sum + m.c12.real(), half_sum - m.c12.real(),
            {0.5 * (m.c11 - m.c22), -m.c12.imag()}};
}

CovarianceField change_basis(const CovarianceField& cov, Basis target) {
    CovarianceField out = cov;
    out.basis = target;
    if (cov.basis == target) return out;
    const long n = long(cov.cells.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) out.cells[i] = pauli_congruence(cov.cells[i]);
    return out;
}

} // namespace polsar
