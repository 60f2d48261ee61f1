#include "polsar/reference.hpp"

#include <algorithm>
#include <cmath>

#include "polsar/covariance.hpp"

namespace polsar::reference {

CovarianceField covariance(const SlcImage& slc, int window, Basis basis) {
    if (window < 1 || window % 2 == 0) throw ArgumentError("window must be odd");
    const long H = long(slc.height()), W = long(slc.width()), r = window / 2;
    CovarianceField cov;
    cov.cells = Raster<Herm2>(slc.height(), slc.width());
    cov.looks = unsigned(window * window);
    cov.basis = basis;
    cov.meta = slc.meta;
    for (long y = 0; y < H; ++y) {
        for (long x = 0; x < W; ++x) {
            double a = 0, b = 0, re = 0, im = 0;
            long n = 0;
            for (long yy = std::max(0L, y - r); yy <= std::min(H - 1, y + r); ++yy) {
                for (long xx = std::max(0L, x - r); xx <= std::min(W - 1, x + r); ++xx) {
                    const auto k =
                        scattering_vector(Complex(slc.hh(yy, xx)), Complex(slc.vv(yy, xx)), basis);
                    a += std::norm(k[0]);
                    b += std::norm(k[1]);
                    const Complex c = k[0] * std::conj(k[1]);
                    re += c.real();
                    im += c.imag();
                    ++n;
                }
            }
            cov.cells(y, x) = {a / double(n), b / double(n), {re / double(n), im / double(n)}};
        }
    }
    return cov;
}

HAlphaField h_alpha_field(const CovarianceField& cov) {
    const std::size_t H = cov.height(), W = cov.width();
    HAlphaField f{Raster<double>(H, W), Raster<double>(H, W), Raster<double>(H, W),
                  Raster<double>(H, W), Raster<std::uint8_t>(H, W)};
    for (std::size_t i = 0; i < cov.cells.size(); ++i) {
        const EigenPair2 eig = eigen2(cov.cells[i]);
        const HAlpha ha = h_alpha(cov.cells[i]);
        f.entropy[i] = ha.entropy;
        f.alpha[i] = ha.alpha_deg;
        f.lambda1[i] = eig.lambda1;
        f.lambda2[i] = eig.lambda2;
        f.valid[i] = ha.valid;
    }
    return f;
}

ClassCenters class_centers(const CovarianceField& cov, const ClassMap& labels) {
    const std::size_t K = labels.class_count();
    std::vector<Herm2> sum(K);
    std::vector<std::uint64_t> n(K, 0);
    for (std::size_t i = 0; i < cov.cells.size(); ++i) {
        const auto l = labels.labels[i];
        if (l == kIgnoreLabel) continue;
        sum[l].c11 += cov.cells[i].c11;
        sum[l].c22 += cov.cells[i].c22;
        sum[l].c12 += cov.cells[i].c12;
        ++n[l];
    }
    ClassCenters out;
    for (std::size_t k = 0; k < K; ++k) {
        if (n[k] == 0) {
            out.empty_classes.push_back(std::uint8_t(k));
            continue;
        }
        Herm2 c = sum[k].scaled(1.0 / double(n[k]));
        const double tr = c.trace();
        if (c.det() <= kSingularRatio * tr * tr) {
            c.c11 += kRegularizer * tr;
            c.c22 += kRegularizer * tr;
        }
        out.centers.push_back(c);
        out.counts.push_back(n[k]);
        out.class_ids.push_back(std::uint8_t(k));
    }
    if (out.centers.empty()) throw ArgumentError("no labeled pixels");
    return out;
}

WishartResult wishart_iterate(const CovarianceField& cov, const ClassMap& init,
                              const WishartOptions& options) {
    WishartResult result{init, {}};
    auto& labels = result.map.labels;
    std::uint64_t labeled = 0;
    for (auto l : labels.values()) labeled += (l != kIgnoreLabel);

    for (int iter = 1; iter <= options.max_iter; ++iter) {
        const ClassCenters centers = reference::class_centers(cov, result.map);
        WishartIteration entry{iter, 0.0, 0.0};
        std::uint64_t changed = 0;
        for (std::size_t i = 0; i < cov.cells.size(); ++i) {
            if (labels[i] == kIgnoreLabel) continue;
            std::size_t best = 0;
            double best_d = wishart_distance(cov.cells[i], centers.centers[0]);
            for (std::size_t k = 1; k < centers.centers.size(); ++k) {
                const double d = wishart_distance(cov.cells[i], centers.centers[k]);
                if (d < best_d) {
                    best_d = d;
                    best = k;
                }
            }
            changed += labels[i] != centers.class_ids[best];
            labels[i] = centers.class_ids[best];
            entry.objective += best_d;
        }
        entry.changed_fraction = labeled ? double(changed) / double(labeled) : 0.0;
        result.log.push_back(entry);
        if (entry.changed_fraction < options.change_tol) break;
    }
    return result;
}

ConfusionMatrix confusion(const ClassMap& pred, const ClassMap& truth) {
    ConfusionMatrix cm;
    cm.k = truth.class_count();
    cm.class_names = truth.class_names;
    cm.counts.assign(cm.k * cm.k, 0);
    for (std::size_t y = 0; y < truth.height(); ++y) {
        for (std::size_t x = 0; x < truth.width(); ++x) {
            const auto t = truth.labels(y, x), p = pred.labels(y, x);
            if (t == kIgnoreLabel || p == kIgnoreLabel) continue;
            ++cm.at(t, p);
        }
    }
    return cm;
}

ClassMap ml_classify(const CovarianceField& cov, const std::vector<Herm2>& centers,
                     const std::vector<std::string>& class_names) {
    ClassMap out{Raster<std::uint8_t>(cov.height(), cov.width()), class_names};
    for (std::size_t i = 0; i < cov.cells.size(); ++i) {
        std::size_t best = 0;
        double best_d = wishart_distance(cov.cells[i], centers[0]);
        for (std::size_t k = 1; k < centers.size(); ++k) {
            const double d = wishart_distance(cov.cells[i], centers[k]);
            if (d < best_d) {
                best_d = d;
                best = k;
            }
        }
        out.labels[i] = std::uint8_t(best);
    }
    return out;
}

} // namespace polsar::reference
