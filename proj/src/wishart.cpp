#include "polsar/wishart.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace polsar {

namespace {

struct Inverse {
    double log_det;
    double inv_det;
    Herm2 v;
};

Inverse prepare(const Herm2& v) {
    const double det = v.det();
    if (!(det > 0.0) || !v.finite()) {
        throw ArgumentError("wishart_distance: class center is singular (det = " +
                            std::to_string(det) + ")");
    }
    return {std::log(det), 1.0 / det, v};
}

// tr(v^-1 c) = (v22 c11 + v11 c22 - 2 re(v12 conj c12)) / det v
double distance(const Herm2& c, const Inverse& p) {
    const double tr = p.v.c22 * c.c11 + p.v.c11 * c.c22 - 2.0 * (p.v.c12 * std::conj(c.c12)).real();
    return p.log_det + tr * p.inv_det;
}

struct Sum {
    double c11 = 0, c22 = 0, re = 0, im = 0;
    std::uint64_t n = 0;
};

} // namespace

double wishart_distance(const Herm2& c, const Herm2& v) { return distance(c, prepare(v)); }

ClassCenters class_centers(const CovarianceField& cov, const ClassMap& labels) {
    require_same_shape(cov.cells, labels.labels, "class_centers");
    const std::size_t K = labels.class_count();
    const long H = long(cov.height()), W = long(cov.width());

    // Row partials are combined in row order afterwards, which keeps the sums
    // independent of how rows are spread over threads.
    std::vector<Sum> partial(std::size_t(H) * K);
#pragma omp parallel for schedule(static)
    for (long y = 0; y < H; ++y) {
        Sum* row = partial.data() + std::size_t(y) * K;
        const auto lab = labels.labels.row(y);
        const auto cells = cov.cells.row(y);
        for (long x = 0; x < W; ++x) {
            const auto l = lab[x];
            if (l == kIgnoreLabel || l >= K) continue;
            Sum& s = row[l];
            s.c11 += cells[x].c11;
            s.c22 += cells[x].c22;
            s.re += cells[x].c12.real();
            s.im += cells[x].c12.imag();
            ++s.n;
        }
    }
    std::vector<Sum> total(K);
    for (long y = 0; y < H; ++y) {
        for (std::size_t k = 0; k < K; ++k) {
            const Sum& s = partial[std::size_t(y) * K + k];
            total[k].c11 += s.c11;
            total[k].c22 += s.c22;
            total[k].re += s.re;
            total[k].im += s.im;
            total[k].n += s.n;
        }
    }

    ClassCenters out;
    for (std::size_t k = 0; k < K; ++k) {
        const Sum& s = total[k];
        if (s.n == 0) {
            out.empty_classes.push_back(std::uint8_t(k));
            continue;
        }
        const double inv = 1.0 / double(s.n);
        Herm2 c{s.c11 * inv, s.c22 * inv, {s.re * inv, s.im * inv}};
        const double tr = c.trace();
        if (c.det() <= kSingularRatio * tr * tr) {
            c.c11 += kRegularizer * tr;
            c.c22 += kRegularizer * tr;
        }
        out.centers.push_back(c);
        out.counts.push_back(s.n);
        out.class_ids.push_back(std::uint8_t(k));
    }
    if (out.centers.empty()) {
        throw ArgumentError("class_centers: no labeled pixels, cannot form any class center");
    }
    return out;
}

WishartResult wishart_iterate(const CovarianceField& cov, const ClassMap& init,
                              const WishartOptions& options) {
    require_same_shape(cov.cells, init.labels, "wishart_iterate");
    if (options.max_iter < 1) throw ArgumentError("wishart: max_iter must be >= 1");
    if (!(options.change_tol > 0.0 && options.change_tol < 1.0)) {
        throw ArgumentError("wishart: change_tol must lie in (0, 1)");
    }
    for (const auto& m : cov.cells.values()) {
        if (!m.finite()) throw ArgumentError("wishart: non-finite covariance cell");
    }
    init.validate();

    WishartResult result{init, {}};
    auto& labels = result.map.labels;
    const long H = long(cov.height()), W = long(cov.width());

    std::uint64_t labeled = 0;
    for (auto l : labels.values()) labeled += (l != kIgnoreLabel);

    for (int iter = 1; iter <= options.max_iter; ++iter) {
        const ClassCenters centers = class_centers(cov, result.map);
        std::vector<Inverse> inv;
        inv.reserve(centers.centers.size());
        for (const auto& c : centers.centers) inv.push_back(prepare(c));

        std::vector<double> row_objective(std::size_t(H), 0.0);
        std::vector<std::uint64_t> row_changed(std::size_t(H), 0);
#pragma omp parallel for schedule(static)
        for (long y = 0; y < H; ++y) {
            auto lab = labels.row(y);
            const auto cells = cov.cells.row(y);
            double obj = 0.0;
            std::uint64_t changed = 0;
            for (long x = 0; x < W; ++x) {
                if (lab[x] == kIgnoreLabel) continue;
                // class_ids ascend, so a strict comparison keeps the lower id on ties.
                std::size_t best = 0;
                double best_d = distance(cells[x], inv[0]);
                for (std::size_t k = 1; k < inv.size(); ++k) {
                    const double d = distance(cells[x], inv[k]);
                    if (d < best_d) {
                        best_d = d;
                        best = k;
                    }
                }
                const auto label = centers.class_ids[best];
                changed += (label != lab[x]);
                lab[x] = label;
                obj += best_d;
            }
            row_objective[std::size_t(y)] = obj;
            row_changed[std::size_t(y)] = changed;
        }

        WishartIteration entry{iter, 0.0, 0.0};
        std::uint64_t changed = 0;
        for (long y = 0; y < H; ++y) {
            entry.objective += row_objective[std::size_t(y)];
            changed += row_changed[std::size_t(y)];
        }
        entry.changed_fraction = labeled ? double(changed) / double(labeled) : 0.0;
        result.log.push_back(entry);
        if (entry.changed_fraction < options.change_tol) break;
    }
    return result;
}

ClassMap split_by_span(const ClassMap& init, const CovarianceField& cov, int bins) {
    require_same_shape(init.labels, cov.cells, "split_by_span");
    const std::size_t K = init.class_count();
    if (bins < 1 || K * std::size_t(bins) > kIgnoreLabel) {
        throw ArgumentError("split_by_span: bins must be in [1, " +
                            std::to_string(kIgnoreLabel / std::max<std::size_t>(K, 1)) + "]");
    }
    init.validate();
    if (bins == 1) return init;

    std::vector<std::vector<double>> spans(K);
    for (std::size_t i = 0; i < cov.cells.size(); ++i) {
        if (init.labels[i] != kIgnoreLabel) spans[init.labels[i]].push_back(cov.cells[i].trace());
    }
    std::vector<std::vector<double>> cuts(K);
    for (std::size_t k = 0; k < K; ++k) {
        auto& s = spans[k];
        if (s.empty()) continue;
        std::sort(s.begin(), s.end());
        for (int b = 1; b < bins; ++b) cuts[k].push_back(s[s.size() * std::size_t(b) / std::size_t(bins)]);
    }

    ClassMap out{Raster<std::uint8_t>(init.height(), init.width()), {}};
    for (std::size_t k = 0; k < K; ++k) {
        for (int b = 0; b < bins; ++b) out.class_names.push_back(init.class_names[k] + "/s" + std::to_string(b));
    }
    const long n = long(cov.cells.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        const auto l = init.labels[std::size_t(i)];
        if (l == kIgnoreLabel) {
            out.labels[std::size_t(i)] = kIgnoreLabel;
            continue;
        }
        const auto& c = cuts[l];
        const auto b = std::upper_bound(c.begin(), c.end(), cov.cells[std::size_t(i)].trace()) - c.begin();
        out.labels[std::size_t(i)] = std::uint8_t(std::size_t(l) * std::size_t(bins) + std::size_t(b));
    }
    return out;
}

ClassMap merge_zones_to_classes(const ZoneMap& zones,
                                const std::map<std::uint8_t, std::uint8_t>& zone_to_class,
                                const std::vector<std::string>& class_names) {
    std::array<std::uint8_t, 10> lut;
    lut.fill(kIgnoreLabel);
    for (auto z : kFeasibleZones) {
        const auto it = zone_to_class.find(z);
        if (it == zone_to_class.end()) {
            throw ArgumentError("zone mapping does not cover zone Z" + std::to_string(z));
        }
        if (it->second >= class_names.size()) {
            throw ArgumentError("zone mapping sends Z" + std::to_string(z) + " to class " +
                                std::to_string(it->second) + " but only " +
                                std::to_string(class_names.size()) + " classes are named");
        }
        lut[z] = it->second;
    }
    ClassMap out{Raster<std::uint8_t>(zones.labels.height(), zones.labels.width(), kIgnoreLabel),
                 class_names};
    for (std::size_t i = 0; i < zones.labels.size(); ++i) {
        const auto z = zones.labels[i];
        if (z == kInvalidZone) continue;
        if (z >= lut.size() || lut[z] == kIgnoreLabel) {
            throw ArgumentError("zone map holds invalid zone id " + std::to_string(z));
        }
        out.labels[i] = lut[z];
    }
    return out;
}

ClassMap merge_by_reference(const ClassMap& clusters, const ClassMap& reference) {
    require_same_shape(clusters.labels, reference.labels, "merge_by_reference");
    const std::size_t K = clusters.class_count(), R = reference.class_count();
    std::vector<std::uint64_t> votes(K * R, 0);
    std::vector<std::uint64_t> population(K, 0);
    for (std::size_t i = 0; i < clusters.labels.size(); ++i) {
        const auto c = clusters.labels[i];
        if (c == kIgnoreLabel || c >= K) continue;
        ++population[c];
        const auto r = reference.labels[i];
        if (r == kIgnoreLabel || r >= R) continue;
        ++votes[c * R + r];
    }
    std::vector<std::uint8_t> lut(K, kIgnoreLabel);
    for (std::size_t c = 0; c < K; ++c) {
        if (population[c] == 0) continue;
        std::size_t best = R;
        std::uint64_t best_votes = 0;
        for (std::size_t r = 0; r < R; ++r) {
            if (votes[c * R + r] > best_votes) {
                best_votes = votes[c * R + r];
                best = r;
            }
        }
        if (best == R) {
            throw ArgumentError("cluster '" + clusters.class_names[c] +
                                "' has no overlap with labeled reference pixels");
        }
        lut[c] = std::uint8_t(best);
    }
    ClassMap out{Raster<std::uint8_t>(clusters.height(), clusters.width(), kIgnoreLabel),
                 reference.class_names};
    for (std::size_t i = 0; i < clusters.labels.size(); ++i) {
        const auto c = clusters.labels[i];
        if (c != kIgnoreLabel && c < K) out.labels[i] = lut[c];
    }
    return out;
}

ClassMap merge_zones_to_classes(const ZoneMap& zones, const ClassMap& reference) {
    return merge_by_reference(zones_as_classes(zones), reference);
}

} // namespace polsar
