#include "polsar/eval.hpp"

#include <cstdio>
#include <numeric>
#include <sstream>

namespace polsar {

std::uint64_t ConfusionMatrix::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

ConfusionMatrix confusion(const ClassMap& pred, const ClassMap& truth) {
    require_same_shape(pred.labels, truth.labels, "confusion");
    if (pred.class_names != truth.class_names) {
        throw ValidationError("confusion: prediction and truth use different class schemas");
    }
    pred.validate();
    truth.validate();

    ConfusionMatrix cm;
    cm.k = truth.class_count();
    cm.class_names = truth.class_names;
    cm.counts.assign(cm.k * cm.k, 0);

    // Integer counts: the merge order cannot change the result.
    const long H = long(truth.height()), W = long(truth.width());
#pragma omp parallel
    {
        std::vector<std::uint64_t> local(cm.k * cm.k, 0);
#pragma omp for schedule(static) nowait
        for (long y = 0; y < H; ++y) {
            const auto t = truth.labels.row(y);
            const auto p = pred.labels.row(y);
            for (long x = 0; x < W; ++x) {
                if (t[x] == kIgnoreLabel || p[x] == kIgnoreLabel) continue;
                ++local[t[x] * cm.k + p[x]];
            }
        }
#pragma omp critical(polsar_confusion)
        for (std::size_t i = 0; i < local.size(); ++i) cm.counts[i] += local[i];
    }
    return cm;
}

Metrics metrics(const ConfusionMatrix& cm) {
    const std::uint64_t total = cm.total();
    if (total == 0) throw ArgumentError("metrics: confusion matrix is empty");
    const double n = double(total);

    std::vector<double> row(cm.k, 0.0), col(cm.k, 0.0);
    double diag = 0.0;
    for (std::size_t i = 0; i < cm.k; ++i) {
        for (std::size_t j = 0; j < cm.k; ++j) {
            row[i] += double(cm.at(i, j));
            col[j] += double(cm.at(i, j));
        }
        diag += double(cm.at(i, i));
    }

    Metrics m;
    m.overall_accuracy = diag / n;
    double pe = 0.0;
    for (std::size_t i = 0; i < cm.k; ++i) pe += row[i] * col[i];
    pe /= n * n;
    if (pe >= 1.0) {
        m.kappa_undefined = true;
        m.kappa = 0.0;
    } else {
        m.kappa = (m.overall_accuracy - pe) / (1.0 - pe);
    }

    auto ratio = [](double num, double den, bool& undefined) {
        undefined = den <= 0.0;
        return undefined ? 0.0 : num / den;
    };
    for (std::size_t i = 0; i < cm.k; ++i) {
        const double tp = double(cm.at(i, i));
        const double fp = col[i] - tp;
        const double fn = row[i] - tp;
        ClassMetrics c;
        c.precision = ratio(tp, tp + fp, c.precision_undefined);
        c.recall = ratio(tp, tp + fn, c.recall_undefined);
        c.f1 = ratio(2.0 * tp, 2.0 * tp + fp + fn, c.f1_undefined);
        c.iou = ratio(tp, tp + fp + fn, c.iou_undefined);
        m.per_class.push_back(c);
    }
    return m;
}

nlohmann::json report_json(const ConfusionMatrix& cm, const Metrics& m) {
    nlohmann::json matrix = nlohmann::json::array();
    for (std::size_t i = 0; i < cm.k; ++i) {
        std::vector<std::uint64_t> r(cm.counts.begin() + std::ptrdiff_t(i * cm.k),
                                     cm.counts.begin() + std::ptrdiff_t((i + 1) * cm.k));
        matrix.push_back(r);
    }
    nlohmann::json classes = nlohmann::json::array();
    for (std::size_t i = 0; i < cm.k; ++i) {
        const auto& c = m.per_class[i];
        nlohmann::json undefined = nlohmann::json::array();
        if (c.precision_undefined) undefined.push_back("precision");
        if (c.recall_undefined) undefined.push_back("recall");
        if (c.f1_undefined) undefined.push_back("f1");
        if (c.iou_undefined) undefined.push_back("iou");
        classes.push_back({{"name", cm.class_names[i]},
                           {"precision", c.precision},
                           {"recall", c.recall},
                           {"f1", c.f1},
                           {"iou", c.iou},
                           {"undefined", undefined}});
    }
    return {{"class_names", cm.class_names},
            {"confusion", matrix},
            {"rows", "truth"},
            {"total", cm.total()},
            {"overall_accuracy", m.overall_accuracy},
            {"kappa", m.kappa},
            {"kappa_undefined", m.kappa_undefined},
            {"per_class", classes}};
}

std::string report_text(const ConfusionMatrix& cm, const Metrics& m) {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof buf, "overall accuracy %.4f   kappa %.4f%s\n", m.overall_accuracy,
                  m.kappa, m.kappa_undefined ? " (undefined)" : "");
    os << buf << '\n';
    std::snprintf(buf, sizeof buf, "%-14s %9s %9s %9s %9s\n", "class", "precision", "recall", "f1",
                  "iou");
    os << buf;
    for (std::size_t i = 0; i < cm.k; ++i) {
        const auto& c = m.per_class[i];
        auto cell = [](double v, bool undefined) {
            char b[16];
            if (undefined) return std::string("        -");
            std::snprintf(b, sizeof b, "%9.4f", v);
            return std::string(b);
        };
        std::snprintf(buf, sizeof buf, "%-14s %s %s %s %s\n", cm.class_names[i].c_str(),
                      cell(c.precision, c.precision_undefined).c_str(),
                      cell(c.recall, c.recall_undefined).c_str(), cell(c.f1, c.f1_undefined).c_str(),
                      cell(c.iou, c.iou_undefined).c_str());
        os << buf;
    }
    os << "\nconfusion (rows truth, columns prediction)\n";
    for (std::size_t i = 0; i < cm.k; ++i) {
        std::snprintf(buf, sizeof buf, "%-14s", cm.class_names[i].c_str());
        os << buf;
        for (std::size_t j = 0; j < cm.k; ++j) {
            std::snprintf(buf, sizeof buf, " %10llu", static_cast<unsigned long long>(cm.at(i, j)));
            os << buf;
        }
        os << '\n';
    }
    return os.str();
}

} // namespace polsar
