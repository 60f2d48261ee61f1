#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "polsar/core.hpp"

namespace polsar {

/// Rows are truth, columns prediction.
struct ConfusionMatrix {
    std::size_t k = 0;
    std::vector<std::uint64_t> counts; // k * k, row-major
    std::vector<std::string> class_names;

    std::uint64_t& at(std::size_t truth, std::size_t pred) { return counts[truth * k + pred]; }
    std::uint64_t at(std::size_t truth, std::size_t pred) const { return counts[truth * k + pred]; }
    std::uint64_t total() const;
};

/// Pixels ignored in either map are skipped. Both maps must share
/// dimensions and class names.
ConfusionMatrix confusion(const ClassMap& pred, const ClassMap& truth);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double iou = 0.0;
    // Set when the ratio's denominator is zero; the value is then reported as 0.
    bool precision_undefined = false;
    bool recall_undefined = false;
    bool f1_undefined = false;
    bool iou_undefined = false;
};

struct Metrics {
    double overall_accuracy = 0.0;
    double kappa = 0.0;
    bool kappa_undefined = false; // chance agreement p_e == 1
    std::vector<ClassMetrics> per_class;
};

/// OA = trace / total, kappa = (p_o - p_e) / (1 - p_e) with
/// p_e = sum_m row_m col_m / total^2, IoU = TP / (TP + FP + FN).
/// Throws ArgumentError on an empty matrix.
Metrics metrics(const ConfusionMatrix& cm);

nlohmann::json report_json(const ConfusionMatrix& cm, const Metrics& m);
std::string report_text(const ConfusionMatrix& cm, const Metrics& m);

} // namespace polsar
