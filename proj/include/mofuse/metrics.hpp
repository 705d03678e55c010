#ifndef MOFUSE_METRICS_HPP
#define MOFUSE_METRICS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mofuse::metrics {

/// Positive class is label 1.
struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    std::size_t total() const noexcept { return tp + tn + fp + fn; }
    bool operator==(const ConfusionCounts&) const = default;
};

ConfusionCounts confusion(std::span<const int> labels, std::span<const int> predictions);

/// 2PR / (P + R); 0 when P + R = 0.
double f1_score(double precision, double recall);

struct MetricSuite {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    // Set when the matching denominator was zero and the metric defaulted to 0.
    bool precision_undefined = false;
    bool recall_undefined = false;
    bool f1_undefined = false;
};

MetricSuite metric_suite(const ConfusionCounts& counts);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;
};

/**
 * Empirical ROC: thresholds sweep the distinct scores from high to low, equal
 * scores move together as one step. Starts at (0,0), ends at (1,1); the AUC
 * is the trapezoid area under the points.
 */
RocCurve roc_auc(std::span<const int> labels, std::span<const double> scores);

std::string format_roc_tsv(const RocCurve& curve);

/// Standalone SVG line plot of the curve with the chance diagonal.
std::string roc_svg(const RocCurve& curve, const std::string& title);

}  // namespace mofuse::metrics

#endif
