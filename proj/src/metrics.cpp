#include "mofuse/metrics.hpp"

#include "mofuse/error.hpp"
#include "mofuse/tsv.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace mofuse::metrics {

ConfusionCounts confusion(std::span<const int> labels, std::span<const int> predictions) {
    if (labels.size() != predictions.size()) {
        throw DimensionError("confusion: " + std::to_string(labels.size()) + " labels but " +
                             std::to_string(predictions.size()) + " predictions");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool actual = labels[i] == 1;
        const bool predicted = predictions[i] == 1;
        if (actual && predicted) ++c.tp;
        else if (!actual && !predicted) ++c.tn;
        else if (!actual && predicted) ++c.fp;
        else ++c.fn;
    }
    return c;
}

double f1_score(double precision, double recall) {
    const double denom = precision + recall;
    return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

MetricSuite metric_suite(const ConfusionCounts& counts) {
    const std::size_t total = counts.total();
    if (total == 0) {
        throw DataError("metric_suite: no evaluated samples");
    }
    MetricSuite m;
    m.accuracy = static_cast<double>(counts.tp + counts.tn) / static_cast<double>(total);
    if (counts.tp + counts.fp > 0) {
        m.precision = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fp);
    } else {
        m.precision_undefined = true;
    }
    if (counts.tp + counts.fn > 0) {
        m.recall = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fn);
    } else {
        m.recall_undefined = true;
    }
    m.f1_undefined = !(m.precision + m.recall > 0.0);
    m.f1 = f1_score(m.precision, m.recall);
    return m;
}

RocCurve roc_auc(std::span<const int> labels, std::span<const double> scores) {
    if (labels.size() != scores.size()) {
        throw DimensionError("roc_auc: " + std::to_string(labels.size()) + " labels but " +
                             std::to_string(scores.size()) + " scores");
    }
    std::size_t pos = 0;
    for (int y : labels) pos += y == 1 ? 1 : 0;
    const std::size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0) {
        throw DataError("roc_auc: both classes must be present");
    }

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.push_back({0.0, 0.0});
    std::size_t tp = 0;
    std::size_t fp = 0;
    double area = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        const double s = scores[order[i]];
        std::size_t dtp = 0;
        std::size_t dfp = 0;
        while (j < order.size() && scores[order[j]] == s) {
            (labels[order[j]] == 1 ? dtp : dfp) += 1;
            ++j;
        }
        // Trapezoid in count units; divided by pos * neg at the end.
        area += static_cast<double>(dfp) * (static_cast<double>(tp) + 0.5 * static_cast<double>(dtp));
        tp += dtp;
        fp += dfp;
        curve.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                                static_cast<double>(tp) / static_cast<double>(pos)});
        i = j;
    }
    curve.auc = area / (static_cast<double>(pos) * static_cast<double>(neg));
    return curve;
}

std::string format_roc_tsv(const RocCurve& curve) {
    std::string out = "fpr\ttpr\n";
    for (const auto& p : curve.points) {
        out += tsv::format_double(p.fpr) + '\t' + tsv::format_double(p.tpr) + '\n';
    }
    return out;
}

std::string roc_svg(const RocCurve& curve, const std::string& title) {
    constexpr double size = 400.0;
    constexpr double margin = 50.0;
    auto px = [&](double v) { return margin + v * size; };
    auto py = [&](double v) { return margin + (1.0 - v) * size; };
    char buf[128];

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"500\" height=\"500\" viewBox=\"0 0 500 500\">\n";
    svg += "<rect width=\"500\" height=\"500\" fill=\"white\"/>\n";
    svg += "<rect x=\"50\" y=\"50\" width=\"400\" height=\"400\" fill=\"none\" stroke=\"black\"/>\n";
    svg += "<line x1=\"50\" y1=\"450\" x2=\"450\" y2=\"50\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";
    svg += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", i ? " " : "", px(curve.points[i].fpr), py(curve.points[i].tpr));
        svg += buf;
    }
    svg += "\"/>\n";
    std::snprintf(buf, sizeof buf, "%.4f", curve.auc);
    svg += "<text x=\"250\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" + title +
           " (AUC = " + buf + ")</text>\n";
    svg += "<text x=\"250\" y=\"485\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
           "False positive rate</text>\n";
    svg += "<text x=\"18\" y=\"250\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 18 250)\">True positive rate</text>\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace mofuse::metrics
