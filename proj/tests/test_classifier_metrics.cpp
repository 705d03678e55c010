#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"

#include "mofuse/classifier.hpp"
#include "mofuse/error.hpp"
#include "mofuse/metrics.hpp"

#include <cmath>

using namespace mofuse;
using namespace mofuse::metrics;

namespace {

struct Blobs {
    nn::Matrix x;
    std::vector<int> y;
};

Blobs separable_blobs(std::uint64_t seed, std::size_t n = 200) {
    nn::Rng rng(seed);
    Blobs b{nn::Matrix(n, 2), std::vector<int>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        b.y[i] = i % 2 ? 1 : 0;
        const double centre = b.y[i] ? 2.0 : -2.0;
        b.x(i, 0) = centre + 0.5 * rng.normal();
        b.x(i, 1) = centre + 0.5 * rng.normal();
    }
    return b;
}

std::vector<int> random_labels(nn::Rng& rng, std::size_t n) {
    std::vector<int> y(n);
    for (auto& v : y) v = rng.uniform() < 0.4 ? 1 : 0;
    y[0] = 1;
    y[1] = 0;
    return y;
}

}  // namespace

TEST_CASE("separable blobs are learned in ten epochs") {
    const auto blobs = separable_blobs(1);
    nn::Rng rng(2);
    const auto trained = clf::train_classifier(blobs.x, blobs.y, clf::ClassifierConfig{}, rng);
    CHECK(trained.train_loss.size() == 10);
    CHECK(trained.validation_loss.size() == 10);
    CHECK(trained.train_rows == 160);
    CHECK(trained.validation_rows == 40);
    const auto pred = clf::predict_label(trained.model, blobs.x);
    std::size_t right = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) right += pred[i] == blobs.y[i];
    CHECK(static_cast<double>(right) / static_cast<double>(pred.size()) > 0.95);
    for (double p : clf::predict_proba(trained.model, blobs.x)) CHECK((p > 0.0 && p < 1.0));
}

TEST_CASE("classifier determinism and errors") {
    const auto blobs = separable_blobs(3, 60);
    nn::Rng a(4), b(4);
    const auto first = clf::train_classifier(blobs.x, blobs.y, clf::ClassifierConfig{}, a);
    const auto second = clf::train_classifier(blobs.x, blobs.y, clf::ClassifierConfig{}, b);
    CHECK(first.model.net == second.model.net);
    CHECK(first.train_loss == second.train_loss);

    CHECK_THROWS_AS(clf::train_classifier(blobs.x, std::vector<int>(60, 1), clf::ClassifierConfig{}, a), DataError);
    CHECK_THROWS_AS(clf::train_classifier(blobs.x, std::vector<int>(5, 1), clf::ClassifierConfig{}, a),
                    DimensionError);
    CHECK_THROWS_AS(clf::predict_proba(first.model, nn::Matrix(2, 3)), DimensionError);
}

TEST_CASE("threshold rules") {
    nn::Rng rng(5);
    auto model = clf::make_classifier(3, clf::ClassifierConfig{}, rng);
    auto& last = model.net.back();
    for (double& w : last.weights.data()) w = 0.0;
    for (double& v : last.biases) v = 0.0;
    const auto x = testing::random_matrix(rng, 10, 3, -1.0, 1.0);
    for (double p : clf::predict_proba(model, x)) CHECK(p == 0.5);
    for (int label : clf::predict_label(model, x)) CHECK(label == 1);

    auto fresh = clf::make_classifier(3, clf::ClassifierConfig{}, rng);
    fresh.threshold = 0.0;
    for (int label : clf::predict_label(fresh, x)) CHECK(label == 1);
    fresh.threshold = 1.0;
    for (int label : clf::predict_label(fresh, x)) CHECK(label == 0);
}

TEST_CASE("confusion counts") {
    const std::vector<int> y{1, 0, 1};
    CHECK(confusion(y, y) == ConfusionCounts{2, 1, 0, 0});
    const std::vector<int> flipped{0, 1, 0};
    const auto wrong = confusion(y, flipped);
    CHECK(wrong.tp == 0);
    CHECK(wrong.tn == 0);
    CHECK(wrong.fp == 1);
    CHECK(wrong.fn == 2);
    CHECK_THROWS_AS(confusion(y, std::vector<int>{1}), DimensionError);

    nn::Rng rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const auto labels = random_labels(rng, 100);
        const auto preds = random_labels(rng, 100);
        ConfusionCounts loop;
        for (std::size_t i = 0; i < 100; ++i) {
            if (labels[i] == 1 && preds[i] == 1) ++loop.tp;
            if (labels[i] == 0 && preds[i] == 0) ++loop.tn;
            if (labels[i] == 0 && preds[i] == 1) ++loop.fp;
            if (labels[i] == 1 && preds[i] == 0) ++loop.fn;
        }
        CHECK(confusion(labels, preds) == loop);
    }
}

TEST_CASE("metric suite reproduces the published F1 values") {
    CHECK(std::fabs(f1_score(1.0, 0.81481) - 0.89796) < 1e-4);
    CHECK(std::fabs(f1_score(0.85417, 0.75926) - 0.80392) < 1e-4);

    // 22/22 precision and 22/27 recall; 41/48 precision and 41/54 recall.
    const auto first = metric_suite({22, 100, 0, 5});
    CHECK(std::fabs(first.precision - 1.0) < 1e-12);
    CHECK(std::fabs(first.recall - 0.81481) < 1e-4);
    CHECK(std::fabs(first.f1 - 0.89796) < 1e-4);
    const auto second = metric_suite({41, 100, 7, 13});
    CHECK(std::fabs(second.precision - 0.85417) < 1e-4);
    CHECK(std::fabs(second.recall - 0.75926) < 1e-4);
    CHECK(std::fabs(second.f1 - 0.80392) < 1e-4);
    CHECK(second.accuracy == 141.0 / 161.0);
}

TEST_CASE("metric edge cases") {
    const auto perfect = metric_suite({1, 1, 0, 0});
    CHECK(perfect.accuracy == 1.0);
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.f1 == 1.0);

    const auto none = metric_suite({0, 5, 0, 0});
    CHECK(none.precision == 0.0);
    CHECK(none.precision_undefined);
    CHECK(none.recall_undefined);
    CHECK(none.f1_undefined);
    CHECK(f1_score(0.0, 0.0) == 0.0);
    CHECK_THROWS_AS(metric_suite({}), DataError);

    for (std::size_t tp = 0; tp < 4; ++tp) {
        for (std::size_t tn = 0; tn < 4; ++tn) {
            const ConfusionCounts c{tp, tn, 2, 1};
            CHECK(metric_suite(c).accuracy == static_cast<double>(tp + tn) / static_cast<double>(tp + tn + 3));
        }
    }
}

TEST_CASE("ROC examples") {
    const std::vector<int> sep{1, 1, 0, 0};
    CHECK(roc_auc(sep, std::vector<double>{0.9, 0.8, 0.2, 0.1}).auc == 1.0);
    const auto flat = roc_auc(sep, std::vector<double>{0.3, 0.3, 0.3, 0.3});
    CHECK(flat.auc == 0.5);
    CHECK(flat.points.size() == 2);
    CHECK(roc_auc(std::vector<int>{1, 0, 1, 0}, std::vector<double>{0.9, 0.8, 0.7, 0.6}).auc == 0.75);
    CHECK_THROWS_AS(roc_auc(std::vector<int>{1, 1}, std::vector<double>{0.2, 0.3}), DataError);
    CHECK_THROWS_AS(roc_auc(sep, std::vector<double>{0.2}), DimensionError);
}

TEST_CASE("AUC equals pairwise concordance and the curve is monotone") {
    nn::Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 5 + rng.below(60);
        const auto labels = random_labels(rng, n);
        std::vector<double> scores(n);
        // Coarse scores so ties occur.
        for (auto& s : scores) s = std::round(rng.uniform() * 20.0) / 20.0;
        const auto curve = roc_auc(labels, scores);
        CHECK(std::fabs(curve.auc - testing::mann_whitney_auc(labels, scores)) < 1e-12);

        REQUIRE(curve.points.size() >= 2);
        CHECK(curve.points.front().fpr == 0.0);
        CHECK(curve.points.front().tpr == 0.0);
        CHECK(curve.points.back().fpr == 1.0);
        CHECK(curve.points.back().tpr == 1.0);
        for (std::size_t i = 1; i < curve.points.size(); ++i) {
            CHECK(curve.points[i].fpr >= curve.points[i - 1].fpr);
            CHECK(curve.points[i].tpr >= curve.points[i - 1].tpr);
        }

        std::vector<double> transformed(n);
        for (std::size_t i = 0; i < n; ++i) transformed[i] = std::exp(3.0 * scores[i]) - 7.0;
        CHECK(roc_auc(labels, transformed).auc == curve.auc);
    }
}

TEST_CASE("ROC serialization") {
    const auto curve = roc_auc(std::vector<int>{1, 0, 1, 0}, std::vector<double>{0.9, 0.8, 0.7, 0.6});
    const auto tsv = format_roc_tsv(curve);
    CHECK(tsv.rfind("fpr\ttpr\n", 0) == 0);
    CHECK(std::count(tsv.begin(), tsv.end(), '\n') == static_cast<long>(curve.points.size() + 1));
    const auto svg = roc_svg(curve, "test");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
}
