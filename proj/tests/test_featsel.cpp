#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"

#include "mofuse/error.hpp"
#include "mofuse/featsel.hpp"

#include <algorithm>
#include <cmath>

using namespace mofuse;
using namespace mofuse::featsel;

namespace {

ingest::FeatureMatrix make(const nn::Matrix& values) {
    ingest::FeatureMatrix m;
    m.kind = "test";
    m.values = values;
    for (std::size_t r = 0; r < values.rows(); ++r) m.sample_ids.push_back("S" + std::to_string(r));
    for (std::size_t c = 0; c < values.cols(); ++c) m.feature_names.push_back("F" + std::to_string(c));
    return m;
}

std::vector<int> balanced_labels(std::size_t n1, std::size_t n0) {
    std::vector<int> y(n1, 1);
    y.insert(y.end(), n0, 0);
    return y;
}

}  // namespace

TEST_CASE("variance filter") {
    const auto m = make(nn::Matrix::from_rows({{1, 5}, {2, 5}, {3, 5}}));
    CHECK(sample_variance(std::vector<double>{1, 2, 3}) == 1.0);
    const auto r = variance_filter(m, 0.5);
    CHECK(r.kept_columns == std::vector<std::size_t>{0});
    CHECK(r.variances == std::vector<double>{1.0, 0.0});
    CHECK(variance_filter(m, 0.0).kept_columns.size() == 2);
    CHECK_THROWS_AS(variance_filter(m, 2.0), DataError);
}

TEST_CASE("z-score") {
    const auto z = zscore_normalize(make(nn::Matrix::from_rows({{1, 7}, {2, 7}, {3, 7}})));
    CHECK(z.kept_columns == std::vector<std::size_t>{0});
    CHECK(z.zero_variance_columns == std::vector<std::size_t>{1});
    CHECK(z.matrix.values == nn::Matrix::from_rows({{-1}, {0}, {1}}));

    nn::Rng rng(8);
    const auto raw = make(testing::random_matrix(rng, 17, 5, -3, 9));
    const auto once = zscore_normalize(raw).matrix;
    for (std::size_t c = 0; c < 5; ++c) {
        const auto col = once.values.column(c);
        CHECK(std::fabs(mean(col)) < 1e-10);
        CHECK(std::fabs(std::sqrt(sample_variance(col)) - 1.0) < 1e-10);
    }
    const auto twice = zscore_normalize(once).matrix;
    for (std::size_t i = 0; i < once.values.size(); ++i) {
        CHECK(std::fabs(once.values.data()[i] - twice.values.data()[i]) < 1e-10);
    }
}

TEST_CASE("welch t-test reference values") {
    const std::vector<double> v{1, 2, 3, 2, 3, 4};
    const std::vector<int> y{1, 1, 1, 0, 0, 0};
    const auto r = welch_t_test(v, y);
    // scipy.stats.ttest_ind([1,2,3], [2,3,4], equal_var=False)
    CHECK(r.t == doctest::Approx(-1.224744871391589).epsilon(1e-12));
    CHECK(r.df == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(r.p == doctest::Approx(0.2878641347266908).epsilon(1e-9));
    CHECK(std::fabs(r.p - testing::t_quadrature_p(r.t, r.df)) < 1e-6);

    const auto same = welch_t_test(std::vector<double>{1, 2, 1, 2}, std::vector<int>{1, 1, 0, 0});
    CHECK(same.t == 0.0);
    CHECK(same.p == 1.0);
    const auto flat = welch_t_test(std::vector<double>{5, 5, 5, 5}, std::vector<int>{1, 1, 0, 0});
    CHECK(flat.t == 0.0);
    CHECK(flat.p == 1.0);
    CHECK_THROWS_AS(welch_t_test(std::vector<double>{1, 2, 3}, std::vector<int>{1, 0, 0}), DataError);
}

TEST_CASE("welch p-values agree with t-density quadrature") {
    nn::Rng rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n1 = 2 + rng.below(15), n0 = 2 + rng.below(30);
        const double shift = rng.uniform(-2, 2), s1 = rng.uniform(0.2, 3), s0 = rng.uniform(0.2, 3);
        std::vector<double> v;
        std::vector<int> y;
        for (std::size_t i = 0; i < n1; ++i) {
            v.push_back(shift + s1 * rng.normal());
            y.push_back(1);
        }
        for (std::size_t i = 0; i < n0; ++i) {
            v.push_back(s0 * rng.normal());
            y.push_back(0);
        }
        const auto r = welch_t_test(v, y);
        CHECK(std::fabs(r.p - testing::t_quadrature_p(r.t, r.df)) < 1e-6);

        // Class swap flips the sign and keeps p.
        std::vector<int> flipped(y.size());
        std::transform(y.begin(), y.end(), flipped.begin(), [](int l) { return 1 - l; });
        const auto s = welch_t_test(v, flipped);
        CHECK(s.t == doctest::Approx(-r.t).epsilon(1e-12));
        CHECK(s.p == doctest::Approx(r.p).epsilon(1e-12));
    }
}

TEST_CASE("incomplete beta edge values") {
    CHECK(regularized_incomplete_beta(2, 3, 0.0) == 0.0);
    CHECK(regularized_incomplete_beta(2, 3, 1.0) == 1.0);
    // I_x(1, 1) = x and I_x(a, 1) = x^a.
    CHECK(regularized_incomplete_beta(1, 1, 0.3) == doctest::Approx(0.3).epsilon(1e-13));
    CHECK(regularized_incomplete_beta(2.5, 1, 0.4) == doctest::Approx(std::pow(0.4, 2.5)).epsilon(1e-13));
    CHECK(student_t_two_sided_p(0.0, 7) == doctest::Approx(1.0));
}

TEST_CASE("log2 fold change") {
    CHECK(*log2_fold_change(std::vector<double>{4, 4, 2, 2}, std::vector<int>{1, 1, 0, 0}) == 1.0);
    CHECK(*log2_fold_change(std::vector<double>{2, 2, 4, 4}, std::vector<int>{1, 1, 0, 0}) == -1.0);
    CHECK(*log2_fold_change(std::vector<double>{3, 2}, std::vector<int>{1, 0}) ==
          doctest::Approx(0.5849625007211562).epsilon(1e-14));
    CHECK_FALSE(log2_fold_change(std::vector<double>{-1, 2}, std::vector<int>{1, 0}).has_value());
}

TEST_CASE("BH hand example and brute-force oracle") {
    for (double v : bh_adjust(std::vector<double>{0.01, 0.02, 0.03, 0.04})) CHECK(v == doctest::Approx(0.04).epsilon(1e-15));
    const auto tied = bh_adjust(std::vector<double>{0.2, 0.01, 0.2, 0.5});
    CHECK(tied[0] == tied[2]);
    CHECK(bh_adjust(std::vector<double>{0.3}) == std::vector<double>{0.3});
    CHECK_THROWS_AS(bh_adjust(std::vector<double>{0.1, 1.5}), DataError);

    nn::Rng rng(202);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t m = 1 + rng.below(40);
        std::vector<double> p(m);
        for (double& v : p) {
            v = rng.uniform();
            if (rng.uniform() < 0.3) v = std::round(v * 10.0) / 10.0;  // force ties
            if (rng.uniform() < 0.1) v *= 1e-4;
        }
        const auto adj = bh_adjust(p);
        CHECK(adj == testing::brute_force_bh(p));
        for (std::size_t i = 0; i < m; ++i) CHECK(adj[i] >= p[i]);
    }
}

TEST_CASE("selection on pure noise keeps few features") {
    double fraction = 0.0;
    const int seeds = 10;
    for (int seed = 0; seed < seeds; ++seed) {
        nn::Rng rng(300 + static_cast<std::uint64_t>(seed));
        nn::Matrix x(60, 200);
        for (double& v : x.data()) v = 5.0 + rng.normal();
        const auto y = balanced_labels(20, 40);
        std::size_t kept = 0;
        try {
            kept = select_features(make(x), y, Thresholds{}).selection.columns.size();
        } catch (const DataError&) {
            kept = 0;
        }
        fraction += static_cast<double>(kept) / 200.0;
    }
    CHECK(fraction / seeds < 0.05);
}

TEST_CASE("planted signal survives") {
    int survived = 0;
    const int seeds = 40;
    for (int seed = 0; seed < seeds; ++seed) {
        nn::Rng rng(500 + static_cast<std::uint64_t>(seed));
        nn::Matrix x(40, 50);
        for (double& v : x.data()) v = 10.0 + rng.normal();
        const auto y = balanced_labels(15, 25);
        for (std::size_t r = 0; r < 15; ++r) x(r, 7) += 5.0 + 10.0;  // 5 sd apart, and more than doubled
        try {
            const auto res = select_features(make(x), y, Thresholds{});
            const auto& st = res.selection.report.features[7];
            if (st.kept && st.p_adjusted < 0.01) ++survived;
        } catch (const DataError&) {
        }
    }
    CHECK(static_cast<double>(survived) / seeds > 0.95);
}

TEST_CASE("selection report bookkeeping") {
    nn::Matrix x(12, 4);
    nn::Rng rng(9);
    for (double& v : x.data()) v = 1.0 + 0.1 * rng.normal();
    for (std::size_t r = 0; r < 12; ++r) x(r, 3) = 2.0;  // constant
    for (std::size_t r = 0; r < 6; ++r) x(r, 0) += 5.0;   // strong and doubled
    for (std::size_t r = 0; r < 6; ++r) x(r, 1) += 0.5;   // significant but under 2x
    const auto y = balanced_labels(6, 6);
    Thresholds t;
    t.min_variance = 0.0;
    const auto res = select_features(make(x), y, t);
    const auto& f = res.selection.report.features;
    CHECK(res.selection.columns == std::vector<std::size_t>{0});
    CHECK(f[0].reason == Reason::Kept);
    CHECK(f[1].reason == Reason::SmallFoldChange);
    CHECK(f[3].reason == Reason::ZeroVariance);
    CHECK(res.selection.report.kept_count() == 1);
    const auto text = format_report(res.selection.report);
    CHECK(text.rfind("feature\tvariance\tt_stat\tp_value\tp_adjusted\tlog2_fc\tkept\treason\n", 0) == 0);
    for (const auto& st : f) {
        if (!std::isnan(st.p_adjusted)) CHECK(st.p_adjusted >= st.p_value);
    }
    // The fitted transform applies unchanged to other rows.
    const auto applied = res.selection.apply(make(x));
    CHECK(applied.values == res.matrix.values);

    Thresholds strict;
    strict.p_cut = 1e-12;
    try {
        select_features(make(x), y, strict);
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("relax") != std::string::npos);
    }
}

TEST_CASE("all stages disabled is plain z-scoring") {
    nn::Rng rng(10);
    const auto m = make(testing::random_matrix(rng, 9, 6, -2, 2));
    Thresholds off;
    off.variance_filter = off.t_test = off.fold_change = off.fdr = false;
    const auto res = select_features(m, balanced_labels(4, 5), off);
    CHECK(res.selection.columns.size() == 6);
    CHECK(res.matrix.values == zscore_normalize(m).matrix.values);
    Thresholds bad;
    bad.p_cut = 1.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
