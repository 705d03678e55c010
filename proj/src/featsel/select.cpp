#include "mofuse/featsel.hpp"

#include "mofuse/error.hpp"
#include "mofuse/tsv.hpp"

#include <cmath>
#include <limits>

namespace mofuse::featsel {

namespace {

constexpr double not_computed = std::numeric_limits<double>::quiet_NaN();

std::string cell(double v) {
    return std::isnan(v) ? "NA" : tsv::format_double(v);
}

}  // namespace

std::string_view to_string(Reason reason) {
    switch (reason) {
        case Reason::Kept:
            return "kept";
        case Reason::LowVariance:
            return "low_variance";
        case Reason::ZeroVariance:
            return "zero_variance";
        case Reason::NotSignificant:
            return "not_significant";
        case Reason::SmallFoldChange:
            return "small_fold_change";
        case Reason::FdrRejected:
            return "fdr_rejected";
    }
    return "kept";
}

std::size_t SelectionReport::kept_count() const {
    std::size_t n = 0;
    for (const auto& f : features) n += f.kept ? 1 : 0;
    return n;
}

std::string format_report(const SelectionReport& report) {
    std::string out = "feature\tvariance\tt_stat\tp_value\tp_adjusted\tlog2_fc\tkept\treason\n";
    for (const auto& f : report.features) {
        out += f.name;
        out += '\t' + cell(f.variance);
        out += '\t' + cell(f.t_stat);
        out += '\t' + cell(f.p_value);
        out += '\t' + cell(f.p_adjusted);
        out += '\t' + (f.log2_fc ? tsv::format_double(*f.log2_fc) : std::string("NA"));
        out += f.kept ? "\t1\t" : "\t0\t";
        out += to_string(f.reason);
        out += '\n';
    }
    return out;
}

void Thresholds::validate() const {
    if (!(min_variance >= 0.0)) throw ConfigError("min_variance must be >= 0");
    if (!(p_cut > 0.0 && p_cut < 1.0)) throw ConfigError("p_cut must lie in (0, 1)");
    if (!(fdr_q > 0.0 && fdr_q < 1.0)) throw ConfigError("fdr_q must lie in (0, 1)");
    if (!(abs_log2fc_min >= 0.0)) throw ConfigError("abs_log2fc_min must be >= 0");
}

VarianceFilterResult variance_filter(const ingest::FeatureMatrix& matrix, double min_variance) {
    if (matrix.features() == 0 || matrix.samples() == 0) {
        throw DataError("variance_filter: empty " + matrix.kind + " matrix");
    }
    VarianceFilterResult out;
    for (std::size_t f = 0; f < matrix.features(); ++f) {
        const auto col = matrix.values.column(f);
        const double var = sample_variance(col);
        out.variances.push_back(var);
        if (!(var < min_variance)) {
            out.kept_columns.push_back(f);
        }
    }
    if (out.kept_columns.empty()) {
        throw DataError("variance_filter: every feature of the " + matrix.kind + " matrix has variance below " +
                        tsv::format_double(min_variance));
    }
    out.matrix = ingest::subset_features(matrix, out.kept_columns);
    return out;
}

ZScoreResult zscore_normalize(const ingest::FeatureMatrix& matrix) {
    ZScoreResult out;
    for (std::size_t f = 0; f < matrix.features(); ++f) {
        const auto col = matrix.values.column(f);
        const double sd = std::sqrt(sample_variance(col));
        if (!(sd > 0.0)) {
            out.zero_variance_columns.push_back(f);
            continue;
        }
        out.kept_columns.push_back(f);
        out.means.push_back(mean(col));
        out.stds.push_back(sd);
    }
    out.matrix = ingest::subset_features(matrix, out.kept_columns);
    for (std::size_t r = 0; r < out.matrix.samples(); ++r) {
        for (std::size_t j = 0; j < out.kept_columns.size(); ++j) {
            double& v = out.matrix.values(r, j);
            v = (v - out.means[j]) / out.stds[j];
        }
    }
    return out;
}

ingest::FeatureMatrix Selection::apply(const ingest::FeatureMatrix& matrix) const {
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j] >= matrix.features()) {
            throw DimensionError("selection refers to column " + std::to_string(columns[j]) + " but the " +
                                 matrix.kind + " matrix has " + std::to_string(matrix.features()) + " features");
        }
    }
    auto out = ingest::subset_features(matrix, columns);
    for (std::size_t r = 0; r < out.samples(); ++r) {
        for (std::size_t j = 0; j < columns.size(); ++j) {
            double& v = out.values(r, j);
            v = (v - means[j]) / stds[j];
        }
    }
    return out;
}

SelectionResult select_features(const ingest::FeatureMatrix& matrix, std::span<const int> labels,
                                const Thresholds& thresholds) {
    thresholds.validate();
    if (labels.size() != matrix.samples()) {
        throw DimensionError("select_features: " + std::to_string(matrix.samples()) + " samples but " +
                             std::to_string(labels.size()) + " labels");
    }
    if (matrix.features() == 0 || matrix.samples() == 0) {
        throw DataError("select_features: empty " + matrix.kind + " matrix");
    }

    SelectionReport report;
    report.kind = matrix.kind;
    report.features.resize(matrix.features());
    for (std::size_t f = 0; f < matrix.features(); ++f) {
        auto& st = report.features[f];
        st.name = matrix.feature_names[f];
        const auto col = matrix.values.column(f);
        st.variance = sample_variance(col);
        st.t_stat = not_computed;
        st.p_value = not_computed;
        st.p_adjusted = not_computed;
        st.log2_fc = log2_fold_change(col, labels);
    }

    // Indices below always refer to columns of the input matrix.
    std::vector<std::size_t> alive;
    for (std::size_t f = 0; f < matrix.features(); ++f) {
        if (thresholds.variance_filter && report.features[f].variance < thresholds.min_variance) {
            report.features[f].reason = Reason::LowVariance;
        } else {
            alive.push_back(f);
        }
    }

    const auto z = zscore_normalize(ingest::subset_features(matrix, alive));
    for (auto j : z.zero_variance_columns) {
        report.features[alive[j]].reason = Reason::ZeroVariance;
    }
    std::vector<std::size_t> normalized;  // input columns with a z-scored counterpart
    for (auto j : z.kept_columns) normalized.push_back(alive[j]);

    std::size_t n1 = 0;
    for (int y : labels) n1 += y == 1 ? 1 : 0;
    const std::size_t n0 = labels.size() - n1;
    const bool can_test = n1 >= 2 && n0 >= 2;
    if (!can_test && (thresholds.t_test || thresholds.fdr)) {
        throw DataError("select_features: t-test needs at least 2 samples per class (got " + std::to_string(n1) +
                        " and " + std::to_string(n0) + ")");
    }

    alive.clear();
    for (std::size_t j = 0; j < normalized.size(); ++j) {
        const std::size_t f = normalized[j];
        auto& st = report.features[f];
        if (can_test) {
            const auto res = welch_t_test(z.matrix.values.column(j), labels);
            st.t_stat = res.t;
            st.p_value = res.p;
        }
        if (thresholds.t_test && !(st.p_value < thresholds.p_cut)) {
            st.reason = Reason::NotSignificant;
            continue;
        }
        if (thresholds.fold_change && st.log2_fc && std::fabs(*st.log2_fc) < thresholds.abs_log2fc_min) {
            st.reason = Reason::SmallFoldChange;
            continue;
        }
        alive.push_back(f);
    }

    if (thresholds.fdr && !alive.empty()) {
        std::vector<double> ps;
        ps.reserve(alive.size());
        for (auto f : alive) ps.push_back(report.features[f].p_value);
        const auto adj = bh_adjust(ps);
        std::vector<std::size_t> passed;
        for (std::size_t i = 0; i < alive.size(); ++i) {
            auto& st = report.features[alive[i]];
            st.p_adjusted = adj[i];
            if (adj[i] <= thresholds.fdr_q) {
                passed.push_back(alive[i]);
            } else {
                st.reason = Reason::FdrRejected;
            }
        }
        alive = std::move(passed);
    }

    if (alive.empty()) {
        throw DataError("select_features: no feature of the " + matrix.kind + " matrix (" +
                        std::to_string(matrix.features()) + " candidates) survived selection; consider relaxing " +
                        "p_cut (" + tsv::format_double(thresholds.p_cut) + "), fdr_q (" +
                        tsv::format_double(thresholds.fdr_q) + "), abs_log2fc_min (" +
                        tsv::format_double(thresholds.abs_log2fc_min) + ") or min_variance (" +
                        tsv::format_double(thresholds.min_variance) + ")");
    }

    Selection sel;
    std::size_t zj = 0;
    for (auto f : alive) {
        report.features[f].kept = true;
        report.features[f].reason = Reason::Kept;
        while (normalized[zj] != f) ++zj;
        sel.columns.push_back(f);
        sel.means.push_back(z.means[zj]);
        sel.stds.push_back(z.stds[zj]);
    }
    sel.report = std::move(report);

    SelectionResult out;
    out.matrix = sel.apply(matrix);
    out.selection = std::move(sel);
    return out;
}

}  // namespace mofuse::featsel
