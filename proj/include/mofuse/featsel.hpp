#ifndef MOFUSE_FEATSEL_HPP
#define MOFUSE_FEATSEL_HPP

#include "mofuse/ingest.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

/**
 * @file featsel.hpp
 *
 * @brief Two-class feature screening.
 *
 * Features pass through a fixed chain of filters: low variance, z-score
 * normalization, a Welch t-test, a log2 fold-change filter and finally a
 * Benjamini-Hochberg FDR cut. Every statistic is computed per feature from
 * the rows handed in, which in the pipeline are the training rows only.
 */

namespace mofuse::featsel {

// ---- statistics ---------------------------------------------------------

double mean(std::span<const double> values);

/// Sample variance with n - 1 in the denominator; 0 for fewer than two values.
double sample_variance(std::span<const double> values);

/// I_x(a, b), evaluated with a modified Lentz continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

/// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
};

/**
 * Welch's unequal-variance t-test of class 1 against class 0.
 *
 * t = (mean1 - mean0) / sqrt(s1^2/n1 + s0^2/n0) with Welch-Satterthwaite
 * degrees of freedom. When both classes are constant the result is t = 0,
 * p = 1 for equal means and t = +/-inf, p = 0 otherwise.
 */
TTestResult welch_t_test(std::span<const double> values, std::span<const int> labels);

/// log2(mean1 / mean0), or nullopt unless both class means are positive.
std::optional<double> log2_fold_change(std::span<const double> raw_values, std::span<const int> labels);

/**
 * Benjamini-Hochberg step-up adjustment. Results are capped at 1 and
 * returned in input order; tied p-values receive identical adjusted values.
 */
std::vector<double> bh_adjust(std::span<const double> p_values);

// ---- per-stage filters --------------------------------------------------

enum class Reason {
    Kept,
    LowVariance,
    ZeroVariance,
    NotSignificant,
    SmallFoldChange,
    FdrRejected
};

std::string_view to_string(Reason reason);

struct FeatureStat {
    std::string name;
    double variance = 0.0;
    /// NaN when the feature never reached the t-test.
    double t_stat = 0.0;
    double p_value = 0.0;
    /// NaN unless the feature entered the BH stage.
    double p_adjusted = 0.0;
    std::optional<double> log2_fc;
    bool kept = false;
    Reason reason = Reason::Kept;
};

struct SelectionReport {
    std::string kind;
    std::vector<FeatureStat> features;

    std::size_t kept_count() const;
};

std::string format_report(const SelectionReport& report);

struct Thresholds {
    double min_variance = 0.002;
    double p_cut = 0.05;
    double fdr_q = 0.01;
    double abs_log2fc_min = 1.0;
    bool variance_filter = true;
    bool t_test = true;
    bool fold_change = true;
    bool fdr = true;

    /// Throws ConfigError when a value is out of range.
    void validate() const;
};

struct VarianceFilterResult {
    ingest::FeatureMatrix matrix;
    std::vector<std::size_t> kept_columns;
    std::vector<double> variances;
};

/// Drops columns whose sample variance is below `min_variance`.
VarianceFilterResult variance_filter(const ingest::FeatureMatrix& matrix, double min_variance);

struct ZScoreResult {
    ingest::FeatureMatrix matrix;
    std::vector<std::size_t> kept_columns;
    std::vector<std::size_t> zero_variance_columns;
    std::vector<double> means;
    std::vector<double> stds;
};

/// Column-wise (v - mean) / sd with sd using n - 1; constant columns are set aside.
ZScoreResult zscore_normalize(const ingest::FeatureMatrix& matrix);

// ---- full chain ---------------------------------------------------------

/**
 * A fitted selection: which input columns survive plus the training-row
 * normalization applied to them. `apply` maps any matrix with the same
 * feature layout (e.g. held-out rows) through the same transform.
 */
struct Selection {
    std::vector<std::size_t> columns;
    std::vector<double> means;
    std::vector<double> stds;
    SelectionReport report;

    ingest::FeatureMatrix apply(const ingest::FeatureMatrix& matrix) const;
};

struct SelectionResult {
    ingest::FeatureMatrix matrix;
    Selection selection;
};

/**
 * Runs variance filter, z-score, Welch t-test (keep p < p_cut), fold change
 * on raw values, then BH over the p-values of fold-change survivors
 * (keep p_adjusted <= fdr_q). Throws DataError if nothing survives.
 */
SelectionResult select_features(const ingest::FeatureMatrix& matrix, std::span<const int> labels,
                                const Thresholds& thresholds);

}  // namespace mofuse::featsel

#endif
