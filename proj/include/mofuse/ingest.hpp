#ifndef MOFUSE_INGEST_HPP
#define MOFUSE_INGEST_HPP

#include "mofuse/nn/matrix.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mofuse::ingest {

/**
 * One measurement modality as a samples x features table.
 */
struct FeatureMatrix {
    /// Modality tag, e.g. "expression", "methylation", "copy-number".
    std::string kind;
    std::vector<std::string> sample_ids;
    std::vector<std::string> feature_names;
    nn::Matrix values;

    std::size_t samples() const noexcept { return sample_ids.size(); }
    std::size_t features() const noexcept { return feature_names.size(); }

    bool operator==(const FeatureMatrix&) const = default;
};

struct LabelVector {
    std::vector<std::string> sample_ids;
    /// 1 marks the positive class.
    std::vector<int> labels;
    std::string positive_class_name;

    std::size_t count(int label) const;
};

enum class Orientation {
    /// First column holds feature names, header row holds sample IDs (cBioPortal layout).
    FeaturesInRows,
    /// First column holds sample IDs, header row holds feature names.
    SamplesInRows
};

struct LoadReport {
    std::vector<std::string> dropped_features;
    std::size_t imputed_cells = 0;
};

/// Share of missing samples above which a feature is dropped instead of imputed.
inline constexpr double max_missing_fraction = 0.2;

bool is_missing_token(std::string_view cell);

/**
 * Parses a tab-separated matrix.
 *
 * Cells that are empty, "NA" or "NaN" are missing. A feature missing in
 * more than 20% of samples is dropped; otherwise its missing cells take the
 * mean of the observed ones.
 */
FeatureMatrix parse_matrix(std::string_view text, std::string kind, Orientation orientation,
                           LoadReport* report = nullptr, std::string_view source = "<memory>");

FeatureMatrix load_matrix(const std::filesystem::path& path, std::string kind, Orientation orientation,
                          LoadReport* report = nullptr);

/// Inverse of `parse_matrix` for complete matrices; numbers round-trip exactly.
std::string format_matrix(const FeatureMatrix& matrix, Orientation orientation);

void write_matrix(const std::filesystem::path& path, const FeatureMatrix& matrix, Orientation orientation);

/**
 * Label file: header line, then `sample_id<TAB>label` rows. Labels are either
 * 0/1, or two arbitrary names. With names, `positive_class` picks the
 * positive one; without it the rarer name is positive (ties go to the
 * lexicographically larger name).
 */
LabelVector parse_labels(std::string_view text, const std::optional<std::string>& positive_class = std::nullopt,
                         std::string_view source = "<memory>");

LabelVector load_labels(const std::filesystem::path& path,
                        const std::optional<std::string>& positive_class = std::nullopt);

/// One symbol per line; blank lines and `#` comments are skipped.
std::vector<std::string> parse_gene_list(std::string_view text, std::string_view source = "<memory>");
std::vector<std::string> load_gene_list(const std::filesystem::path& path);

struct Aligned {
    std::vector<FeatureMatrix> matrices;
    LabelVector labels;
};

/**
 * Restricts every matrix and the labels to the shared sample IDs, in
 * lexicographic order, so the result does not depend on input row order.
 */
Aligned align_samples(const std::vector<FeatureMatrix>& matrices, const LabelVector& labels);

/// Uppercase letter, then uppercase letters, digits or hyphens, then an optional '@'.
bool is_gene_symbol(std::string_view name);

struct SymbolCheck {
    FeatureMatrix kept;
    std::vector<std::string> rejected;
};

SymbolCheck validate_gene_symbols(const FeatureMatrix& matrix);

/// Keeps listed features in list order; unlisted features are dropped and absent genes skipped.
FeatureMatrix restrict_to_gene_list(const FeatureMatrix& matrix, const std::vector<std::string>& genes);

FeatureMatrix subset_samples(const FeatureMatrix& matrix, std::span<const std::size_t> rows);
FeatureMatrix subset_features(const FeatureMatrix& matrix, std::span<const std::size_t> cols);

}  // namespace mofuse::ingest

#endif
