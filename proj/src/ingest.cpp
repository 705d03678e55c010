#include "mofuse/ingest.hpp"

#include "mofuse/error.hpp"
#include "mofuse/tsv.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace mofuse::ingest {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    while (!lines.empty() && tsv::trim(lines.back()).empty()) {
        lines.pop_back();
    }
    return lines;
}

void require_unique(const std::vector<std::string>& ids, const std::string& what, std::string_view source) {
    std::unordered_set<std::string> seen;
    for (const auto& id : ids) {
        if (!seen.insert(id).second) {
            throw DataError(std::string(source) + ": duplicate " + what + " '" + id + "'");
        }
    }
}

}  // namespace

std::size_t LabelVector::count(int label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

bool is_missing_token(std::string_view cell) {
    cell = tsv::trim(cell);
    return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == "na";
}

FeatureMatrix parse_matrix(std::string_view text, std::string kind, Orientation orientation, LoadReport* report,
                           std::string_view source) {
    const auto lines = split_lines(text);
    if (lines.empty()) {
        throw DataError(std::string(source) + ": empty matrix file");
    }
    const auto header = tsv::split(lines.front());
    if (header.size() < 2) {
        throw DataError(std::string(source) + ": header row has no identifiers");
    }
    std::vector<std::string> col_ids;
    for (std::size_t c = 1; c < header.size(); ++c) {
        col_ids.emplace_back(tsv::trim(header[c]));
    }
    std::vector<std::string> row_ids;
    // Parsed values in file layout; NaN marks missing cells.
    std::vector<double> cells;
    cells.reserve((lines.size() - 1) * col_ids.size());
    for (std::size_t r = 1; r < lines.size(); ++r) {
        if (tsv::trim(lines[r]).empty()) {
            continue;
        }
        auto parts = tsv::split(lines[r]);
        if (parts.size() != header.size()) {
            throw DataError(std::string(source) + ": line " + std::to_string(r + 1) + " has " +
                            std::to_string(parts.size()) + " fields, header has " + std::to_string(header.size()));
        }
        row_ids.emplace_back(tsv::trim(parts[0]));
        for (std::size_t c = 1; c < parts.size(); ++c) {
            if (is_missing_token(parts[c])) {
                cells.push_back(std::nan(""));
                continue;
            }
            auto v = tsv::parse_double(parts[c]);
            if (!v || std::isinf(*v)) {
                throw DataError(std::string(source) + ": non-numeric cell '" + parts[c] + "' at line " +
                                std::to_string(r + 1) + ", column " + std::to_string(c + 1));
            }
            cells.push_back(std::isnan(*v) ? std::nan("") : *v);
        }
    }
    if (row_ids.empty()) {
        throw DataError(std::string(source) + ": matrix has a header but no data rows");
    }

    const bool features_in_rows = orientation == Orientation::FeaturesInRows;
    auto& feature_ids = features_in_rows ? row_ids : col_ids;
    auto& sample_ids = features_in_rows ? col_ids : row_ids;
    require_unique(feature_ids, features_in_rows ? "feature (row)" : "feature (column)", source);
    require_unique(sample_ids, "sample ID", source);

    const std::size_t ns = sample_ids.size();
    const std::size_t nf = feature_ids.size();
    const std::size_t file_cols = col_ids.size();
    auto at = [&](std::size_t s, std::size_t f) -> double {
        return features_in_rows ? cells[f * file_cols + s] : cells[s * file_cols + f];
    };

    std::vector<std::size_t> keep;
    std::vector<double> fill(nf, 0.0);
    LoadReport local;
    for (std::size_t f = 0; f < nf; ++f) {
        std::size_t missing = 0;
        double sum = 0.0;
        for (std::size_t s = 0; s < ns; ++s) {
            const double v = at(s, f);
            if (std::isnan(v)) {
                ++missing;
            } else {
                sum += v;
            }
        }
        if (static_cast<double>(missing) > max_missing_fraction * static_cast<double>(ns) || missing == ns) {
            local.dropped_features.push_back(feature_ids[f]);
            continue;
        }
        fill[f] = sum / static_cast<double>(ns - missing);
        local.imputed_cells += missing;
        keep.push_back(f);
    }

    FeatureMatrix out;
    out.kind = std::move(kind);
    out.sample_ids = sample_ids;
    out.values = nn::Matrix(ns, keep.size());
    for (std::size_t j = 0; j < keep.size(); ++j) {
        out.feature_names.push_back(feature_ids[keep[j]]);
        for (std::size_t s = 0; s < ns; ++s) {
            const double v = at(s, keep[j]);
            out.values(s, j) = std::isnan(v) ? fill[keep[j]] : v;
        }
    }
    if (report) {
        *report = std::move(local);
    }
    return out;
}

FeatureMatrix load_matrix(const std::filesystem::path& path, std::string kind, Orientation orientation,
                          LoadReport* report) {
    const auto text = tsv::read_file(path);
    return parse_matrix(text, std::move(kind), orientation, report, path.string());
}

std::string format_matrix(const FeatureMatrix& matrix, Orientation orientation) {
    std::string out;
    const bool features_in_rows = orientation == Orientation::FeaturesInRows;
    out += features_in_rows ? "feature" : "sample";
    const auto& header_ids = features_in_rows ? matrix.sample_ids : matrix.feature_names;
    for (const auto& id : header_ids) {
        out += '\t';
        out += id;
    }
    out += '\n';
    if (features_in_rows) {
        for (std::size_t f = 0; f < matrix.features(); ++f) {
            out += matrix.feature_names[f];
            for (std::size_t s = 0; s < matrix.samples(); ++s) {
                out += '\t';
                out += tsv::format_double(matrix.values(s, f));
            }
            out += '\n';
        }
    } else {
        for (std::size_t s = 0; s < matrix.samples(); ++s) {
            out += matrix.sample_ids[s];
            for (std::size_t f = 0; f < matrix.features(); ++f) {
                out += '\t';
                out += tsv::format_double(matrix.values(s, f));
            }
            out += '\n';
        }
    }
    return out;
}

void write_matrix(const std::filesystem::path& path, const FeatureMatrix& matrix, Orientation orientation) {
    tsv::write_file(path, format_matrix(matrix, orientation));
}

LabelVector parse_labels(std::string_view text, const std::optional<std::string>& positive_class,
                         std::string_view source) {
    const auto lines = split_lines(text);
    if (lines.size() < 2) {
        throw DataError(std::string(source) + ": label file needs a header and at least one row");
    }
    std::vector<std::string> ids;
    std::vector<std::string> raw;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (tsv::trim(lines[i]).empty()) continue;
        auto parts = tsv::split(lines[i]);
        if (parts.size() != 2) {
            throw DataError(std::string(source) + ": line " + std::to_string(i + 1) +
                            " must have exactly two tab-separated fields");
        }
        ids.emplace_back(tsv::trim(parts[0]));
        raw.emplace_back(tsv::trim(parts[1]));
    }
    require_unique(ids, "sample ID", source);

    std::map<std::string, std::size_t> counts;
    for (const auto& r : raw) ++counts[r];
    if (counts.size() != 2) {
        throw DataError(std::string(source) + ": expected exactly two label values, found " +
                        std::to_string(counts.size()));
    }

    std::string positive;
    if (counts.contains("0") && counts.contains("1")) {
        positive = "1";
        if (positive_class && *positive_class != "1") {
            throw ConfigError(std::string(source) + ": numeric labels use 1 as the positive class");
        }
    } else if (positive_class) {
        if (!counts.contains(*positive_class)) {
            throw ConfigError(std::string(source) + ": positive class '" + *positive_class + "' not present");
        }
        positive = *positive_class;
    } else {
        const auto& [a, na] = *counts.begin();
        const auto& [b, nb] = *counts.rbegin();
        positive = na < nb ? a : b;
    }

    LabelVector out;
    out.sample_ids = std::move(ids);
    out.positive_class_name = positive;
    out.labels.reserve(raw.size());
    for (const auto& r : raw) {
        out.labels.push_back(r == positive ? 1 : 0);
    }
    return out;
}

LabelVector load_labels(const std::filesystem::path& path, const std::optional<std::string>& positive_class) {
    return parse_labels(tsv::read_file(path), positive_class, path.string());
}

std::vector<std::string> parse_gene_list(std::string_view text, std::string_view source) {
    std::vector<std::string> genes;
    for (auto line : split_lines(text)) {
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = tsv::trim(line);
        if (!line.empty()) {
            genes.emplace_back(line);
        }
    }
    if (genes.empty()) {
        throw DataError(std::string(source) + ": gene list is empty");
    }
    return genes;
}

std::vector<std::string> load_gene_list(const std::filesystem::path& path) {
    return parse_gene_list(tsv::read_file(path), path.string());
}

Aligned align_samples(const std::vector<FeatureMatrix>& matrices, const LabelVector& labels) {
    if (matrices.empty()) {
        throw DataError("align_samples: no matrices given");
    }
    std::set<std::string> common(labels.sample_ids.begin(), labels.sample_ids.end());
    for (const auto& m : matrices) {
        std::set<std::string> ids(m.sample_ids.begin(), m.sample_ids.end());
        std::set<std::string> next;
        std::set_intersection(common.begin(), common.end(), ids.begin(), ids.end(),
                              std::inserter(next, next.end()));
        common = std::move(next);
    }
    if (common.empty()) {
        throw DataError("align_samples: matrices and labels share no sample IDs");
    }

    auto index_of = [](const std::vector<std::string>& ids) {
        std::unordered_map<std::string, std::size_t> idx;
        for (std::size_t i = 0; i < ids.size(); ++i) idx.emplace(ids[i], i);
        return idx;
    };

    Aligned out;
    const auto label_idx = index_of(labels.sample_ids);
    out.labels.positive_class_name = labels.positive_class_name;
    for (const auto& id : common) {
        out.labels.sample_ids.push_back(id);
        out.labels.labels.push_back(labels.labels[label_idx.at(id)]);
    }
    if (out.labels.count(0) == 0 || out.labels.count(1) == 0) {
        throw DataError("align_samples: the " + std::to_string(common.size()) +
                        " shared samples contain only one class");
    }
    for (const auto& m : matrices) {
        const auto idx = index_of(m.sample_ids);
        std::vector<std::size_t> rows;
        rows.reserve(common.size());
        for (const auto& id : common) rows.push_back(idx.at(id));
        out.matrices.push_back(subset_samples(m, rows));
    }
    return out;
}

bool is_gene_symbol(std::string_view name) {
    if (name.empty() || !(name.front() >= 'A' && name.front() <= 'Z')) {
        return false;
    }
    if (name.back() == '@') {
        name.remove_suffix(1);
    }
    for (char ch : name) {
        const bool ok = (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '-';
        if (!ok) return false;
    }
    return true;
}

SymbolCheck validate_gene_symbols(const FeatureMatrix& matrix) {
    SymbolCheck out;
    std::vector<std::size_t> keep;
    for (std::size_t f = 0; f < matrix.features(); ++f) {
        if (is_gene_symbol(matrix.feature_names[f])) {
            keep.push_back(f);
        } else {
            out.rejected.push_back(matrix.feature_names[f]);
        }
    }
    out.kept = subset_features(matrix, keep);
    return out;
}

FeatureMatrix restrict_to_gene_list(const FeatureMatrix& matrix, const std::vector<std::string>& genes) {
    std::unordered_map<std::string, std::size_t> idx;
    for (std::size_t f = 0; f < matrix.features(); ++f) idx.emplace(matrix.feature_names[f], f);
    std::vector<std::size_t> cols;
    std::unordered_set<std::string> used;
    for (const auto& g : genes) {
        auto it = idx.find(g);
        if (it != idx.end() && used.insert(g).second) {
            cols.push_back(it->second);
        }
    }
    if (cols.empty()) {
        throw DataError("restrict_to_gene_list: none of the " + std::to_string(genes.size()) +
                        " listed genes occur in the " + matrix.kind + " matrix");
    }
    return subset_features(matrix, cols);
}

FeatureMatrix subset_samples(const FeatureMatrix& matrix, std::span<const std::size_t> rows) {
    FeatureMatrix out;
    out.kind = matrix.kind;
    out.feature_names = matrix.feature_names;
    for (auto r : rows) out.sample_ids.push_back(matrix.sample_ids.at(r));
    out.values = nn::select_rows(matrix.values, rows);
    return out;
}

FeatureMatrix subset_features(const FeatureMatrix& matrix, std::span<const std::size_t> cols) {
    FeatureMatrix out;
    out.kind = matrix.kind;
    out.sample_ids = matrix.sample_ids;
    for (auto c : cols) out.feature_names.push_back(matrix.feature_names.at(c));
    out.values = nn::select_cols(matrix.values, cols);
    return out;
}

}  // namespace mofuse::ingest
