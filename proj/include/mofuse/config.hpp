#ifndef MOFUSE_CONFIG_HPP
#define MOFUSE_CONFIG_HPP

#include "mofuse/autoencoder.hpp"
#include "mofuse/classifier.hpp"
#include "mofuse/featsel.hpp"
#include "mofuse/gan.hpp"
#include "mofuse/ingest.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mofuse::pipeline {

struct MatrixSpec {
    /// Section suffix; names artifact files, so limited to [A-Za-z0-9_-].
    std::string name;
    std::filesystem::path path;
    std::string kind;
    ingest::Orientation orientation = ingest::Orientation::FeaturesInRows;
    std::size_t latent_dim = 64;
    std::optional<std::filesystem::path> gene_list;
    bool validate_symbols = false;
};

/**
 * Everything a run needs. Parsed from an INI file:
 *
 *     [data]
 *     labels = labels.tsv
 *     positive_class = Relapse        ; optional
 *
 *     [matrix:expression]             ; one section per matrix, in fusion order
 *     path = expression.tsv
 *     kind = expression               ; defaults to the section suffix
 *     orientation = features_in_rows  ; or samples_in_rows
 *     latent_dim = 64
 *     gene_list = genes.txt           ; optional
 *     validate_symbols = true
 *
 *     [selection] [autoencoder] [gan] [classifier] [run]
 *
 * Relative paths resolve against the config file's directory. Every other
 * key has a default, so a minimal file only lists paths.
 */
struct PipelineConfig {
    std::vector<MatrixSpec> matrices;
    std::filesystem::path labels;
    std::optional<std::string> positive_class;
    featsel::Thresholds thresholds;
    ae::TrainOptions autoencoder;
    bool gan_enabled = true;
    gan::GanConfig gan;
    clf::ClassifierConfig classifier;
    double split = 0.8;
    std::uint64_t seed = 42;
    std::filesystem::path out = "mofuse-out";
};

PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir,
                            std::string_view source = "<memory>");

PipelineConfig load_config(const std::filesystem::path& path);

/// Range checks plus existence of every referenced input file. Throws ConfigError.
void validate_config(const PipelineConfig& config);

/**
 * Fully resolved INI rendering (absolute paths, every default spelled out,
 * output directory omitted). Parsing it back yields the same configuration.
 */
std::string canonical_config(const PipelineConfig& config);

/// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

/// Hash of the canonical rendering with the seed zeroed; (hash, seed) identifies a run.
std::string config_hash(const PipelineConfig& config);

}  // namespace mofuse::pipeline

#endif
