#ifndef MOFUSE_ARTIFACTS_HPP
#define MOFUSE_ARTIFACTS_HPP

#include "mofuse/autoencoder.hpp"
#include "mofuse/classifier.hpp"
#include "mofuse/gan.hpp"
#include "mofuse/nn/layer.hpp"

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

/**
 * @file artifacts.hpp
 *
 * @brief Versioned text containers for stage outputs.
 *
 * Every artifact starts with `#mofuse<TAB><type><TAB><version>`, followed by
 * optional `#<key><TAB><value>` metadata lines. Checkpoints then hold
 * `vector` and `layer` records; tables hold a header row and data rows.
 * Numbers use the shortest round-trip decimal form, so a write/read cycle
 * reproduces every double exactly.
 */

namespace mofuse::artifacts {

inline constexpr int format_version = 1;

using Meta = std::map<std::string, std::string>;

std::string header_line(std::string_view type, const Meta& meta);

/// Parses and checks the header; throws VersionError on a foreign type or version.
Meta check_header(const std::vector<std::string>& lines, std::size_t& cursor, std::string_view type,
                  std::string_view source);

class CheckpointWriter {
public:
    explicit CheckpointWriter(std::string type) : type_(std::move(type)) {}

    void meta(const std::string& key, const std::string& value) { meta_[key] = value; }
    void vector(const std::string& name, std::span<const double> values);
    void layer(const std::string& name, const nn::DenseLayer& layer);

    std::string str() const;

private:
    std::string type_;
    Meta meta_;
    std::string body_;
};

class CheckpointReader {
public:
    CheckpointReader(std::string_view text, std::string_view type, std::string_view source);

    const std::string& meta(const std::string& key) const;
    const std::vector<double>& vector(const std::string& name) const;
    const nn::DenseLayer& layer(const std::string& name) const;

private:
    std::string source_;
    Meta meta_;
    std::map<std::string, std::vector<double>> vectors_;
    std::map<std::string, nn::DenseLayer> layers_;
};

std::string save_autoencoder(const ae::AutoencoderModel& model, const std::string& kind);
ae::AutoencoderModel load_autoencoder(std::string_view text, std::string_view source);

std::string save_gan(const gan::GanModel& model, const gan::LatentNormalizer& normalizer);
std::pair<gan::GanModel, gan::LatentNormalizer> load_gan(std::string_view text, std::string_view source);

std::string save_classifier(const clf::ClassifierModel& model);
clf::ClassifierModel load_classifier(std::string_view text, std::string_view source);

/// Table artifact: string key columns followed by numeric value columns.
struct Table {
    Meta meta;
    std::vector<std::string> key_columns;
    std::vector<std::string> value_columns;
    std::vector<std::vector<std::string>> keys;
    nn::Matrix values;
};

std::string format_table(std::string_view type, const Table& table);
Table parse_table(std::string_view text, std::string_view type, std::size_t key_count, std::string_view source);

}  // namespace mofuse::artifacts

#endif
