#include "mofuse/artifacts.hpp"

#include "mofuse/error.hpp"
#include "mofuse/tsv.hpp"

#include <sstream>

namespace mofuse::artifacts {

namespace {

constexpr std::string_view magic = "#mofuse";

std::vector<std::string> lines_of(std::string_view text) {
    std::vector<std::string> lines;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    return lines;
}

std::vector<double> parse_numbers(const std::vector<std::string>& cells, std::size_t from, std::string_view source,
                                  std::size_t line_no) {
    std::vector<double> out;
    out.reserve(cells.size() - std::min(from, cells.size()));
    for (std::size_t i = from; i < cells.size(); ++i) {
        auto v = tsv::parse_double(cells[i]);
        if (!v) {
            throw DataError(std::string(source) + ": bad number '" + cells[i] + "' on line " +
                            std::to_string(line_no));
        }
        out.push_back(*v);
    }
    return out;
}

std::string numbers_line(std::string_view tag, std::span<const double> values) {
    std::string out(tag);
    for (double v : values) {
        out += '\t';
        out += tsv::format_double(v);
    }
    out += '\n';
    return out;
}

std::size_t parse_count(const std::string& cell, std::string_view source) {
    try {
        std::size_t pos = 0;
        const auto v = std::stoull(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument(cell);
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw DataError(std::string(source) + ": expected a count, got '" + cell + "'");
    }
}

}  // namespace

std::string header_line(std::string_view type, const Meta& meta) {
    std::string out = std::string(magic) + '\t' + std::string(type) + '\t' + std::to_string(format_version) + '\n';
    for (const auto& [k, v] : meta) {
        out += '#' + k + '\t' + v + '\n';
    }
    return out;
}

Meta check_header(const std::vector<std::string>& lines, std::size_t& cursor, std::string_view type,
                  std::string_view source) {
    if (lines.empty()) {
        throw DataError(std::string(source) + ": empty artifact");
    }
    const auto head = tsv::split(lines[0]);
    if (head.size() != 3 || head[0] != magic) {
        throw VersionError(std::string(source) + ": not a mofuse artifact (missing '#mofuse' header)");
    }
    if (head[1] != type) {
        throw VersionError(std::string(source) + ": artifact type '" + head[1] + "', expected '" +
                           std::string(type) + "'");
    }
    if (head[2] != std::to_string(format_version)) {
        throw VersionError(std::string(source) + ": artifact version '" + head[2] + "', this build reads version " +
                           std::to_string(format_version));
    }
    Meta meta;
    cursor = 1;
    while (cursor < lines.size() && !lines[cursor].empty() && lines[cursor][0] == '#') {
        const auto kv = tsv::split(std::string_view(lines[cursor]).substr(1));
        if (kv.size() != 2) {
            throw DataError(std::string(source) + ": malformed metadata line " + std::to_string(cursor + 1));
        }
        meta[kv[0]] = kv[1];
        ++cursor;
    }
    return meta;
}

void CheckpointWriter::vector(const std::string& name, std::span<const double> values) {
    body_ += "vector\t" + name + '\t' + std::to_string(values.size()) + '\n';
    body_ += numbers_line("v", values);
}

void CheckpointWriter::layer(const std::string& name, const nn::DenseLayer& layer) {
    body_ += "layer\t" + name + '\t' + std::string(nn::to_string(layer.activation)) + '\t' +
             std::to_string(layer.outputs()) + '\t' + std::to_string(layer.inputs()) + '\n';
    for (std::size_t o = 0; o < layer.outputs(); ++o) {
        body_ += numbers_line("w", layer.weights.row(o));
    }
    body_ += numbers_line("b", layer.biases);
}

std::string CheckpointWriter::str() const {
    return header_line(type_, meta_) + body_;
}

CheckpointReader::CheckpointReader(std::string_view text, std::string_view type, std::string_view source)
    : source_(source) {
    const auto lines = lines_of(text);
    std::size_t i = 0;
    meta_ = check_header(lines, i, type, source);
    auto expect_row = [&](std::string_view tag, std::size_t width) {
        if (i >= lines.size()) {
            throw DataError(source_ + ": truncated checkpoint");
        }
        const auto cells = tsv::split(lines[i]);
        if (cells.empty() || cells[0] != tag || cells.size() != width + 1) {
            throw DataError(source_ + ": malformed '" + std::string(tag) + "' record on line " +
                            std::to_string(i + 1));
        }
        auto values = parse_numbers(cells, 1, source_, i + 1);
        ++i;
        return values;
    };
    while (i < lines.size()) {
        if (lines[i].empty()) {
            ++i;
            continue;
        }
        const auto cells = tsv::split(lines[i]);
        if (cells[0] == "vector" && cells.size() == 3) {
            const auto n = parse_count(cells[2], source_);
            ++i;
            vectors_[cells[1]] = expect_row("v", n);
        } else if (cells[0] == "layer" && cells.size() == 5) {
            const auto act = nn::parse_activation(cells[2]);
            if (!act) {
                throw DataError(source_ + ": unknown activation '" + cells[2] + "'");
            }
            const auto out = parse_count(cells[3], source_);
            const auto in = parse_count(cells[4], source_);
            ++i;
            std::vector<double> w;
            w.reserve(out * in);
            for (std::size_t o = 0; o < out; ++o) {
                auto row = expect_row("w", in);
                w.insert(w.end(), row.begin(), row.end());
            }
            auto b = expect_row("b", out);
            layers_[cells[1]] = nn::DenseLayer(nn::Matrix(out, in, std::move(w)), std::move(b), *act);
        } else {
            throw DataError(source_ + ": unexpected record on line " + std::to_string(i + 1));
        }
    }
}

const std::string& CheckpointReader::meta(const std::string& key) const {
    auto it = meta_.find(key);
    if (it == meta_.end()) throw DataError(source_ + ": missing metadata '" + key + "'");
    return it->second;
}

const std::vector<double>& CheckpointReader::vector(const std::string& name) const {
    auto it = vectors_.find(name);
    if (it == vectors_.end()) throw DataError(source_ + ": missing vector '" + name + "'");
    return it->second;
}

const nn::DenseLayer& CheckpointReader::layer(const std::string& name) const {
    auto it = layers_.find(name);
    if (it == layers_.end()) throw DataError(source_ + ": missing layer '" + name + "'");
    return it->second;
}

std::string save_autoencoder(const ae::AutoencoderModel& model, const std::string& kind) {
    CheckpointWriter w("autoencoder");
    w.meta("kind", kind);
    w.vector("scaler.min", model.scaler.min);
    w.vector("scaler.max", model.scaler.max);
    w.layer("encoder", model.encoder);
    w.layer("decoder", model.decoder);
    return w.str();
}

ae::AutoencoderModel load_autoencoder(std::string_view text, std::string_view source) {
    CheckpointReader r(text, "autoencoder", source);
    ae::AutoencoderModel m;
    m.scaler.min = r.vector("scaler.min");
    m.scaler.max = r.vector("scaler.max");
    m.encoder = r.layer("encoder");
    m.decoder = r.layer("decoder");
    if (m.encoder.outputs() != m.decoder.inputs() || m.decoder.outputs() != m.encoder.inputs() ||
        (m.scaler.width() != 0 && m.scaler.width() != m.encoder.inputs()) ||
        m.scaler.min.size() != m.scaler.max.size()) {
        throw DataError(std::string(source) + ": inconsistent autoencoder shapes");
    }
    return m;
}

std::string save_gan(const gan::GanModel& model, const gan::LatentNormalizer& normalizer) {
    CheckpointWriter w("gan");
    w.meta("noise_dim", std::to_string(model.noise_dim));
    w.vector("normalizer.min", normalizer.min);
    w.vector("normalizer.max", normalizer.max);
    for (std::size_t i = 0; i < model.generator.size(); ++i) {
        w.layer("generator." + std::to_string(i), model.generator[i]);
    }
    for (std::size_t i = 0; i < model.discriminator.size(); ++i) {
        w.layer("discriminator." + std::to_string(i), model.discriminator[i]);
    }
    return w.str();
}

std::pair<gan::GanModel, gan::LatentNormalizer> load_gan(std::string_view text, std::string_view source) {
    CheckpointReader r(text, "gan", source);
    gan::GanModel m;
    m.noise_dim = parse_count(r.meta("noise_dim"), source);
    m.generator = {r.layer("generator.0"), r.layer("generator.1")};
    m.discriminator = {r.layer("discriminator.0"), r.layer("discriminator.1")};
    gan::LatentNormalizer norm;
    norm.min = r.vector("normalizer.min");
    norm.max = r.vector("normalizer.max");
    if (m.generator[0].inputs() != m.noise_dim || m.generator[1].outputs() != m.discriminator[0].inputs() ||
        norm.width() != m.generator[1].outputs() || norm.min.size() != norm.max.size()) {
        throw DataError(std::string(source) + ": inconsistent GAN shapes");
    }
    return {std::move(m), std::move(norm)};
}

std::string save_classifier(const clf::ClassifierModel& model) {
    CheckpointWriter w("classifier");
    w.meta("threshold", tsv::format_double(model.threshold));
    for (std::size_t i = 0; i < model.net.size(); ++i) {
        w.layer("layer." + std::to_string(i), model.net[i]);
    }
    return w.str();
}

clf::ClassifierModel load_classifier(std::string_view text, std::string_view source) {
    CheckpointReader r(text, "classifier", source);
    clf::ClassifierModel m;
    auto threshold = tsv::parse_double(r.meta("threshold"));
    if (!threshold) throw DataError(std::string(source) + ": bad threshold");
    m.threshold = *threshold;
    m.net = {r.layer("layer.0"), r.layer("layer.1")};
    if (m.net[0].outputs() != m.net[1].inputs() || m.net[1].outputs() != 1) {
        throw DataError(std::string(source) + ": inconsistent classifier shapes");
    }
    return m;
}

std::string format_table(std::string_view type, const Table& table) {
    std::string out = header_line(type, table.meta);
    std::vector<std::string> header = table.key_columns;
    header.insert(header.end(), table.value_columns.begin(), table.value_columns.end());
    out += tsv::join(header) + '\n';
    for (std::size_t r = 0; r < table.keys.size(); ++r) {
        out += tsv::join(table.keys[r]);
        for (double v : table.values.row(r)) {
            out += '\t';
            out += tsv::format_double(v);
        }
        out += '\n';
    }
    return out;
}

Table parse_table(std::string_view text, std::string_view type, std::size_t key_count, std::string_view source) {
    const auto lines = lines_of(text);
    std::size_t i = 0;
    Table t;
    t.meta = check_header(lines, i, type, source);
    if (i >= lines.size()) {
        throw DataError(std::string(source) + ": table has no header row");
    }
    const auto header = tsv::split(lines[i++]);
    if (header.size() < key_count) {
        throw DataError(std::string(source) + ": table header too short");
    }
    t.key_columns.assign(header.begin(), header.begin() + static_cast<std::ptrdiff_t>(key_count));
    t.value_columns.assign(header.begin() + static_cast<std::ptrdiff_t>(key_count), header.end());
    std::vector<double> values;
    for (; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto cells = tsv::split(lines[i]);
        if (cells.size() != header.size()) {
            throw DataError(std::string(source) + ": line " + std::to_string(i + 1) + " has " +
                            std::to_string(cells.size()) + " fields, expected " + std::to_string(header.size()));
        }
        t.keys.emplace_back(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(key_count));
        auto nums = parse_numbers(cells, key_count, source, i + 1);
        values.insert(values.end(), nums.begin(), nums.end());
    }
    t.values = nn::Matrix(t.keys.size(), t.value_columns.size(), std::move(values));
    return t;
}

}  // namespace mofuse::artifacts
