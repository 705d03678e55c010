#include "mofuse/config.hpp"

#include "mofuse/error.hpp"
#include "mofuse/tsv.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace mofuse::pipeline {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

std::string strip_inline_comment(std::string value) {
    for (std::size_t i = 1; i < value.size(); ++i) {
        if (value[i] == ';' && (value[i - 1] == ' ' || value[i - 1] == '\t')) {
            value.resize(i);
            break;
        }
    }
    return std::string(tsv::trim(value));
}

/// Typed access to one section that remembers which keys were consumed.
class Section {
public:
    Section(std::string name, const pt::ptree& tree, std::string source)
        : name_(std::move(name)), source_(std::move(source)) {
        for (const auto& [key, child] : tree) {
            values_[key] = strip_inline_comment(child.data());
        }
    }

    std::optional<std::string> text(const std::string& key) {
        used_.insert(key);
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    void read(const std::string& key, std::string& out) {
        if (auto v = text(key)) out = *v;
    }

    void read(const std::string& key, double& out) {
        if (auto v = text(key)) {
            auto d = tsv::parse_double(*v);
            if (!d) fail(key, *v, "a number");
            out = *d;
        }
    }

    void read(const std::string& key, std::size_t& out) {
        if (auto v = text(key)) out = static_cast<std::size_t>(parse_unsigned(key, *v));
    }

    void read(const std::string& key, bool& out) {
        if (auto v = text(key)) {
            if (*v == "true" || *v == "yes" || *v == "1") out = true;
            else if (*v == "false" || *v == "no" || *v == "0") out = false;
            else fail(key, *v, "true or false");
        }
    }

    void finish() const {
        for (const auto& [key, value] : values_) {
            if (!used_.contains(key)) {
                throw ConfigError(source_ + ": unknown key '" + key + "' in section [" + name_ + "]");
            }
        }
    }

private:
    std::uint64_t parse_unsigned(const std::string& key, const std::string& v) {
        try {
            std::size_t pos = 0;
            if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
            const auto n = std::stoull(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return n;
        } catch (const std::exception&) {
            fail(key, v, "a non-negative integer");
        }
    }

    [[noreturn]] void fail(const std::string& key, const std::string& v, const char* expected) const {
        throw ConfigError(source_ + ": [" + name_ + "] " + key + " = '" + v + "' is not " + expected);
    }

    std::string name_;
    std::string source_;
    std::map<std::string, std::string> values_;
    std::set<std::string> used_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    if (path.is_relative()) path = base / path;
    return path.lexically_normal();
}

bool valid_name(const std::string& name) {
    if (name.empty()) return false;
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                        c == '-';
        if (!ok) return false;
    }
    return true;
}

std::string orientation_name(ingest::Orientation o) {
    return o == ingest::Orientation::FeaturesInRows ? "features_in_rows" : "samples_in_rows";
}

}  // namespace

PipelineConfig parse_config(std::string_view text, const fs::path& base_dir, std::string_view source) {
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string(source) + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }

    const std::string src(source);
    PipelineConfig cfg;
    // Data-file sections share the default latent width, which may appear later in the file.
    std::vector<std::pair<std::string, const pt::ptree*>> matrix_sections;
    bool have_data = false;
    for (const auto& [name, section] : tree) {
        if (section.empty() && !section.data().empty()) {
            throw ConfigError(src + ": key '" + name + "' outside of any section");
        }
        if (name.rfind("matrix:", 0) == 0) {
            matrix_sections.emplace_back(name.substr(7), &section);
            continue;
        }
        Section s(name, section, src);
        if (name == "data") {
            have_data = true;
            std::string labels;
            s.read("labels", labels);
            if (labels.empty()) throw ConfigError(src + ": [data] labels is required");
            cfg.labels = resolve(base_dir, labels);
            if (auto pc = s.text("positive_class")) cfg.positive_class = *pc;
        } else if (name == "selection") {
            auto& t = cfg.thresholds;
            s.read("min_variance", t.min_variance);
            s.read("p_cut", t.p_cut);
            s.read("fdr_q", t.fdr_q);
            s.read("abs_log2fc_min", t.abs_log2fc_min);
            s.read("variance_filter", t.variance_filter);
            s.read("t_test", t.t_test);
            s.read("fold_change", t.fold_change);
            s.read("fdr", t.fdr);
        } else if (name == "autoencoder") {
            auto& a = cfg.autoencoder;
            s.read("latent_dim", a.latent_dim);
            s.read("epochs", a.epochs);
            s.read("batch_size", a.batch_size);
            s.read("learning_rate", a.learning_rate);
        } else if (name == "gan") {
            auto& g = cfg.gan;
            s.read("enabled", cfg.gan_enabled);
            s.read("noise_dim", g.noise_dim);
            s.read("hidden", g.hidden);
            s.read("steps", g.steps);
            s.read("batch_size", g.batch_size);
            s.read("d_steps", g.d_steps_per_g_step);
            s.read("learning_rate", g.learning_rate);
        } else if (name == "classifier") {
            auto& c = cfg.classifier;
            s.read("hidden", c.hidden);
            s.read("epochs", c.epochs);
            s.read("batch_size", c.batch_size);
            s.read("validation_split", c.validation_split);
            s.read("learning_rate", c.learning_rate);
            s.read("threshold", c.threshold);
        } else if (name == "run") {
            s.read("split", cfg.split);
            s.read("seed", cfg.seed);
            if (auto out = s.text("out")) cfg.out = resolve(base_dir, *out);
        } else {
            throw ConfigError(src + ": unknown section [" + name + "]");
        }
        s.finish();
    }
    if (!have_data) {
        throw ConfigError(src + ": missing [data] section");
    }

    std::set<std::string> names;
    for (const auto& [mname, section] : matrix_sections) {
        if (!valid_name(mname)) {
            throw ConfigError(src + ": matrix name '" + mname + "' must use only letters, digits, '_' or '-'");
        }
        if (!names.insert(mname).second) {
            throw ConfigError(src + ": duplicate matrix section '" + mname + "'");
        }
        Section s("matrix:" + mname, *section, src);
        MatrixSpec m;
        m.name = mname;
        m.kind = mname;
        m.latent_dim = cfg.autoencoder.latent_dim;
        std::string path;
        s.read("path", path);
        if (path.empty()) throw ConfigError(src + ": [matrix:" + mname + "] path is required");
        m.path = resolve(base_dir, path);
        s.read("kind", m.kind);
        if (auto o = s.text("orientation")) {
            if (*o == "features_in_rows") m.orientation = ingest::Orientation::FeaturesInRows;
            else if (*o == "samples_in_rows") m.orientation = ingest::Orientation::SamplesInRows;
            else throw ConfigError(src + ": [matrix:" + mname + "] orientation must be features_in_rows or samples_in_rows");
        }
        s.read("latent_dim", m.latent_dim);
        if (auto g = s.text("gene_list")) m.gene_list = resolve(base_dir, *g);
        s.read("validate_symbols", m.validate_symbols);
        s.finish();
        cfg.matrices.push_back(std::move(m));
    }
    if (cfg.matrices.empty()) {
        throw ConfigError(src + ": at least one [matrix:<name>] section is required");
    }
    return cfg;
}

PipelineConfig load_config(const fs::path& path) {
    if (!fs::exists(path)) {
        throw ConfigError("config file " + path.string() + " does not exist");
    }
    const auto base = fs::absolute(path).parent_path();
    return parse_config(tsv::read_file(path), base, path.string());
}

void validate_config(const PipelineConfig& cfg) {
    if (cfg.matrices.empty()) throw ConfigError("no matrices configured");
    if (!(cfg.split > 0.0 && cfg.split < 1.0)) throw ConfigError("split must lie in (0, 1)");
    cfg.thresholds.validate();
    cfg.gan.validate();
    cfg.classifier.validate();
    if (cfg.autoencoder.epochs == 0 || cfg.autoencoder.batch_size == 0 || !(cfg.autoencoder.learning_rate > 0.0)) {
        throw ConfigError("autoencoder epochs, batch_size and learning_rate must be positive");
    }
    auto require_file = [](const fs::path& p, const std::string& what) {
        if (!fs::is_regular_file(p)) {
            throw ConfigError(what + " file " + p.string() + " does not exist");
        }
    };
    require_file(cfg.labels, "label");
    for (const auto& m : cfg.matrices) {
        if (m.latent_dim == 0) throw ConfigError("matrix '" + m.name + "' latent_dim must be >= 1");
        require_file(m.path, "matrix '" + m.name + "'");
        if (m.gene_list) require_file(*m.gene_list, "gene list for '" + m.name + "'");
    }
}

std::string canonical_config(const PipelineConfig& cfg) {
    auto num = [](double v) { return tsv::format_double(v); };
    auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
    std::string out;
    out += "[data]\n";
    out += "labels = " + fs::absolute(cfg.labels).lexically_normal().string() + "\n";
    if (cfg.positive_class) out += "positive_class = " + *cfg.positive_class + "\n";
    for (const auto& m : cfg.matrices) {
        out += "\n[matrix:" + m.name + "]\n";
        out += "path = " + fs::absolute(m.path).lexically_normal().string() + "\n";
        out += "kind = " + m.kind + "\n";
        out += "orientation = " + orientation_name(m.orientation) + "\n";
        out += "latent_dim = " + std::to_string(m.latent_dim) + "\n";
        if (m.gene_list) out += "gene_list = " + fs::absolute(*m.gene_list).lexically_normal().string() + "\n";
        out += "validate_symbols = " + flag(m.validate_symbols) + "\n";
    }
    const auto& t = cfg.thresholds;
    out += "\n[selection]\n";
    out += "min_variance = " + num(t.min_variance) + "\n";
    out += "p_cut = " + num(t.p_cut) + "\n";
    out += "fdr_q = " + num(t.fdr_q) + "\n";
    out += "abs_log2fc_min = " + num(t.abs_log2fc_min) + "\n";
    out += "variance_filter = " + flag(t.variance_filter) + "\n";
    out += "t_test = " + flag(t.t_test) + "\n";
    out += "fold_change = " + flag(t.fold_change) + "\n";
    out += "fdr = " + flag(t.fdr) + "\n";
    const auto& a = cfg.autoencoder;
    out += "\n[autoencoder]\n";
    out += "latent_dim = " + std::to_string(a.latent_dim) + "\n";
    out += "epochs = " + std::to_string(a.epochs) + "\n";
    out += "batch_size = " + std::to_string(a.batch_size) + "\n";
    out += "learning_rate = " + num(a.learning_rate) + "\n";
    const auto& g = cfg.gan;
    out += "\n[gan]\n";
    out += "enabled = " + flag(cfg.gan_enabled) + "\n";
    out += "noise_dim = " + std::to_string(g.noise_dim) + "\n";
    out += "hidden = " + std::to_string(g.hidden) + "\n";
    out += "steps = " + std::to_string(g.steps) + "\n";
    out += "batch_size = " + std::to_string(g.batch_size) + "\n";
    out += "d_steps = " + std::to_string(g.d_steps_per_g_step) + "\n";
    out += "learning_rate = " + num(g.learning_rate) + "\n";
    const auto& c = cfg.classifier;
    out += "\n[classifier]\n";
    out += "hidden = " + std::to_string(c.hidden) + "\n";
    out += "epochs = " + std::to_string(c.epochs) + "\n";
    out += "batch_size = " + std::to_string(c.batch_size) + "\n";
    out += "validation_split = " + num(c.validation_split) + "\n";
    out += "learning_rate = " + num(c.learning_rate) + "\n";
    out += "threshold = " + num(c.threshold) + "\n";
    out += "\n[run]\n";
    out += "split = " + num(cfg.split) + "\n";
    out += "seed = " + std::to_string(cfg.seed) + "\n";
    return out;
}

std::string fnv1a_hex(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string config_hash(const PipelineConfig& config) {
    PipelineConfig unseeded = config;
    unseeded.seed = 0;
    return fnv1a_hex(canonical_config(unseeded));
}

}  // namespace mofuse::pipeline
