#include "mofuse/pipeline.hpp"

#include "mofuse/artifacts.hpp"
#include "mofuse/autoencoder.hpp"
#include "mofuse/classifier.hpp"
#include "mofuse/featsel.hpp"
#include "mofuse/gan.hpp"
#include "mofuse/ingest.hpp"
#include "mofuse/metrics.hpp"
#include "mofuse/nn/rng.hpp"
#include "mofuse/tsv.hpp"

#include "json.hpp"
#include <spdlog/spdlog.h>

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <functional>
#include <map>
#include <set>

namespace mofuse::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* manifest_name = "manifest.json";
constexpr const char* config_name = "run.ini";

// ---- file lookup ---------------------------------------------------------

fs::path locate(const StageIO& io, const std::string& name) {
    for (const auto& dir : io.inputs) {
        if (fs::exists(dir / name)) return dir / name;
    }
    if (fs::exists(io.out / name)) return io.out / name;
    std::string where;
    for (const auto& dir : io.inputs) where += dir.string() + ", ";
    where += io.out.string();
    throw DataError("missing artifact " + name + " (searched " + where + ")");
}

PipelineConfig load_run_config(const StageIO& io) {
    const auto path = locate(io, config_name);
    return parse_config(tsv::read_file(path), path.parent_path(), path.string());
}

artifacts::Table load_table(const StageIO& io, const std::string& name, std::string_view type, std::size_t keys) {
    const auto path = locate(io, name);
    return artifacts::parse_table(tsv::read_file(path), type, keys, path.string());
}

// ---- manifest ------------------------------------------------------------

class Manifest {
public:
    // Earlier stages may be spread over several directories; the manifest with the most stage entries wins.
    static Manifest open(const StageIO& io) {
        Manifest m;
        m.doc_ = json::object();
        std::size_t best = 0;
        auto dirs = io.inputs;
        dirs.push_back(io.out);
        for (const auto& dir : dirs) {
            const auto path = dir / manifest_name;
            if (!fs::exists(path)) continue;
            json doc;
            try {
                doc = json::parse(tsv::read_file(path));
            } catch (const json::exception& e) {
                throw DataError(path.string() + ": " + e.what());
            }
            if (!doc.is_object()) continue;
            const std::size_t stages = doc.contains("stages") ? doc["stages"].size() : 0;
            if (m.doc_.empty() || stages > best) {
                m.doc_ = std::move(doc);
                best = stages;
            }
        }
        return m;
    }

    json& doc() { return doc_; }

    /// Replaces the stage entry, keeping earlier stages in order.
    json& stage(const std::string& name) {
        auto& stages = doc_["stages"];
        if (!stages.is_object()) stages = json::object();
        stages[name] = json::object();
        return stages[name];
    }

    void write(const fs::path& out) {
        std::set<std::string> seen;
        json all = json::array();
        for (const auto& [name, entry] : doc_["stages"].items()) {
            for (const auto& a : entry["artifacts"]) {
                if (seen.insert(a.get<std::string>()).second) all.push_back(a);
            }
        }
        if (seen.insert(manifest_name).second) all.push_back(manifest_name);
        doc_["artifacts"] = all;
        tsv::write_file(out / manifest_name, doc_.dump(2) + "\n");
    }

private:
    json doc_;
};

json shape(std::size_t rows, std::size_t cols) {
    return json::array({rows, cols});
}

// ---- stage bookkeeping -----------------------------------------------------

class StageRecord {
public:
    StageRecord(Manifest& manifest, std::string name) : entry_(manifest.stage(name)), start_(clock::now()) {
        entry_["seconds"] = 0.0;
        entry_["shapes"] = json::object();
        entry_["fitted"] = json::object();
        entry_["artifacts"] = json::array();
    }

    void write(const fs::path& out, const std::string& name, std::string_view content) {
        tsv::write_file(out / name, content);
        entry_["artifacts"].push_back(name);
    }

    void shape(const std::string& what, std::size_t rows, std::size_t cols) {
        entry_["shapes"][what] = pipeline::shape(rows, cols);
    }

    void fitted(const std::string& what, const std::string& ids_hash, const std::string& scope) {
        entry_["fitted"][what] = {{"ids_hash", ids_hash}, {"scope", scope}};
    }

    json& entry() { return entry_; }

    void finish() {
        entry_["seconds"] = std::chrono::duration<double>(clock::now() - start_).count();
    }

private:
    using clock = std::chrono::steady_clock;
    json& entry_;
    clock::time_point start_;
};

// ---- split ---------------------------------------------------------------

struct Split {
    std::vector<std::string> ids;
    std::vector<int> labels;
    std::vector<bool> train;
    std::string positive_class;

    std::vector<std::size_t> rows(bool training) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (train[i] == training) out.push_back(i);
        }
        return out;
    }

    std::vector<std::string> ids_of(std::span<const std::size_t> rows) const {
        std::vector<std::string> out;
        for (auto r : rows) out.push_back(ids[r]);
        return out;
    }

    std::vector<int> labels_of(std::span<const std::size_t> rows) const {
        std::vector<int> out;
        for (auto r : rows) out.push_back(labels[r]);
        return out;
    }

    /// Label with fewer training rows; label 1 on a tie.
    int minority_label() const {
        std::size_t n[2] = {0, 0};
        for (auto r : rows(true)) ++n[labels[r]];
        return n[1] <= n[0] ? 1 : 0;
    }

    std::vector<std::size_t> minority_train_rows() const {
        const int m = minority_label();
        std::vector<std::size_t> out;
        for (auto r : rows(true)) {
            if (labels[r] == m) out.push_back(r);
        }
        return out;
    }
};

/// Per-class split so both partitions see both classes.
std::vector<bool> stratified_split(const std::vector<int>& labels, double fraction, nn::Rng& rng) {
    std::vector<bool> train(labels.size(), false);
    for (int c : {0, 1}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == c) members.push_back(i);
        }
        if (members.size() < 2) {
            throw DataError("class " + std::to_string(c) + " has " + std::to_string(members.size()) +
                            " sample(s); at least 2 are needed to split into train and test");
        }
        const auto [a, b] = nn::uniform_split(rng, members.size(), fraction);
        for (auto i : a) train[members[i]] = true;
    }
    return train;
}

std::string format_split(const Split& s) {
    artifacts::Table t;
    t.meta["positive_class"] = s.positive_class;
    t.key_columns = {"sample_id", "partition"};
    t.value_columns = {"label"};
    t.values = nn::Matrix(s.ids.size(), 1);
    for (std::size_t i = 0; i < s.ids.size(); ++i) {
        t.keys.push_back({s.ids[i], s.train[i] ? "train" : "test"});
        t.values(i, 0) = s.labels[i];
    }
    return artifacts::format_table("split", t);
}

Split load_split(const StageIO& io) {
    const auto t = load_table(io, "split.tsv", "split", 2);
    Split s;
    s.positive_class = t.meta.count("positive_class") ? t.meta.at("positive_class") : "1";
    for (std::size_t i = 0; i < t.keys.size(); ++i) {
        const auto& part = t.keys[i][1];
        if (part != "train" && part != "test") {
            throw DataError("split.tsv: unknown partition '" + part + "'");
        }
        const double y = t.values(i, 0);
        if (y != 0.0 && y != 1.0) {
            throw DataError("split.tsv: label of " + t.keys[i][0] + " is not 0 or 1");
        }
        s.ids.push_back(t.keys[i][0]);
        s.train.push_back(part == "train");
        s.labels.push_back(static_cast<int>(y));
    }
    return s;
}

// ---- tables of sample rows -------------------------------------------------

std::string format_samples(std::string_view type, const std::vector<std::string>& ids,
                           const std::vector<std::string>& columns, const nn::Matrix& values,
                           artifacts::Meta meta = {}) {
    artifacts::Table t;
    t.meta = std::move(meta);
    t.key_columns = {"sample_id"};
    t.value_columns = columns;
    for (const auto& id : ids) t.keys.push_back({id});
    t.values = values;
    return artifacts::format_table(type, t);
}

std::vector<std::string> first_keys(const artifacts::Table& t) {
    std::vector<std::string> out;
    for (const auto& k : t.keys) out.push_back(k[0]);
    return out;
}

/// Row indices of `ids` inside `order`; every id must be present.
std::vector<std::size_t> positions(const std::vector<std::string>& order, const std::vector<std::string>& ids,
                                   const std::string& what) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < order.size(); ++i) index[order[i]] = i;
    std::vector<std::size_t> out;
    for (const auto& id : ids) {
        auto it = index.find(id);
        if (it == index.end()) throw DataError(what + " has no row for sample " + id);
        out.push_back(it->second);
    }
    return out;
}

std::string loss_tsv(const std::string& header, const std::vector<std::vector<double>>& columns) {
    std::string out = header + "\n";
    const std::size_t n = columns.empty() ? 0 : columns.front().size();
    for (std::size_t i = 0; i < n; ++i) {
        out += std::to_string(i + 1);
        for (const auto& c : columns) out += "\t" + tsv::format_double(c[i]);
        out += "\n";
    }
    return out;
}

std::size_t effective_latent(std::size_t configured, std::size_t features) {
    return std::min(configured, std::max<std::size_t>(1, features / 2));
}

// ---- stages ----------------------------------------------------------------

void do_select(const PipelineConfig& cfg, const fs::path& out) {
    validate_config(cfg);
    const StageIO io{{}, out};
    auto manifest = Manifest::open(io);
    auto& doc = manifest.doc();
    doc = json::object();
    doc["schema"] = "mofuse.manifest";
    doc["schema_version"] = 1;
    doc["config_hash"] = config_hash(cfg);
    doc["seed"] = cfg.seed;
    StageRecord rec(manifest, "select");

    std::vector<ingest::FeatureMatrix> loaded;
    for (const auto& m : cfg.matrices) {
        ingest::LoadReport report;
        auto matrix = ingest::load_matrix(m.path, m.kind, m.orientation, &report);
        rec.shape("input_" + m.name, matrix.samples(), matrix.features() + report.dropped_features.size());
        if (!report.dropped_features.empty() || report.imputed_cells > 0) {
            spdlog::info("{}: dropped {} sparse feature(s), imputed {} cell(s)", m.name,
                         report.dropped_features.size(), report.imputed_cells);
        }
        if (m.gene_list) {
            matrix = ingest::restrict_to_gene_list(matrix, ingest::load_gene_list(*m.gene_list));
        }
        if (m.validate_symbols) {
            auto check = ingest::validate_gene_symbols(matrix);
            if (!check.rejected.empty()) {
                spdlog::warn("{}: {} feature name(s) are not gene symbols and were dropped", m.name,
                             check.rejected.size());
            }
            matrix = std::move(check.kept);
        }
        loaded.push_back(std::move(matrix));
    }
    const auto labels = ingest::load_labels(cfg.labels, cfg.positive_class);
    auto aligned = ingest::align_samples(loaded, labels);

    nn::Rng root(cfg.seed);
    auto split_rng = root.split(streams::split);
    Split split;
    split.ids = aligned.labels.sample_ids;
    split.labels = aligned.labels.labels;
    split.positive_class = aligned.labels.positive_class_name;
    split.train = stratified_split(split.labels, cfg.split, split_rng);
    const auto train_rows = split.rows(true);
    const auto test_rows = split.rows(false);
    const auto train_labels = split.labels_of(train_rows);
    const auto train_hash = id_set_hash(split.ids_of(train_rows));

    doc["train_ids_hash"] = train_hash;
    doc["test_ids_hash"] = id_set_hash(split.ids_of(test_rows));
    doc["minority_train_ids_hash"] = id_set_hash(split.ids_of(split.minority_train_rows()));

    rec.write(out, config_name, canonical_config(cfg));
    rec.write(out, "split.tsv", format_split(split));
    rec.shape("train", train_rows.size(), 0);
    rec.shape("test", test_rows.size(), 0);

    for (std::size_t k = 0; k < cfg.matrices.size(); ++k) {
        const auto& name = cfg.matrices[k].name;
        const auto& matrix = aligned.matrices[k];
        const auto train = ingest::subset_samples(matrix, train_rows);
        featsel::SelectionResult sel;
        try {
            sel = featsel::select_features(train, train_labels, cfg.thresholds);
        } catch (const DataError& e) {
            throw DataError(name + ": " + e.what());
        }
        rec.fitted("selection_" + name, train_hash, "train");
        sel.selection.report.kind = name;
        const auto all = sel.selection.apply(matrix);
        spdlog::info("select: {} kept {} of {} features", name, all.features(), matrix.features());
        rec.shape("selected_" + name, all.samples(), all.features());
        rec.write(out, "selection_" + name + ".tsv", featsel::format_report(sel.selection.report));
        rec.write(out, "selected_" + name + ".tsv",
                  format_samples("selected", all.sample_ids, all.feature_names, all.values, {{"kind", matrix.kind}}));
    }
    rec.finish();
    manifest.write(out);
}

void do_train_ae(const StageIO& io) {
    const auto cfg = load_run_config(io);
    const auto split = load_split(io);
    auto manifest = Manifest::open(io);
    StageRecord rec(manifest, "train-ae");
    const auto train_ids = split.ids_of(split.rows(true));
    nn::Rng root(cfg.seed);

    for (std::size_t k = 0; k < cfg.matrices.size(); ++k) {
        const auto& m = cfg.matrices[k];
        const auto table = load_table(io, "selected_" + m.name + ".tsv", "selected", 1);
        const auto rows = positions(first_keys(table), train_ids, "selected_" + m.name + ".tsv");
        const auto train = nn::select_rows(table.values, rows);

        ae::TrainOptions options = cfg.autoencoder;
        options.latent_dim = effective_latent(m.latent_dim, train.cols());
        if (options.latent_dim != m.latent_dim) {
            spdlog::info("train-ae: {} latent width {} (configured {}, {} selected features)", m.name,
                         options.latent_dim, m.latent_dim, train.cols());
        }
        auto rng = root.split(streams::autoencoder_base + k);
        auto trained = ae::fit_autoencoder(train, options, rng);
        rec.fitted("ae_" + m.name, id_set_hash(train_ids), "train");
        rec.shape("ae_" + m.name, train.rows(), train.cols());
        rec.shape("latent_" + m.name, train.rows(), options.latent_dim);
        rec.write(io.out, "ae_" + m.name + ".ckpt", artifacts::save_autoencoder(trained.model, m.kind));
        rec.write(io.out, "ae_" + m.name + "_loss.tsv", loss_tsv("epoch\tmse", {trained.loss_trace}));
    }
    rec.finish();
    manifest.write(io.out);
}

void do_fuse(const StageIO& io) {
    const auto cfg = load_run_config(io);
    const auto split = load_split(io);
    auto manifest = Manifest::open(io);
    StageRecord rec(manifest, "fuse");

    std::vector<ae::LatentBlock> blocks;
    for (const auto& m : cfg.matrices) {
        const auto table = load_table(io, "selected_" + m.name + ".tsv", "selected", 1);
        const auto ckpt = locate(io, "ae_" + m.name + ".ckpt");
        const auto model = artifacts::load_autoencoder(tsv::read_file(ckpt), ckpt.string());
        if (model.input_dim() != table.values.cols()) {
            throw DimensionError("ae_" + m.name + ".ckpt expects " + std::to_string(model.input_dim()) +
                                 " features but selected_" + m.name + ".tsv has " +
                                 std::to_string(table.values.cols()));
        }
        const auto rows = positions(first_keys(table), split.ids, "selected_" + m.name + ".tsv");
        ae::LatentBlock block;
        block.kind = m.name;
        block.sample_ids = split.ids;
        block.values = ae::encode_raw(model, nn::select_rows(table.values, rows));
        nn::require_finite(block.values, m.name + " latent block");
        blocks.push_back(std::move(block));
    }
    const auto shared = ae::fuse_latents(std::move(blocks));
    rec.shape("latent", shared.fused.rows(), shared.fused.cols());
    rec.write(io.out, "latent.tsv", format_samples("latent", shared.sample_ids, shared.column_names(), shared.fused));
    rec.finish();
    manifest.write(io.out);
}

void do_oversample(const StageIO& io) {
    const auto cfg = load_run_config(io);
    const auto split = load_split(io);
    auto manifest = Manifest::open(io);
    StageRecord rec(manifest, "oversample");

    const auto latent = load_table(io, "latent.tsv", "latent", 1);
    const auto train_rows = split.rows(true);
    const auto train_ids = split.ids_of(train_rows);
    const auto x = nn::select_rows(latent.values, positions(first_keys(latent), train_ids, "latent.tsv"));
    const auto y = split.labels_of(train_rows);

    gan::LabeledRows augmented;
    if (cfg.gan_enabled) {
        const auto minority_rows = split.minority_train_rows();
        const auto minority_ids = split.ids_of(minority_rows);
        const auto minority =
            nn::select_rows(latent.values, positions(first_keys(latent), minority_ids, "latent.tsv"));
        nn::Rng root(cfg.seed);
        auto train_rng = root.split(streams::gan_training);
        auto sample_rng = root.split(streams::gan_sampling);
        const auto normalizer = gan::fit_latent_normalizer(minority);
        const auto model = gan::train_gan(normalizer.apply(minority), cfg.gan, train_rng);
        augmented = gan::oversample_to_balance(x, y, model, normalizer, sample_rng);

        const auto minority_hash = id_set_hash(minority_ids);
        rec.fitted("gan", minority_hash, "minority_train");
        rec.fitted("latent_normalizer", minority_hash, "minority_train");
        rec.shape("gan_input", minority.rows(), minority.cols());
        rec.write(io.out, "gan.ckpt", artifacts::save_gan(model, normalizer));
        std::vector<double> ld;
        std::vector<double> lg;
        for (const auto& p : model.history) {
            ld.push_back(p.discriminator);
            lg.push_back(p.generator);
        }
        rec.write(io.out, "gan_loss.tsv", loss_tsv("step\tL_D\tL_G", {ld, lg}));
    } else {
        augmented.x = x;
        augmented.y = y;
        augmented.synthetic.assign(y.size(), false);
        rec.entry()["gan"] = "disabled";
    }

    std::vector<std::string> ids = train_ids;
    std::size_t serial = 0;
    for (std::size_t i = train_ids.size(); i < augmented.y.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "synthetic_%05zu", ++serial);
        ids.emplace_back(buf);
    }
    std::vector<std::string> columns{"label", "synthetic"};
    columns.insert(columns.end(), latent.value_columns.begin(), latent.value_columns.end());
    nn::Matrix values(augmented.y.size(), columns.size());
    for (std::size_t r = 0; r < augmented.y.size(); ++r) {
        values(r, 0) = augmented.y[r];
        values(r, 1) = augmented.synthetic[r] ? 1.0 : 0.0;
        const auto src = augmented.x.row(r);
        std::copy(src.begin(), src.end(), values.row(r).begin() + 2);
    }
    rec.shape("augmented", values.rows(), augmented.x.cols());
    rec.entry()["synthetic_rows"] = serial;
    rec.write(io.out, "augmented.tsv", format_samples("augmented", ids, columns, values));
    rec.finish();
    manifest.write(io.out);
}

void do_train_clf(const StageIO& io) {
    const auto cfg = load_run_config(io);
    auto manifest = Manifest::open(io);
    StageRecord rec(manifest, "train-clf");

    const auto table = load_table(io, "augmented.tsv", "augmented", 1);
    if (table.value_columns.size() < 3 || table.value_columns[0] != "label" || table.value_columns[1] != "synthetic") {
        throw DataError("augmented.tsv: expected label and synthetic columns before the latent columns");
    }
    std::vector<std::size_t> latent_cols;
    for (std::size_t c = 2; c < table.value_columns.size(); ++c) latent_cols.push_back(c);
    const auto x = nn::select_cols(table.values, latent_cols);
    std::vector<int> y;
    std::vector<std::string> real_ids;
    for (std::size_t r = 0; r < table.keys.size(); ++r) {
        y.push_back(table.values(r, 0) == 1.0 ? 1 : 0);
        if (table.values(r, 1) == 0.0) real_ids.push_back(table.keys[r][0]);
    }

    nn::Rng root(cfg.seed);
    auto rng = root.split(streams::classifier);
    const auto trained = clf::train_classifier(x, y, cfg.classifier, rng);
    rec.fitted("classifier", id_set_hash(real_ids), "train");
    rec.shape("classifier_input", x.rows(), x.cols());
    rec.entry()["train_rows"] = trained.train_rows;
    rec.entry()["validation_rows"] = trained.validation_rows;
    rec.write(io.out, "classifier.ckpt", artifacts::save_classifier(trained.model));
    rec.write(io.out, "classifier_loss.tsv",
              loss_tsv("epoch\ttrain_bce\tvalidation_bce", {trained.train_loss, trained.validation_loss}));
    rec.finish();
    manifest.write(io.out);
}

std::string do_evaluate(const StageIO& io) {
    const auto cfg = load_run_config(io);
    const auto split = load_split(io);
    auto manifest = Manifest::open(io);
    auto& doc = manifest.doc();
    StageRecord rec(manifest, "evaluate");

    const auto latent = load_table(io, "latent.tsv", "latent", 1);
    const auto ckpt = locate(io, "classifier.ckpt");
    const auto model = artifacts::load_classifier(tsv::read_file(ckpt), ckpt.string());
    const auto augmented = load_table(io, "augmented.tsv", "augmented", 1);

    const auto test_rows = split.rows(false);
    const auto x = nn::select_rows(latent.values, positions(first_keys(latent), split.ids_of(test_rows), "latent.tsv"));
    if (x.cols() != model.input_dim()) {
        throw DimensionError("classifier.ckpt expects " + std::to_string(model.input_dim()) +
                             " latent columns but latent.tsv has " + std::to_string(x.cols()));
    }
    const auto y = split.labels_of(test_rows);
    const std::size_t positives = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
    if (positives == 0 || positives == y.size()) {
        throw DataError("test partition holds a single class; metrics and ROC need both");
    }

    const auto proba = clf::predict_proba(model, x);
    std::vector<int> predicted;
    for (double p : proba) predicted.push_back(p >= model.threshold ? 1 : 0);
    const auto counts = metrics::confusion(y, predicted);
    const auto suite = metrics::metric_suite(counts);
    const auto roc = metrics::roc_auc(y, proba);

    std::size_t synthetic = 0;
    for (std::size_t r = 0; r < augmented.keys.size(); ++r) synthetic += augmented.values(r, 1) == 1.0 ? 1 : 0;

    // The manifest on disk must already list every fitting stage.
    rec.finish();
    manifest.write(io.out);
    const auto violations = leakage_violations(io.out / manifest_name);
    if (!violations.empty()) {
        std::string msg = "leakage check failed:";
        for (const auto& v : violations) msg += " " + v + ";";
        throw DataError(msg);
    }

    json report;
    report["schema"] = report_schema;
    report["schema_version"] = report_schema_version;
    report["seed"] = cfg.seed;
    report["config_hash"] = config_hash(cfg);
    report["positive_class"] = split.positive_class;
    report["gan_enabled"] = cfg.gan_enabled;
    report["partitions"] = {{"train", split.rows(true).size()},
                            {"test", test_rows.size()},
                            {"synthetic", synthetic},
                            {"train_augmented", augmented.keys.size()}};
    report["counts"] = {{"tp", counts.tp}, {"tn", counts.tn}, {"fp", counts.fp}, {"fn", counts.fn}};
    report["accuracy"] = suite.accuracy;
    report["precision"] = suite.precision;
    report["recall"] = suite.recall;
    report["f1"] = suite.f1;
    report["undefined"] = {{"precision", suite.precision_undefined},
                           {"recall", suite.recall_undefined},
                           {"f1", suite.f1_undefined}};
    report["threshold"] = model.threshold;
    report["auc"] = roc.auc;
    json points = json::array();
    for (const auto& p : roc.points) points.push_back(json::array({p.fpr, p.tpr}));
    report["roc_points"] = points;
    report["leakage_check"] = "passed";
    const auto text = report.dump(2) + "\n";

    rec.write(io.out, "report.json", text);
    rec.write(io.out, "roc.tsv", metrics::format_roc_tsv(roc));
    rec.write(io.out, "roc.svg", metrics::roc_svg(roc, "ROC, positive class " + split.positive_class));
    doc["leakage_check"] = "passed";
    rec.finish();
    manifest.write(io.out);
    spdlog::info("evaluate: accuracy {:.4f}, recall {:.4f}, AUC {:.4f}", suite.accuracy, suite.recall, roc.auc);
    return text;
}

template <class F>
auto guarded(const std::string& stage, F&& body) {
    try {
        spdlog::debug("stage {} starting", stage);
        return body();
    } catch (const StageFailure&) {
        throw;
    } catch (const Error& e) {
        throw StageFailure(stage, e);
    } catch (const fs::filesystem_error& e) {
        throw StageFailure(stage, DataError(e.what()));
    }
}

}  // namespace

std::string id_set_hash(std::vector<std::string> ids) {
    std::sort(ids.begin(), ids.end());
    std::string joined;
    for (const auto& id : ids) {
        joined += id;
        joined += '\n';
    }
    return fnv1a_hex(joined);
}

std::vector<std::string> leakage_violations(const fs::path& manifest_path) {
    json doc;
    try {
        doc = json::parse(tsv::read_file(manifest_path));
    } catch (const json::exception& e) {
        throw DataError(manifest_path.string() + ": " + e.what());
    }
    std::vector<std::string> out;
    const std::map<std::string, std::string> expected{
        {"train", doc.value("train_ids_hash", "")},
        {"minority_train", doc.value("minority_train_ids_hash", "")},
    };
    if (!doc.contains("stages")) return {"manifest has no stage entries"};
    std::size_t checked = 0;
    for (const auto& [stage, entry] : doc["stages"].items()) {
        if (!entry.contains("fitted")) continue;
        for (const auto& [what, fit] : entry["fitted"].items()) {
            ++checked;
            const auto scope = fit.value("scope", "");
            auto it = expected.find(scope);
            if (it == expected.end() || it->second.empty()) {
                out.push_back(stage + "/" + what + " has unknown scope '" + scope + "'");
            } else if (fit.value("ids_hash", "") != it->second) {
                out.push_back(stage + "/" + what + " was fitted on samples outside the " + scope + " set");
            }
        }
    }
    if (checked == 0) out.push_back("manifest records no fitted statistics");
    return out;
}

DirectoryLock::DirectoryLock(const fs::path& dir) : path_(dir / ".mofuse.lock") {
    fs::create_directories(dir);
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        if (errno == EEXIST) {
            throw ConfigError("output directory " + dir.string() + " is in use by another run (remove " +
                              path_.string() + " if that run is gone)");
        }
        throw DataError("cannot create " + path_.string() + ": " + std::strerror(errno));
    }
    const auto pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
    ::close(fd);
}

DirectoryLock::~DirectoryLock() {
    std::error_code ec;
    fs::remove(path_, ec);
}

void stage_select(const PipelineConfig& config, const fs::path& out) {
    guarded("select", [&] {
        DirectoryLock lock(out);
        do_select(config, out);
    });
}

void stage_train_ae(const StageIO& io) {
    guarded("train-ae", [&] {
        DirectoryLock lock(io.out);
        do_train_ae(io);
    });
}

void stage_fuse(const StageIO& io) {
    guarded("fuse", [&] {
        DirectoryLock lock(io.out);
        do_fuse(io);
    });
}

void stage_oversample(const StageIO& io) {
    guarded("oversample", [&] {
        DirectoryLock lock(io.out);
        do_oversample(io);
    });
}

void stage_train_clf(const StageIO& io) {
    guarded("train-clf", [&] {
        DirectoryLock lock(io.out);
        do_train_clf(io);
    });
}

void stage_evaluate(const StageIO& io) {
    guarded("evaluate", [&] {
        DirectoryLock lock(io.out);
        do_evaluate(io);
    });
}

std::string run_pipeline(const PipelineConfig& config, const fs::path& out) {
    guarded("validate", [&] { validate_config(config); });
    DirectoryLock lock(out);
    const StageIO io{{}, out};
    guarded("select", [&] { do_select(config, out); });
    guarded("train-ae", [&] { do_train_ae(io); });
    guarded("fuse", [&] { do_fuse(io); });
    guarded("oversample", [&] { do_oversample(io); });
    guarded("train-clf", [&] { do_train_clf(io); });
    return guarded("evaluate", [&] { return do_evaluate(io); });
}

}  // namespace mofuse::pipeline
