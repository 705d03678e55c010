#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"

#include "mofuse/artifacts.hpp"
#include "mofuse/config.hpp"
#include "mofuse/error.hpp"
#include "mofuse/tsv.hpp"

#include <fstream>

using namespace mofuse;
using namespace mofuse::artifacts;
namespace fs = std::filesystem;

namespace {

std::string replace_first(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
}

const char* minimal_ini = R"(; comment line
[data]
labels = labels.tsv

[matrix:expr]
path = expr.tsv   ; trailing comment

[matrix:cna]
path = /abs/cna.tsv
orientation = samples_in_rows
latent_dim = 8

[autoencoder]
latent_dim = 16
)";

}  // namespace

TEST_CASE("autoencoder checkpoint round trip") {
    nn::Rng rng(1);
    const auto raw = testing::random_matrix(rng, 20, 6, -2.0, 5.0);
    ae::TrainOptions opt;
    opt.latent_dim = 2;
    opt.epochs = 2;
    const auto model = ae::fit_autoencoder(raw, opt, rng).model;
    const auto text = save_autoencoder(model, "expression");
    CHECK(load_autoencoder(text, "ae") == model);
    CHECK(save_autoencoder(load_autoencoder(text, "ae"), "expression") == text);

    CHECK_THROWS_AS(load_autoencoder(replace_first(text, "#mofuse\tautoencoder\t1", "#mofuse\tautoencoder\t9"), "ae"),
                    VersionError);
    CHECK_THROWS_AS(load_autoencoder(replace_first(text, "#mofuse\tautoencoder", "#mofuse\tclassifier"), "ae"),
                    VersionError);
    CHECK_THROWS_AS(load_autoencoder("garbage\n", "ae"), VersionError);
    CHECK_THROWS_AS(load_autoencoder(text.substr(0, text.size() / 2), "ae"), DataError);
}

TEST_CASE("GAN and classifier checkpoint round trips") {
    nn::Rng rng(2);
    gan::GanConfig cfg;
    cfg.noise_dim = 4;
    cfg.hidden = 5;
    auto model = gan::make_gan(3, cfg, rng);
    model.history = {{1.25, 0.5}, {1.0, 0.75}};
    const auto normalizer = gan::fit_latent_normalizer(testing::random_matrix(rng, 6, 3, 0.0, 2.0));
    const auto text = save_gan(model, normalizer);
    const auto [back, back_norm] = load_gan(text, "gan");
    CHECK(back.generator == model.generator);
    CHECK(back.discriminator == model.discriminator);
    CHECK(back.noise_dim == 4);
    CHECK(back_norm == normalizer);
    CHECK(save_gan(back, back_norm) == text);
    CHECK_THROWS_AS(load_gan(replace_first(text, "\t1\n", "\t2\n"), "gan"), VersionError);

    auto clf_model = clf::make_classifier(7, clf::ClassifierConfig{}, rng);
    clf_model.threshold = 0.375;
    const auto ctext = save_classifier(clf_model);
    const auto cback = load_classifier(ctext, "clf");
    CHECK(cback.net == clf_model.net);
    CHECK(cback.threshold == 0.375);
    CHECK_THROWS_AS(load_classifier(replace_first(ctext, "\t1\n", "\t0\n"), "clf"), VersionError);
}

TEST_CASE("tables keep keys and exact values") {
    Table t;
    t.meta["matrix"] = "expr";
    t.key_columns = {"sample_id", "partition"};
    t.value_columns = {"a", "b"};
    t.keys = {{"S1", "train"}, {"S2", "test"}};
    t.values = nn::Matrix::from_rows({{0.1, 1e-300}, {-2.5, 1.0 / 3.0}});
    const auto text = format_table("latent", t);
    const auto back = parse_table(text, "latent", 2, "t");
    CHECK(back.meta == t.meta);
    CHECK(back.key_columns == t.key_columns);
    CHECK(back.value_columns == t.value_columns);
    CHECK(back.keys == t.keys);
    CHECK(back.values == t.values);
    CHECK_THROWS_AS(parse_table(text, "selected", 2, "t"), VersionError);
    CHECK_THROWS_AS(parse_table(text + "S3\ttrain\t1\n", "latent", 2, "t"), DataError);
}

TEST_CASE("config parsing") {
    const fs::path base = "/data/run";
    const auto cfg = pipeline::parse_config(minimal_ini, base);
    REQUIRE(cfg.matrices.size() == 2);
    CHECK(cfg.matrices[0].name == "expr");
    CHECK(cfg.matrices[0].kind == "expr");
    CHECK(cfg.matrices[0].path == base / "expr.tsv");
    CHECK(cfg.matrices[0].latent_dim == 16);
    CHECK(cfg.matrices[1].path == "/abs/cna.tsv");
    CHECK(cfg.matrices[1].orientation == ingest::Orientation::SamplesInRows);
    CHECK(cfg.matrices[1].latent_dim == 8);
    CHECK(cfg.labels == base / "labels.tsv");
    CHECK(cfg.split == 0.8);
    CHECK(cfg.classifier.epochs == 10);
    CHECK(cfg.gan_enabled);
    CHECK(cfg.gan.steps == 2000);
}

TEST_CASE("config errors") {
    const fs::path base = "/tmp";
    const std::string data = "[data]\nlabels = l.tsv\n";
    const std::string matrix = "[matrix:m]\npath = m.tsv\n";
    CHECK_THROWS_AS(pipeline::parse_config(matrix, base), ConfigError);
    CHECK_THROWS_AS(pipeline::parse_config(data, base), ConfigError);
    CHECK_THROWS_AS(pipeline::parse_config(data + matrix + "[bogus]\nx = 1\n", base), ConfigError);
    CHECK_THROWS_AS(pipeline::parse_config(data + matrix + "[gan]\nstepz = 3\n", base), ConfigError);
    CHECK_THROWS_AS(pipeline::parse_config(data + matrix + "[gan]\nsteps = many\n", base), ConfigError);
    CHECK_THROWS_AS(pipeline::parse_config(data + matrix + "[gan]\nsteps = -3\n", base), ConfigError);
    CHECK_THROWS_AS(pipeline::parse_config(data + "[matrix:a b]\npath = m.tsv\n", base), ConfigError);
    CHECK_THROWS_AS(pipeline::parse_config(data + "[matrix:m]\norientation = sideways\npath = m\n", base),
                    ConfigError);
    CHECK_THROWS_AS(pipeline::parse_config(data + matrix + matrix, base), ConfigError);
    CHECK_THROWS_AS(pipeline::parse_config("x = 1\n" + data + matrix, base), ConfigError);
    CHECK_THROWS_AS(pipeline::load_config("/nonexistent/config.ini"), ConfigError);

    auto cfg = pipeline::parse_config(data + matrix, base);
    CHECK_THROWS_AS(pipeline::validate_config(cfg), ConfigError);
    cfg.split = 1.0;
    CHECK_THROWS_AS(pipeline::validate_config(cfg), ConfigError);
}

TEST_CASE("validation checks referenced files") {
    const auto dir = testing::scratch_dir("config_validate");
    tsv::write_file(dir / "m.tsv", "feature\tS1\nf\t1\n");
    const std::string text = "[data]\nlabels = labels.tsv\n[matrix:m]\npath = m.tsv\n";
    tsv::write_file(dir / "config.ini", text);
    const auto cfg = pipeline::load_config(dir / "config.ini");
    CHECK_THROWS_WITH_AS(pipeline::validate_config(cfg), doctest::Contains("labels.tsv"), ConfigError);
    tsv::write_file(dir / "labels.tsv", "sample_id\tlabel\nS1\tA\n");
    CHECK_NOTHROW(pipeline::validate_config(cfg));
}

TEST_CASE("canonical rendering re-parses to itself and hashes without the seed") {
    const auto cfg = pipeline::parse_config(minimal_ini, "/data/run");
    const auto canon = pipeline::canonical_config(cfg);
    const auto again = pipeline::parse_config(canon, "/elsewhere");
    CHECK(pipeline::canonical_config(again) == canon);
    CHECK(again.matrices[1].latent_dim == 8);
    CHECK(again.labels == cfg.labels);

    auto reseeded = cfg;
    reseeded.seed = 999;
    CHECK(pipeline::config_hash(reseeded) == pipeline::config_hash(cfg));
    auto changed = cfg;
    changed.classifier.epochs = 11;
    CHECK(pipeline::config_hash(changed) != pipeline::config_hash(cfg));
    CHECK(pipeline::config_hash(cfg).size() == 16);

    CHECK(pipeline::fnv1a_hex("") == "cbf29ce484222325");
    CHECK(pipeline::fnv1a_hex("a") == "af63dc4c8601ec8c");
}
