// Command-line front end: `pipeline run` and the per-stage subcommands.

#include "mofuse/config.hpp"
#include "mofuse/pipeline.hpp"
#include "mofuse/tsv.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <iostream>

namespace fs = std::filesystem;
using namespace mofuse;

namespace {

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config: return 2;
        case ErrorKind::Data:
        case ErrorKind::Dimension:
        case ErrorKind::Version: return 3;
        case ErrorKind::Numeric: return 4;
    }
    return 3;
}

std::string quoted(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += (c == '\n' || c == '\t') ? ' ' : c;
    }
    return out + "\"";
}

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("mofuse");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::info);
    if (const char* env = std::getenv("MOFUSE_LOG")) {
        spdlog::set_level(spdlog::level::from_str(env));
    }
}

pipeline::PipelineConfig config_with_overrides(const std::string& path, const std::optional<std::uint64_t>& seed,
                                               const std::optional<std::string>& out) {
    auto cfg = pipeline::load_config(path);
    if (seed) cfg.seed = *seed;
    if (out) cfg.out = *out;
    return cfg;
}

pipeline::StageIO stage_io(const std::vector<std::string>& in, const std::string& out) {
    pipeline::StageIO io;
    for (const auto& d : in) io.inputs.emplace_back(d);
    io.out = out;
    return io;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void sweep(const pipeline::PipelineConfig& base, const std::vector<std::uint64_t>& seeds, const fs::path& out) {
    using json = nlohmann::ordered_json;
    json runs = json::array();
    std::map<std::string, std::vector<double>> values;
    const std::vector<std::string> keys{"accuracy", "precision", "recall", "f1", "auc"};
    for (auto seed : seeds) {
        auto cfg = base;
        cfg.seed = seed;
        const auto report = json::parse(pipeline::run_pipeline(cfg, out / ("seed_" + std::to_string(seed))));
        json row = {{"seed", seed}};
        for (const auto& k : keys) {
            row[k] = report[k];
            values[k].push_back(report[k].get<double>());
        }
        runs.push_back(row);
    }
    json summary;
    summary["schema"] = "mofuse.sweep";
    summary["schema_version"] = 1;
    summary["config_hash"] = pipeline::config_hash(base);
    summary["runs"] = runs;
    for (const auto& k : keys) {
        double sum = 0.0;
        for (double v : values[k]) sum += v;
        summary["mean"][k] = sum / static_cast<double>(values[k].size());
        summary["median"][k] = median(values[k]);
    }
    tsv::write_file(out / "sweep.json", summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Multi-matrix latent fusion classifier with GAN minority oversampling"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::vector<std::string> in_dirs;
    std::string stage_out;
    std::vector<std::uint64_t> seeds;

    auto* run = app.add_subcommand("run", "Run every stage from a config file");
    run->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Override the configured seed");
    run->add_option("--out", out, "Override the output directory");

    auto* sweep_cmd = app.add_subcommand("sweep", "Run once per seed and summarize mean and median metrics");
    sweep_cmd->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--seeds", seeds, "Seeds to run")->required()->delimiter(',');
    sweep_cmd->add_option("--out", out, "Override the output directory");

    auto* select = app.add_subcommand("select", "Load, split and select features");
    select->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    select->add_option("--seed", seed, "Override the configured seed");
    select->add_option("--out", out, "Override the output directory");

    std::vector<CLI::App*> stages;
    for (const char* name : {"train-ae", "fuse", "oversample", "train-clf", "evaluate"}) {
        auto* s = app.add_subcommand(name, std::string("Stage ") + name);
        s->add_option("--in", in_dirs, "Directory holding earlier artifacts (repeatable)");
        s->add_option("--out", stage_out, "Output directory")->required();
        stages.push_back(s);
    }

    std::string stage_name = "cli";
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        if (rc != 0) {
            std::cerr << "mofuse status=error exit=2 kind=config stage=cli message=" << quoted(e.what()) << "\n";
            return 2;
        }
        return 0;
    }

    try {
        const auto* cmd = app.get_subcommands().front();
        stage_name = cmd->get_name();
        if (cmd == run) {
            const auto cfg = config_with_overrides(config_path, seed, out);
            std::cout << pipeline::run_pipeline(cfg, cfg.out);
        } else if (cmd == sweep_cmd) {
            const auto cfg = config_with_overrides(config_path, std::nullopt, out);
            sweep(cfg, seeds, cfg.out);
        } else if (cmd == select) {
            const auto cfg = config_with_overrides(config_path, seed, out);
            pipeline::validate_config(cfg);
            pipeline::stage_select(cfg, cfg.out);
        } else {
            const auto io = stage_io(in_dirs, stage_out);
            if (stage_name == "train-ae") pipeline::stage_train_ae(io);
            else if (stage_name == "fuse") pipeline::stage_fuse(io);
            else if (stage_name == "oversample") pipeline::stage_oversample(io);
            else if (stage_name == "train-clf") pipeline::stage_train_clf(io);
            else pipeline::stage_evaluate(io);
        }
    } catch (const pipeline::StageFailure& e) {
        spdlog::error("{}", e.what());
        std::cerr << "mofuse status=error exit=" << exit_code(e.kind()) << " kind=" << to_string(e.kind())
                  << " stage=" << e.stage() << " message=" << quoted(e.what()) << "\n";
        return exit_code(e.kind());
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        std::cerr << "mofuse status=error exit=" << exit_code(e.kind()) << " kind=" << to_string(e.kind())
                  << " stage=" << stage_name << " message=" << quoted(e.what()) << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        std::cerr << "mofuse status=error exit=3 kind=data stage=" << stage_name << " message=" << quoted(e.what())
                  << "\n";
        return 3;
    }
    std::cerr << "mofuse status=ok exit=0 stage=" << stage_name << "\n";
    return 0;
}
