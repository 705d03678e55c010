#ifndef MOFUSE_PIPELINE_HPP
#define MOFUSE_PIPELINE_HPP

#include "mofuse/config.hpp"
#include "mofuse/error.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

/**
 * @file pipeline.hpp
 *
 * @brief Stage runners and the end-to-end driver.
 *
 * Stages communicate only through files. Each one looks up its inputs in the
 * `--in` directories (in order) and then in its own output directory, so a
 * run can live in one directory or be spread across several.
 *
 *   select      run.ini, split.tsv, selected_<m>.tsv, selection_<m>.tsv
 *   train-ae    ae_<m>.ckpt, ae_<m>_loss.tsv
 *   fuse        latent.tsv
 *   oversample  gan.ckpt, gan_loss.tsv, augmented.tsv
 *   train-clf   classifier.ckpt, classifier_loss.tsv
 *   evaluate    report.json, roc.tsv, roc.svg
 *
 * Every stage also rewrites manifest.json with its own entry.
 */

namespace mofuse::pipeline {

/// Stage errors keep their original kind and gain the stage name.
class StageFailure : public Error {
public:
    StageFailure(std::string stage, const Error& cause)
        : Error(cause.kind(), "stage " + stage + ": " + cause.what()), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

struct StageIO {
    std::vector<std::filesystem::path> inputs;
    std::filesystem::path out;
};

inline constexpr const char* report_schema = "mofuse.eval_report";
inline constexpr int report_schema_version = 1;

// Sub-stream ids derived from the run seed.
namespace streams {
inline constexpr std::uint64_t split = 1;
inline constexpr std::uint64_t autoencoder_base = 2;  // + matrix index
inline constexpr std::uint64_t gan_training = 100;
inline constexpr std::uint64_t gan_sampling = 101;
inline constexpr std::uint64_t classifier = 200;
}  // namespace streams

/// Loads matrices and labels, splits, selects features on training rows.
void stage_select(const PipelineConfig& config, const std::filesystem::path& out);
void stage_train_ae(const StageIO& io);
void stage_fuse(const StageIO& io);
void stage_oversample(const StageIO& io);
void stage_train_clf(const StageIO& io);
void stage_evaluate(const StageIO& io);

/// All six stages into `out`; returns the report JSON text.
std::string run_pipeline(const PipelineConfig& config, const std::filesystem::path& out);

/// Hash of sample IDs in sorted order, so row order never matters.
std::string id_set_hash(std::vector<std::string> ids);

/**
 * Compares every recorded fitted-ID hash in a manifest against the training
 * (or minority training) ID hash. Returns a description of each mismatch.
 */
std::vector<std::string> leakage_violations(const std::filesystem::path& manifest_path);

/// Exclusive claim on an output directory, held for the object's lifetime.
class DirectoryLock {
public:
    explicit DirectoryLock(const std::filesystem::path& dir);
    ~DirectoryLock();
    DirectoryLock(const DirectoryLock&) = delete;
    DirectoryLock& operator=(const DirectoryLock&) = delete;

private:
    std::filesystem::path path_;
};

}  // namespace mofuse::pipeline

#endif
