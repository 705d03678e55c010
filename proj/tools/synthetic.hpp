#ifndef MOFUSE_TOOLS_SYNTHETIC_HPP
#define MOFUSE_TOOLS_SYNTHETIC_HPP

#include <cstdint>
#include <filesystem>
#include <string>

namespace mofuse::synth {

/**
 * Seeded three-matrix dataset with a planted minority signature.
 *
 * expression: log-normal counts, features in rows, a few missing cells, one
 * mostly-missing feature and some names that are not gene symbols.
 * methylation: beta values near a low baseline, samples in rows.
 * cna: copy-number log ratios centred on zero.
 *
 * In each matrix `informative` features shift in minority samples; the rest
 * are class-independent noise. Each minority sample carries one activation
 * drawn from U(penetrance_floor, 1) that scales its shift in every matrix,
 * so weakly activated cases overlap the majority class.
 */
struct SyntheticSpec {
    std::size_t samples = 300;
    std::size_t minority = 30;
    std::size_t features = 500;
    std::size_t informative = 20;
    /// Scales every planted class difference.
    double effect = 1.0;
    double penetrance_floor = 0.0;
    /// Scales the per-feature noise of all three matrices.
    double noise = 1.0;
    std::uint64_t seed = 20240601;
    std::string positive_class = "Relapse";
    std::string negative_class = "NoRelapse";
};

/// Writes expression.tsv, methylation.tsv, cna.tsv, labels.tsv and config.ini; returns the config path.
std::filesystem::path write_synthetic(const std::filesystem::path& dir, const SyntheticSpec& spec);

}  // namespace mofuse::synth

#endif
