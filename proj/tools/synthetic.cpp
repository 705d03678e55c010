#include "synthetic.hpp"

#include "mofuse/error.hpp"
#include "mofuse/ingest.hpp"
#include "mofuse/nn/rng.hpp"
#include "mofuse/tsv.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace mofuse::synth {

namespace fs = std::filesystem;

namespace {

double round4(double v) {
    return std::round(v * 1e4) / 1e4;
}

std::string numbered(const char* prefix, std::size_t i, int width) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
    return buf;
}

/// Informative columns, spread over the feature range.
std::vector<bool> informative_mask(std::size_t features, std::size_t informative, nn::Rng& rng) {
    std::vector<bool> mask(features, false);
    auto order = nn::permutation(rng, features);
    for (std::size_t i = 0; i < informative && i < features; ++i) mask[order[i]] = true;
    return mask;
}

ingest::FeatureMatrix blank(const std::string& kind, const std::vector<std::string>& ids, std::size_t features,
                            const char* prefix) {
    ingest::FeatureMatrix m;
    m.kind = kind;
    m.sample_ids = ids;
    for (std::size_t f = 0; f < features; ++f) m.feature_names.push_back(numbered(prefix, f + 1, 1));
    m.values = nn::Matrix(ids.size(), features);
    return m;
}

ingest::FeatureMatrix expression(const std::vector<std::string>& ids, const std::vector<double>& act,
                                 const SyntheticSpec& spec, nn::Rng& rng) {
    auto m = blank("expression", ids, spec.features, "GENE");
    const auto mask = informative_mask(spec.features, spec.informative, rng);
    std::size_t renamed = 0;
    for (std::size_t f = 0; f < spec.features; ++f) {
        const double mu = rng.uniform(2.0, 4.0);
        double shift = 0.0;
        if (mask[f]) {
            shift = (rng.uniform() < 0.5 ? 1.0 : -1.0) * spec.effect * rng.uniform(2.0, 3.0) * std::log(2.0);
        } else if (renamed < 6 && rng.uniform() < 0.02) {
            m.feature_names[f] = numbered(renamed % 2 ? "hsa-mir-" : "loc", 100 + f, 1);
            ++renamed;
        }
        for (std::size_t s = 0; s < ids.size(); ++s) {
            m.values(s, f) = round4(std::exp(mu + spec.noise * 0.5 * rng.normal() + act[s] * shift));
        }
    }
    for (std::size_t s = 0; s < ids.size(); ++s) {
        for (std::size_t f = 0; f < spec.features; ++f) {
            if (rng.uniform() < 0.002) m.values(s, f) = std::numeric_limits<double>::quiet_NaN();
        }
    }
    // One probe that is mostly missing and gets dropped on load.
    const std::size_t sparse = spec.features - 1;
    if (!mask[sparse]) {
        for (std::size_t s = 0; s < ids.size(); s += 3) m.values(s, sparse) = std::numeric_limits<double>::quiet_NaN();
    }
    return m;
}

ingest::FeatureMatrix methylation(const std::vector<std::string>& ids, const std::vector<double>& act,
                                  const SyntheticSpec& spec, nn::Rng& rng) {
    auto m = blank("methylation", ids, spec.features, "cg");
    const auto mask = informative_mask(spec.features, spec.informative, rng);
    for (std::size_t f = 0; f < spec.features; ++f) {
        const double base = rng.uniform(0.05, 0.2);
        const double gain = mask[f] ? spec.effect * 3.0 : 0.0;
        for (std::size_t s = 0; s < ids.size(); ++s) {
            const double mean = base * (1.0 + act[s] * gain);
            m.values(s, f) = round4(std::clamp(mean + spec.noise * 0.05 * rng.normal(), 0.001, 0.999));
        }
    }
    return m;
}

ingest::FeatureMatrix copy_number(const std::vector<std::string>& ids, const std::vector<double>& act,
                                  const SyntheticSpec& spec, nn::Rng& rng) {
    auto m = blank("cna", ids, spec.features, "SEG");
    const auto mask = informative_mask(spec.features, spec.informative, rng);
    for (std::size_t f = 0; f < spec.features; ++f) {
        const double shift = mask[f] ? (rng.uniform() < 0.5 ? 1.0 : -1.0) * spec.effect * 0.9 : 0.0;
        for (std::size_t s = 0; s < ids.size(); ++s) {
            m.values(s, f) = round4(spec.noise * 0.3 * rng.normal() + act[s] * shift);
        }
    }
    return m;
}

}  // namespace

fs::path write_synthetic(const fs::path& dir, const SyntheticSpec& spec) {
    if (spec.minority == 0 || spec.minority >= spec.samples || spec.informative > spec.features) {
        throw ConfigError("synthetic: need 0 < minority < samples and informative <= features");
    }
    nn::Rng root(spec.seed);
    auto label_rng = root.split(1);
    std::vector<std::string> ids;
    for (std::size_t s = 0; s < spec.samples; ++s) ids.push_back(numbered("S", s + 1, 4));
    std::vector<int> y(spec.samples, 0);
    const auto order = nn::permutation(label_rng, spec.samples);
    std::vector<double> act(spec.samples, 0.0);
    for (std::size_t i = 0; i < spec.minority; ++i) {
        y[order[i]] = 1;
        act[order[i]] = label_rng.uniform(spec.penetrance_floor, 1.0);
    }

    auto expr_rng = root.split(2);
    auto meth_rng = root.split(3);
    auto cna_rng = root.split(4);
    fs::create_directories(dir);
    ingest::write_matrix(dir / "expression.tsv", expression(ids, act, spec, expr_rng),
                         ingest::Orientation::FeaturesInRows);
    ingest::write_matrix(dir / "methylation.tsv", methylation(ids, act, spec, meth_rng),
                         ingest::Orientation::SamplesInRows);
    ingest::write_matrix(dir / "cna.tsv", copy_number(ids, act, spec, cna_rng), ingest::Orientation::FeaturesInRows);

    // Labels listed in a different order than the matrices.
    std::string labels = "sample_id\toutcome\n";
    for (std::size_t s = spec.samples; s-- > 0;) {
        labels += ids[s] + '\t' + (y[s] == 1 ? spec.positive_class : spec.negative_class) + '\n';
    }
    tsv::write_file(dir / "labels.tsv", labels);

    const std::string config = "[data]\n"
                               "labels = labels.tsv\n"
                               "positive_class = " + spec.positive_class + "\n"
                               "\n"
                               "[matrix:expression]\n"
                               "path = expression.tsv\n"
                               "validate_symbols = true\n"
                               "\n"
                               "[matrix:methylation]\n"
                               "path = methylation.tsv\n"
                               "orientation = samples_in_rows\n"
                               "\n"
                               "[matrix:cna]\n"
                               "path = cna.tsv\n"
                               "\n"
                               "[run]\n"
                               "out = out\n";
    tsv::write_file(dir / "config.ini", config);
    return dir / "config.ini";
}

}  // namespace mofuse::synth
