#ifndef MOFUSE_GAN_HPP
#define MOFUSE_GAN_HPP

#include "mofuse/autoencoder.hpp"
#include "mofuse/nn/adam.hpp"
#include "mofuse/nn/layer.hpp"
#include "mofuse/nn/rng.hpp"

#include <vector>

/**
 * @file gan.hpp
 *
 * @brief Minority-class oversampling with a small dense GAN.
 *
 * The generator (noise -> 128 ReLU -> sigmoid) and the discriminator
 * (sample -> 128 ReLU -> 1 sigmoid) are trained by alternating updates:
 *
 * - discriminator: L_D = -(log D(x) + log(1 - D(G(z)))), batch-averaged
 * - generator:     L_G = -log D(G(z)), batch-averaged, D frozen
 *
 * Because the generator ends in a sigmoid, it works in a per-column
 * min-max normalized copy of the latent space and synthetic rows are mapped
 * back through the recorded inverse.
 */

namespace mofuse::gan {

struct GanConfig {
    std::size_t noise_dim = 32;
    std::size_t hidden = 128;
    std::size_t steps = 2000;
    std::size_t batch_size = 32;
    std::size_t d_steps_per_g_step = 1;
    double learning_rate = 2e-4;

    void validate() const;
};

struct LossPoint {
    double discriminator = 0.0;
    double generator = 0.0;
};

struct GanModel {
    nn::Network generator;
    nn::Network discriminator;
    std::size_t noise_dim = 0;
    std::vector<LossPoint> history;

    std::size_t data_width() const noexcept { return generator.back().outputs(); }
};

/// Fresh networks for `data_width`-wide samples.
GanModel make_gan(std::size_t data_width, const GanConfig& config, nn::Rng& rng);

/// Optimizer state for both players.
struct GanOptimizers {
    nn::AdamState discriminator;
    nn::AdamState generator;

    GanOptimizers() = default;
    GanOptimizers(const GanModel& model, double learning_rate);
};

struct StepGradients {
    double loss = 0.0;
    nn::Gradients grads;
};

/// L_D and its gradient for the discriminator parameters.
StepGradients discriminator_gradients(const GanModel& model, const nn::Matrix& real, const nn::Matrix& fake);

/// L_G and its gradient for the generator parameters, back-propagated through the frozen discriminator.
StepGradients generator_gradients(const GanModel& model, const nn::Matrix& noise);

/// One Adam update of the discriminator; the generator is untouched. Returns L_D before the update.
double discriminator_step(GanModel& model, GanOptimizers& opt, const nn::Matrix& real, const nn::Matrix& fake);

/// One Adam update of the generator; the discriminator is untouched. Returns L_G before the update.
double generator_step(GanModel& model, GanOptimizers& opt, const nn::Matrix& noise);

nn::Matrix generate(const GanModel& model, std::size_t count, nn::Rng& rng);

/**
 * Alternating training on rows already normalized into [0, 1]:
 * `d_steps_per_g_step` discriminator updates then one generator update,
 * `steps` times. Minibatches are min(batch_size, rows) real rows drawn
 * without replacement.
 */
GanModel train_gan(const nn::Matrix& minority01, const GanConfig& config, nn::Rng& rng);

/// Per-column min-max normalizer for latent rows (same rules as the autoencoder scaler).
using LatentNormalizer = ae::MinMaxScaler;

LatentNormalizer fit_latent_normalizer(const nn::Matrix& minority_rows);

struct LabeledRows {
    nn::Matrix x;
    std::vector<int> y;
    std::vector<bool> synthetic;

    std::size_t count(int label) const;
};

/**
 * Appends generated minority rows until both classes have equal counts.
 * Original rows are kept first and bit-identical; synthetic rows are
 * flagged. A balanced input comes back unchanged.
 */
LabeledRows oversample_to_balance(const nn::Matrix& rows, const std::vector<int>& labels, const GanModel& model,
                                  const LatentNormalizer& normalizer, nn::Rng& rng);

}  // namespace mofuse::gan

#endif
