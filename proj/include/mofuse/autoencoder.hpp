#ifndef MOFUSE_AUTOENCODER_HPP
#define MOFUSE_AUTOENCODER_HPP

#include "mofuse/nn/layer.hpp"
#include "mofuse/nn/matrix.hpp"
#include "mofuse/nn/rng.hpp"

#include <string>
#include <vector>

namespace mofuse::ae {

/**
 * Per-column affine map onto [0, 1] fitted on training rows.
 *
 * Columns with max == min map to 0.5. Values outside the fitted range are
 * clipped, so held-out rows also land in [0, 1].
 */
struct MinMaxScaler {
    std::vector<double> min;
    std::vector<double> max;

    static MinMaxScaler fit(const nn::Matrix& m);

    std::size_t width() const noexcept { return min.size(); }
    nn::Matrix apply(const nn::Matrix& m) const;
    /// Maps [0, 1] values back to the fitted scale.
    nn::Matrix invert(const nn::Matrix& m) const;

    bool operator==(const MinMaxScaler&) const = default;
};

/// Single hidden layer autoencoder: ReLU encoder, sigmoid decoder.
struct AutoencoderModel {
    nn::DenseLayer encoder;
    nn::DenseLayer decoder;
    /// Empty when the model was trained on data already in [0, 1].
    MinMaxScaler scaler;

    std::size_t latent_dim() const noexcept { return encoder.outputs(); }
    std::size_t input_dim() const noexcept { return encoder.inputs(); }

    bool operator==(const AutoencoderModel&) const = default;
};

struct TrainOptions {
    std::size_t epochs = 100;
    std::size_t batch_size = 32;
    double learning_rate = 1e-3;
    std::size_t latent_dim = 64;
};

struct TrainedAutoencoder {
    AutoencoderModel model;
    /// Mean minibatch MSE per epoch.
    std::vector<double> loss_trace;
};

/**
 * Minibatch Adam on the reconstruction MSE. Rows are reshuffled every epoch.
 * `matrix01` must already be scaled into [0, 1]; `options.latent_dim` must be
 * smaller than the feature count.
 */
TrainedAutoencoder train_autoencoder(const nn::Matrix& matrix01, const TrainOptions& options, nn::Rng& rng);

/// Fits the scaler on `raw`, then trains on the scaled rows.
TrainedAutoencoder fit_autoencoder(const nn::Matrix& raw, const TrainOptions& options, nn::Rng& rng);

/// Latent codes for rows already in [0, 1]; every entry is >= 0.
nn::Matrix encode(const AutoencoderModel& model, const nn::Matrix& matrix01);

/// Latent codes for rows on the original scale (applies the stored scaler first).
nn::Matrix encode_raw(const AutoencoderModel& model, const nn::Matrix& raw);

nn::Matrix decode(const AutoencoderModel& model, const nn::Matrix& latent);

double reconstruction_mse(const AutoencoderModel& model, const nn::Matrix& matrix01);

struct LatentBlock {
    std::string kind;
    std::vector<std::string> sample_ids;
    nn::Matrix values;
};

struct SharedLatent {
    std::vector<std::string> sample_ids;
    std::vector<LatentBlock> blocks;
    nn::Matrix fused;

    /// "<kind>_<index>" for every fused column.
    std::vector<std::string> column_names() const;
};

/// Column-wise concatenation in the given order; sample IDs must agree position-wise.
SharedLatent fuse_latents(std::vector<LatentBlock> blocks);

}  // namespace mofuse::ae

#endif
