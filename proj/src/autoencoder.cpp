#include "mofuse/autoencoder.hpp"

#include "mofuse/error.hpp"
#include "mofuse/nn/adam.hpp"
#include "mofuse/nn/loss.hpp"

#include <algorithm>
#include <cmath>

namespace mofuse::ae {

MinMaxScaler MinMaxScaler::fit(const nn::Matrix& m) {
    if (m.rows() == 0) {
        throw DataError("cannot fit a min-max scaler on zero rows");
    }
    MinMaxScaler s;
    s.min.assign(m.cols(), 0.0);
    s.max.assign(m.cols(), 0.0);
    for (std::size_t c = 0; c < m.cols(); ++c) {
        double lo = m(0, c);
        double hi = m(0, c);
        for (std::size_t r = 1; r < m.rows(); ++r) {
            lo = std::min(lo, m(r, c));
            hi = std::max(hi, m(r, c));
        }
        s.min[c] = lo;
        s.max[c] = hi;
    }
    return s;
}

nn::Matrix MinMaxScaler::apply(const nn::Matrix& m) const {
    if (m.cols() != width()) {
        throw DimensionError("scaler fitted on " + std::to_string(width()) + " columns, got " + m.shape_string());
    }
    nn::Matrix out = m;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = out.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) {
            const double span = max[c] - min[c];
            row[c] = span > 0.0 ? std::clamp((row[c] - min[c]) / span, 0.0, 1.0) : 0.5;
        }
    }
    return out;
}

nn::Matrix MinMaxScaler::invert(const nn::Matrix& m) const {
    if (m.cols() != width()) {
        throw DimensionError("scaler fitted on " + std::to_string(width()) + " columns, got " + m.shape_string());
    }
    nn::Matrix out = m;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = out.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) {
            const double span = max[c] - min[c];
            row[c] = span > 0.0 ? min[c] + row[c] * span : min[c];
        }
    }
    return out;
}

namespace {

// Encoder units start active on every training row; decoder outputs start at the column means.
void start_in_range(nn::DenseLayer& encoder, nn::DenseLayer& decoder, const nn::Matrix& x) {
    const auto pre = nn::dense_affine(encoder, x);
    for (std::size_t j = 0; j < encoder.outputs(); ++j) {
        const auto col = pre.column(j);
        encoder.biases[j] = 0.01 - *std::min_element(col.begin(), col.end());
    }
    const auto out = nn::dense_affine(decoder, nn::dense_forward(encoder, x));
    const double n = static_cast<double>(x.rows());
    for (std::size_t c = 0; c < decoder.outputs(); ++c) {
        double mean = 0.0;
        double pre_mean = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) {
            mean += x(r, c);
            pre_mean += out(r, c);
        }
        mean = std::clamp(mean / n, 1e-3, 1.0 - 1e-3);
        decoder.biases[c] = std::log(mean / (1.0 - mean)) - pre_mean / n;
    }
}

}  // namespace

TrainedAutoencoder train_autoencoder(const nn::Matrix& matrix01, const TrainOptions& options, nn::Rng& rng) {
    const std::size_t features = matrix01.cols();
    if (options.latent_dim == 0 || options.latent_dim >= features) {
        throw ConfigError("autoencoder latent_dim (" + std::to_string(options.latent_dim) +
                          ") must be in [1, feature count " + std::to_string(features) + ")");
    }
    if (options.epochs == 0) {
        throw ConfigError("autoencoder epochs must be >= 1");
    }
    if (options.batch_size == 0) {
        throw ConfigError("autoencoder batch_size must be >= 1");
    }
    if (matrix01.rows() == 0) {
        throw DataError("autoencoder: no training rows");
    }
    for (double v : matrix01.data()) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw DataError("autoencoder input must be scaled into [0, 1]");
        }
    }

    nn::Network net{nn::DenseLayer::initialized(features, options.latent_dim, nn::Activation::ReLU, rng),
                    nn::DenseLayer::initialized(options.latent_dim, features, nn::Activation::Identity, rng)};
    net[1].activation = nn::Activation::Sigmoid;
    start_in_range(net[0], net[1], matrix01);
    nn::AdamState adam(nn::parameter_count(net), {.learning_rate = options.learning_rate});

    TrainedAutoencoder out;
    const std::size_t n = matrix01.rows();
    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        const auto order = nn::permutation(rng, n);
        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < n; start += options.batch_size) {
            const std::size_t end = std::min(n, start + options.batch_size);
            std::span<const std::size_t> idx(order.data() + start, end - start);
            const auto batch = nn::select_rows(matrix01, idx);
            const auto cache = nn::forward_cached(net, batch);
            const auto loss = nn::mse_loss(batch, cache.output);
            const auto grads = nn::backward(net, cache, loss.grad);
            nn::adam_step(net, grads, adam);
            loss_sum += loss.value;
            ++batches;
        }
        const double epoch_loss = loss_sum / static_cast<double>(batches);
        if (!std::isfinite(epoch_loss)) {
            throw NumericError("autoencoder loss became non-finite at epoch " + std::to_string(epoch + 1));
        }
        out.loss_trace.push_back(epoch_loss);
    }
    out.model.encoder = std::move(net[0]);
    out.model.decoder = std::move(net[1]);
    return out;
}

TrainedAutoencoder fit_autoencoder(const nn::Matrix& raw, const TrainOptions& options, nn::Rng& rng) {
    auto scaler = MinMaxScaler::fit(raw);
    auto trained = train_autoencoder(scaler.apply(raw), options, rng);
    trained.model.scaler = std::move(scaler);
    return trained;
}

nn::Matrix encode(const AutoencoderModel& model, const nn::Matrix& matrix01) {
    return nn::dense_forward(model.encoder, matrix01);
}

nn::Matrix encode_raw(const AutoencoderModel& model, const nn::Matrix& raw) {
    if (model.scaler.width() == 0) {
        return encode(model, raw);
    }
    return encode(model, model.scaler.apply(raw));
}

nn::Matrix decode(const AutoencoderModel& model, const nn::Matrix& latent) {
    return nn::dense_forward(model.decoder, latent);
}

double reconstruction_mse(const AutoencoderModel& model, const nn::Matrix& matrix01) {
    return nn::mse_loss(matrix01, decode(model, encode(model, matrix01))).value;
}

std::vector<std::string> SharedLatent::column_names() const {
    std::vector<std::string> names;
    for (const auto& b : blocks) {
        for (std::size_t i = 0; i < b.values.cols(); ++i) {
            names.push_back(b.kind + "_" + std::to_string(i));
        }
    }
    return names;
}

SharedLatent fuse_latents(std::vector<LatentBlock> blocks) {
    if (blocks.empty()) {
        throw DataError("fuse_latents: no latent blocks");
    }
    SharedLatent out;
    out.sample_ids = blocks.front().sample_ids;
    std::vector<nn::Matrix> parts;
    for (const auto& b : blocks) {
        if (b.sample_ids != out.sample_ids) {
            throw DataError("fuse_latents: block '" + b.kind + "' is not aligned with block '" +
                            blocks.front().kind + "'");
        }
        if (b.values.rows() != b.sample_ids.size()) {
            throw DimensionError("fuse_latents: block '" + b.kind + "' has " + b.values.shape_string() + " for " +
                                 std::to_string(b.sample_ids.size()) + " samples");
        }
        parts.push_back(b.values);
    }
    out.fused = nn::hstack(parts);
    out.blocks = std::move(blocks);
    return out;
}

}  // namespace mofuse::ae
