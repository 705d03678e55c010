#include "mofuse/gan.hpp"

#include "mofuse/error.hpp"
#include "mofuse/nn/loss.hpp"

#include <algorithm>
#include <cmath>

namespace mofuse::gan {

void GanConfig::validate() const {
    if (noise_dim == 0 || hidden == 0 || steps == 0 || batch_size == 0 || d_steps_per_g_step == 0) {
        throw ConfigError("GAN noise_dim, hidden, steps, batch_size and d_steps must all be >= 1");
    }
    if (!(learning_rate > 0.0)) {
        throw ConfigError("GAN learning rate must be positive");
    }
}

GanModel make_gan(std::size_t data_width, const GanConfig& config, nn::Rng& rng) {
    config.validate();
    if (data_width == 0) {
        throw DimensionError("GAN data width must be >= 1");
    }
    GanModel model;
    model.noise_dim = config.noise_dim;
    model.generator = {
        nn::DenseLayer::initialized(config.noise_dim, config.hidden, nn::Activation::ReLU, rng),
        nn::DenseLayer::initialized(config.hidden, data_width, nn::Activation::Sigmoid, rng),
    };
    model.discriminator = {
        nn::DenseLayer::initialized(data_width, config.hidden, nn::Activation::ReLU, rng),
        nn::DenseLayer::initialized(config.hidden, 1, nn::Activation::Sigmoid, rng),
    };
    return model;
}

GanOptimizers::GanOptimizers(const GanModel& model, double learning_rate)
    : discriminator(nn::parameter_count(model.discriminator), {.learning_rate = learning_rate}),
      generator(nn::parameter_count(model.generator), {.learning_rate = learning_rate}) {}

namespace {

void require_width(const nn::Matrix& m, std::size_t width, const char* what) {
    if (m.cols() != width) {
        throw DimensionError(std::string(what) + " batch " + m.shape_string() + " but expected width " +
                             std::to_string(width));
    }
}

void add_into(nn::Gradients& acc, const nn::Gradients& g) {
    for (std::size_t l = 0; l < acc.layers.size(); ++l) {
        auto dst = acc.layers[l].weights.data();
        auto src = g.layers[l].weights.data();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
        for (std::size_t i = 0; i < acc.layers[l].biases.size(); ++i) {
            acc.layers[l].biases[i] += g.layers[l].biases[i];
        }
    }
}

}  // namespace

StepGradients discriminator_gradients(const GanModel& model, const nn::Matrix& real, const nn::Matrix& fake) {
    const std::size_t width = model.discriminator.front().inputs();
    require_width(real, width, "real");
    require_width(fake, width, "fake");

    // Each term is a batch mean, so L_D = BCE(D(x), 1) + BCE(D(x_hat), 0).
    const auto real_cache = nn::forward_cached(model.discriminator, real);
    const auto real_loss = nn::bce_loss(real_cache.output, nn::Matrix(real.rows(), 1, 1.0));
    const auto fake_cache = nn::forward_cached(model.discriminator, fake);
    const auto fake_loss = nn::bce_loss(fake_cache.output, nn::Matrix(fake.rows(), 1, 0.0));

    StepGradients out;
    out.loss = real_loss.value + fake_loss.value;
    out.grads = nn::backward(model.discriminator, real_cache, real_loss.grad);
    add_into(out.grads, nn::backward(model.discriminator, fake_cache, fake_loss.grad));
    return out;
}

StepGradients generator_gradients(const GanModel& model, const nn::Matrix& noise) {
    require_width(noise, model.noise_dim, "noise");
    const auto gen_cache = nn::forward_cached(model.generator, noise);
    const auto disc_cache = nn::forward_cached(model.discriminator, gen_cache.output);
    const auto loss = nn::bce_loss(disc_cache.output, nn::Matrix(noise.rows(), 1, 1.0));
    const auto through_disc = nn::backward(model.discriminator, disc_cache, loss.grad);

    StepGradients out;
    out.loss = loss.value;
    out.grads = nn::backward(model.generator, gen_cache, through_disc.input);
    return out;
}

double discriminator_step(GanModel& model, GanOptimizers& opt, const nn::Matrix& real, const nn::Matrix& fake) {
    auto step = discriminator_gradients(model, real, fake);
    nn::adam_step(model.discriminator, step.grads, opt.discriminator);
    return step.loss;
}

double generator_step(GanModel& model, GanOptimizers& opt, const nn::Matrix& noise) {
    auto step = generator_gradients(model, noise);
    nn::adam_step(model.generator, step.grads, opt.generator);
    return step.loss;
}

nn::Matrix generate(const GanModel& model, std::size_t count, nn::Rng& rng) {
    return nn::forward(model.generator, nn::standard_normal(rng, count, model.noise_dim));
}

GanModel train_gan(const nn::Matrix& minority01, const GanConfig& config, nn::Rng& rng) {
    config.validate();
    if (minority01.rows() < 2) {
        throw DataError("GAN training needs at least 2 minority rows, got " + std::to_string(minority01.rows()));
    }
    for (double v : minority01.data()) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw DataError("GAN training rows must be normalized into [0, 1]");
        }
    }

    GanModel model = make_gan(minority01.cols(), config, rng);
    GanOptimizers opt(model, config.learning_rate);
    const std::size_t batch = std::min(config.batch_size, minority01.rows());
    std::vector<std::size_t> pool(minority01.rows());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;

    model.history.reserve(config.steps);
    for (std::size_t step = 0; step < config.steps; ++step) {
        LossPoint point;
        for (std::size_t k = 0; k < config.d_steps_per_g_step; ++k) {
            // Partial Fisher-Yates: the first `batch` slots become the sample.
            for (std::size_t i = 0; i < batch; ++i) {
                const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
                std::swap(pool[i], pool[j]);
            }
            const auto real = nn::select_rows(minority01, std::span<const std::size_t>(pool.data(), batch));
            const auto fake = generate(model, batch, rng);
            point.discriminator = discriminator_step(model, opt, real, fake);
        }
        point.generator = generator_step(model, opt, nn::standard_normal(rng, batch, model.noise_dim));
        if (!std::isfinite(point.discriminator) || !std::isfinite(point.generator)) {
            throw NumericError("GAN loss became non-finite at step " + std::to_string(step + 1));
        }
        model.history.push_back(point);
    }
    return model;
}

LatentNormalizer fit_latent_normalizer(const nn::Matrix& minority_rows) {
    return LatentNormalizer::fit(minority_rows);
}

std::size_t LabeledRows::count(int label) const {
    return static_cast<std::size_t>(std::count(y.begin(), y.end(), label));
}

LabeledRows oversample_to_balance(const nn::Matrix& rows, const std::vector<int>& labels, const GanModel& model,
                                  const LatentNormalizer& normalizer, nn::Rng& rng) {
    if (rows.rows() != labels.size()) {
        throw DimensionError("oversample: " + rows.shape_string() + " rows but " + std::to_string(labels.size()) +
                             " labels");
    }
    if (model.data_width() != rows.cols() || normalizer.width() != rows.cols()) {
        throw DimensionError("oversample: GAN width " + std::to_string(model.data_width()) + ", normalizer width " +
                             std::to_string(normalizer.width()) + ", rows " + rows.shape_string());
    }
    LabeledRows out;
    out.x = rows;
    out.y = labels;
    out.synthetic.assign(labels.size(), false);

    const std::size_t n1 = out.count(1);
    const std::size_t n0 = out.count(0);
    if (n1 == n0) {
        return out;
    }
    const int minority = n1 < n0 ? 1 : 0;
    const std::size_t deficit = n1 < n0 ? n0 - n1 : n1 - n0;

    const auto synthetic = normalizer.invert(generate(model, deficit, rng));
    nn::require_finite(synthetic, "generated samples");
    const std::vector<nn::Matrix> parts{out.x, synthetic};
    out.x = nn::vstack(parts);
    out.y.insert(out.y.end(), deficit, minority);
    out.synthetic.insert(out.synthetic.end(), deficit, true);
    return out;
}

}  // namespace mofuse::gan
