#include "mofuse/classifier.hpp"

#include "mofuse/error.hpp"
#include "mofuse/nn/adam.hpp"
#include "mofuse/nn/loss.hpp"

#include <algorithm>
#include <cmath>

namespace mofuse::clf {

void ClassifierConfig::validate() const {
    if (hidden == 0 || epochs == 0 || batch_size == 0) {
        throw ConfigError("classifier hidden, epochs and batch_size must be >= 1");
    }
    if (!(validation_split >= 0.0 && validation_split < 1.0)) {
        throw ConfigError("classifier validation_split must lie in [0, 1)");
    }
    if (!(learning_rate > 0.0)) {
        throw ConfigError("classifier learning rate must be positive");
    }
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw ConfigError("classifier threshold must lie in [0, 1]");
    }
}

ClassifierModel make_classifier(std::size_t input_dim, const ClassifierConfig& config, nn::Rng& rng) {
    config.validate();
    ClassifierModel model;
    model.threshold = config.threshold;
    model.net = {
        nn::DenseLayer::initialized(input_dim, config.hidden, nn::Activation::ReLU, rng),
        nn::DenseLayer::initialized(config.hidden, 1, nn::Activation::Sigmoid, rng),
    };
    return model;
}

namespace {

nn::Matrix label_column(const std::vector<int>& y, std::span<const std::size_t> idx) {
    nn::Matrix out(idx.size(), 1);
    for (std::size_t i = 0; i < idx.size(); ++i) out(i, 0) = static_cast<double>(y[idx[i]]);
    return out;
}

}  // namespace

TrainedClassifier train_classifier(const nn::Matrix& x, const std::vector<int>& y, const ClassifierConfig& config,
                                   nn::Rng& rng) {
    config.validate();
    if (x.rows() != y.size()) {
        throw DimensionError("train_classifier: " + x.shape_string() + " rows but " + std::to_string(y.size()) +
                             " labels");
    }
    for (int label : y) {
        if (label != 0 && label != 1) throw DataError("train_classifier: labels must be 0 or 1");
    }
    if (std::count(y.begin(), y.end(), 1) == 0 || std::count(y.begin(), y.end(), 0) == 0) {
        throw DataError("train_classifier: training rows contain a single class");
    }

    TrainedClassifier out;
    out.model = make_classifier(x.cols(), config, rng);
    nn::AdamState adam(nn::parameter_count(out.model.net), {.learning_rate = config.learning_rate});

    const auto order = nn::permutation(rng, x.rows());
    const auto n_val = static_cast<std::size_t>(std::floor(config.validation_split * static_cast<double>(x.rows())));
    const std::size_t n_train = x.rows() - n_val;
    if (n_train == 0) {
        throw DataError("train_classifier: validation split leaves no training rows");
    }
    std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    const std::vector<std::size_t> val_idx(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    out.train_rows = n_train;
    out.validation_rows = n_val;

    const auto x_val = nn::select_rows(x, val_idx);
    const auto y_val = label_column(y, val_idx);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        nn::shuffle(rng, train_idx);
        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < n_train; start += config.batch_size) {
            const std::size_t end = std::min(n_train, start + config.batch_size);
            std::span<const std::size_t> idx(train_idx.data() + start, end - start);
            const auto xb = nn::select_rows(x, idx);
            const auto yb = label_column(y, idx);
            const auto cache = nn::forward_cached(out.model.net, xb);
            const auto loss = nn::bce_loss(cache.output, yb);
            nn::adam_step(out.model.net, nn::backward(out.model.net, cache, loss.grad), adam);
            loss_sum += loss.value;
            ++batches;
        }
        const double epoch_loss = loss_sum / static_cast<double>(batches);
        if (!std::isfinite(epoch_loss)) {
            throw NumericError("classifier loss became non-finite at epoch " + std::to_string(epoch + 1));
        }
        out.train_loss.push_back(epoch_loss);
        if (n_val > 0) {
            out.validation_loss.push_back(nn::bce_loss(nn::forward(out.model.net, x_val), y_val).value);
        }
    }
    return out;
}

std::vector<double> predict_proba(const ClassifierModel& model, const nn::Matrix& x) {
    if (model.net.empty() || x.cols() != model.input_dim()) {
        throw DimensionError("classifier expects width " + std::to_string(model.net.empty() ? 0 : model.input_dim()) +
                             ", got " + x.shape_string());
    }
    const auto out = nn::forward(model.net, x);
    return {out.data().begin(), out.data().end()};
}

std::vector<int> predict_label(const ClassifierModel& model, const nn::Matrix& x) {
    const auto p = predict_proba(model, x);
    std::vector<int> labels(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) labels[i] = p[i] >= model.threshold ? 1 : 0;
    return labels;
}

}  // namespace mofuse::clf
