#ifndef MOFUSE_CLASSIFIER_HPP
#define MOFUSE_CLASSIFIER_HPP

#include "mofuse/nn/layer.hpp"
#include "mofuse/nn/matrix.hpp"
#include "mofuse/nn/rng.hpp"

#include <vector>

namespace mofuse::clf {

struct ClassifierConfig {
    std::size_t hidden = 128;
    std::size_t epochs = 10;
    std::size_t batch_size = 32;
    double validation_split = 0.2;
    double learning_rate = 1e-3;
    double threshold = 0.5;

    void validate() const;
};

/// Dense(hidden, ReLU) -> Dense(1, sigmoid).
struct ClassifierModel {
    nn::Network net;
    double threshold = 0.5;

    std::size_t input_dim() const noexcept { return net.front().inputs(); }
};

struct TrainedClassifier {
    ClassifierModel model;
    std::vector<double> train_loss;
    /// Empty when the validation split leaves no rows.
    std::vector<double> validation_loss;
    std::size_t train_rows = 0;
    std::size_t validation_rows = 0;
};

ClassifierModel make_classifier(std::size_t input_dim, const ClassifierConfig& config, nn::Rng& rng);

/**
 * Shuffles the rows once, holds out the last `validation_split` share for
 * validation, then runs `epochs` passes of minibatch Adam on binary
 * cross-entropy over the rest, reshuffling every epoch.
 */
TrainedClassifier train_classifier(const nn::Matrix& x, const std::vector<int>& y, const ClassifierConfig& config,
                                   nn::Rng& rng);

std::vector<double> predict_proba(const ClassifierModel& model, const nn::Matrix& x);

/// 1 iff the probability is >= the model threshold.
std::vector<int> predict_label(const ClassifierModel& model, const nn::Matrix& x);

}  // namespace mofuse::clf

#endif
