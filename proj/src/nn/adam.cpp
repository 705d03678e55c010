#include "mofuse/nn/adam.hpp"

#include "mofuse/error.hpp"

#include <cmath>

namespace mofuse::nn {

AdamState::AdamState(std::size_t parameter_count, AdamOptions options)
    : options_(options), m_(parameter_count, 0.0), v_(parameter_count, 0.0) {
    if (!(options.beta1 > 0.0 && options.beta1 < 1.0) || !(options.beta2 > 0.0 && options.beta2 < 1.0)) {
        throw ConfigError("Adam betas must lie in (0, 1)");
    }
    if (!(options.epsilon > 0.0) || !(options.learning_rate > 0.0)) {
        throw ConfigError("Adam epsilon and learning rate must be positive");
    }
}

void AdamState::step(std::span<double> params, std::span<const double> grads) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
        throw DimensionError("adam: state holds " + std::to_string(m_.size()) + " parameters, got " +
                             std::to_string(params.size()) + " parameters and " + std::to_string(grads.size()) +
                             " gradients");
    }
    ++step_;
    const auto& o = options_;
    const double t = static_cast<double>(step_);
    const double bias1 = 1.0 - std::pow(o.beta1, t);
    const double bias2 = 1.0 - std::pow(o.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        m_[i] = o.beta1 * m_[i] + (1.0 - o.beta1) * g;
        v_[i] = o.beta2 * v_[i] + (1.0 - o.beta2) * g * g;
        const double m_hat = m_[i] / bias1;
        const double v_hat = v_[i] / bias2;
        params[i] -= o.learning_rate * m_hat / (std::sqrt(v_hat) + o.epsilon);
    }
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
    state.step(params, grads);
}

void adam_step(Network& net, const Gradients& grads, AdamState& state) {
    if (grads.layers.size() != net.size()) {
        throw DimensionError("adam: gradients for " + std::to_string(grads.layers.size()) + " layers, network has " +
                             std::to_string(net.size()));
    }
    for (std::size_t i = 0; i < net.size(); ++i) {
        if (grads.layers[i].weights.rows() != net[i].weights.rows() ||
            grads.layers[i].weights.cols() != net[i].weights.cols() ||
            grads.layers[i].biases.size() != net[i].biases.size()) {
            throw DimensionError("adam: gradient shape " + grads.layers[i].weights.shape_string() +
                                 " does not match layer " + net[i].weights.shape_string());
        }
    }
    auto params = flatten_parameters(net);
    const auto flat_grads = grads.flatten();
    state.step(params, flat_grads);
    assign_parameters(net, params);
}

}  // namespace mofuse::nn
