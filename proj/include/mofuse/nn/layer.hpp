#ifndef MOFUSE_NN_LAYER_HPP
#define MOFUSE_NN_LAYER_HPP

#include "mofuse/nn/matrix.hpp"
#include "mofuse/nn/rng.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace mofuse::nn {

enum class Activation { ReLU, Sigmoid, Identity };

std::string_view to_string(Activation kind);
std::optional<Activation> parse_activation(std::string_view name);

double relu(double v) noexcept;

/// Logistic function, clamped so the result is strictly inside (0, 1).
double sigmoid(double v) noexcept;

double activate(Activation kind, double pre) noexcept;

/// Derivative of the activation at a pre-activation value.
double activation_grad(Activation kind, double pre) noexcept;

Matrix activate(Activation kind, const Matrix& pre);
Matrix activation_grad(Activation kind, const Matrix& pre);

/**
 * Fully connected layer computing `activation(input * W^T + b)`.
 * Weights are stored out x in.
 */
struct DenseLayer {
    Matrix weights;
    std::vector<double> biases;
    Activation activation = Activation::Identity;

    DenseLayer() = default;
    DenseLayer(Matrix w, std::vector<double> b, Activation act);

    /**
     * Scaled uniform initialization: U(-r, r) with r = sqrt(6 / (in + out)),
     * four times wider for sigmoid layers. Biases start at zero.
     */
    static DenseLayer initialized(std::size_t in, std::size_t out, Activation act, Rng& rng);

    std::size_t inputs() const noexcept { return weights.cols(); }
    std::size_t outputs() const noexcept { return weights.rows(); }
    std::size_t parameter_count() const noexcept { return weights.size() + biases.size(); }

    bool operator==(const DenseLayer&) const = default;
};

/// Pre-activation `input * W^T + b`.
Matrix dense_affine(const DenseLayer& layer, const Matrix& input);

Matrix dense_forward(const DenseLayer& layer, const Matrix& input);

/// Ordered stack of dense layers, applied first to last.
using Network = std::vector<DenseLayer>;

std::size_t parameter_count(const Network& net) noexcept;

/// Weights then biases, layer by layer.
std::vector<double> flatten_parameters(const Network& net);
void assign_parameters(Network& net, std::span<const double> flat);

Matrix forward(const Network& net, const Matrix& input);

/// Per-layer intermediates recorded by `forward_cached` for reverse accumulation.
struct ForwardCache {
    std::vector<Matrix> inputs;
    std::vector<Matrix> pre_activations;
    Matrix output;
};

ForwardCache forward_cached(const Network& net, const Matrix& input);

struct LayerGrad {
    Matrix weights;
    std::vector<double> biases;
};

struct Gradients {
    std::vector<LayerGrad> layers;
    /// Gradient of the loss with respect to the network input.
    Matrix input;

    std::vector<double> flatten() const;
};

/**
 * Reverse pass. `output_grad` is dLoss/dOutput (post-activation) with the
 * same shape as `cache.output`.
 */
Gradients backward(const Network& net, const ForwardCache& cache, const Matrix& output_grad);

}  // namespace mofuse::nn

#endif
