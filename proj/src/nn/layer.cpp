#include "mofuse/nn/layer.hpp"

#include "mofuse/error.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

namespace mofuse::nn {

std::string_view to_string(Activation kind) {
    switch (kind) {
        case Activation::ReLU:
            return "relu";
        case Activation::Sigmoid:
            return "sigmoid";
        case Activation::Identity:
            return "identity";
    }
    return "identity";
}

std::optional<Activation> parse_activation(std::string_view name) {
    if (name == "relu") return Activation::ReLU;
    if (name == "sigmoid") return Activation::Sigmoid;
    if (name == "identity") return Activation::Identity;
    return std::nullopt;
}

double relu(double v) noexcept {
    return v > 0.0 ? v : 0.0;
}

double sigmoid(double v) noexcept {
    // Largest double below 1; 1/(1+e^-v) rounds to exactly 1 for v > ~37.
    constexpr double upper = 1.0 - DBL_EPSILON / 2.0;
    double s;
    if (v >= 0.0) {
        s = 1.0 / (1.0 + std::exp(-v));
    } else {
        const double e = std::exp(v);
        s = e / (1.0 + e);
    }
    return std::clamp(s, DBL_MIN, upper);
}

double activate(Activation kind, double pre) noexcept {
    switch (kind) {
        case Activation::ReLU:
            return relu(pre);
        case Activation::Sigmoid:
            return sigmoid(pre);
        case Activation::Identity:
            return pre;
    }
    return pre;
}

double activation_grad(Activation kind, double pre) noexcept {
    switch (kind) {
        case Activation::ReLU:
            return pre > 0.0 ? 1.0 : 0.0;
        case Activation::Sigmoid: {
            const double s = sigmoid(pre);
            return s * (1.0 - s);
        }
        case Activation::Identity:
            return 1.0;
    }
    return 1.0;
}

Matrix activate(Activation kind, const Matrix& pre) {
    Matrix out = pre;
    for (double& v : out.data()) {
        v = activate(kind, v);
    }
    return out;
}

Matrix activation_grad(Activation kind, const Matrix& pre) {
    Matrix out = pre;
    for (double& v : out.data()) {
        v = activation_grad(kind, v);
    }
    return out;
}

DenseLayer::DenseLayer(Matrix w, std::vector<double> b, Activation act)
    : weights(std::move(w)), biases(std::move(b)), activation(act) {
    if (biases.size() != weights.rows()) {
        throw DimensionError("dense layer: weights " + weights.shape_string() + " but " +
                             std::to_string(biases.size()) + " biases");
    }
}

DenseLayer DenseLayer::initialized(std::size_t in, std::size_t out, Activation act, Rng& rng) {
    double range = std::sqrt(6.0 / static_cast<double>(in + out));
    if (act == Activation::Sigmoid) {
        range *= 4.0;
    }
    Matrix w(out, in);
    for (double& v : w.data()) {
        v = rng.uniform(-range, range);
    }
    return DenseLayer(std::move(w), std::vector<double>(out, 0.0), act);
}

Matrix dense_affine(const DenseLayer& layer, const Matrix& input) {
    if (input.cols() != layer.inputs()) {
        throw DimensionError("dense layer expects " + std::to_string(layer.inputs()) + " inputs (weights " +
                             layer.weights.shape_string() + "), got input " + input.shape_string());
    }
    Matrix out = matmul_transposed(input, layer.weights);
    for (std::size_t r = 0; r < out.rows(); ++r) {
        auto row = out.row(r);
        for (std::size_t o = 0; o < row.size(); ++o) {
            row[o] += layer.biases[o];
        }
    }
    return out;
}

Matrix dense_forward(const DenseLayer& layer, const Matrix& input) {
    return activate(layer.activation, dense_affine(layer, input));
}

std::size_t parameter_count(const Network& net) noexcept {
    std::size_t n = 0;
    for (const auto& layer : net) {
        n += layer.parameter_count();
    }
    return n;
}

std::vector<double> flatten_parameters(const Network& net) {
    std::vector<double> flat;
    flat.reserve(parameter_count(net));
    for (const auto& layer : net) {
        flat.insert(flat.end(), layer.weights.data().begin(), layer.weights.data().end());
        flat.insert(flat.end(), layer.biases.begin(), layer.biases.end());
    }
    return flat;
}

void assign_parameters(Network& net, std::span<const double> flat) {
    if (flat.size() != parameter_count(net)) {
        throw DimensionError("parameter vector of length " + std::to_string(flat.size()) + " for a network with " +
                             std::to_string(parameter_count(net)) + " parameters");
    }
    auto it = flat.begin();
    for (auto& layer : net) {
        auto w = layer.weights.data();
        std::copy_n(it, w.size(), w.begin());
        it += static_cast<std::ptrdiff_t>(w.size());
        std::copy_n(it, layer.biases.size(), layer.biases.begin());
        it += static_cast<std::ptrdiff_t>(layer.biases.size());
    }
}

Matrix forward(const Network& net, const Matrix& input) {
    Matrix x = input;
    for (const auto& layer : net) {
        x = dense_forward(layer, x);
    }
    return x;
}

ForwardCache forward_cached(const Network& net, const Matrix& input) {
    ForwardCache cache;
    cache.inputs.reserve(net.size());
    cache.pre_activations.reserve(net.size());
    Matrix x = input;
    for (const auto& layer : net) {
        cache.inputs.push_back(x);
        cache.pre_activations.push_back(dense_affine(layer, x));
        x = activate(layer.activation, cache.pre_activations.back());
    }
    cache.output = std::move(x);
    return cache;
}

std::vector<double> Gradients::flatten() const {
    std::vector<double> flat;
    for (const auto& g : layers) {
        flat.insert(flat.end(), g.weights.data().begin(), g.weights.data().end());
        flat.insert(flat.end(), g.biases.begin(), g.biases.end());
    }
    return flat;
}

Gradients backward(const Network& net, const ForwardCache& cache, const Matrix& output_grad) {
    if (cache.inputs.size() != net.size() || cache.pre_activations.size() != net.size() || net.empty()) {
        throw Error(ErrorKind::Data, "backward called without a forward cache for this network");
    }
    if (output_grad.rows() != cache.output.rows() || output_grad.cols() != cache.output.cols()) {
        throw DimensionError("output gradient " + output_grad.shape_string() + " vs network output " +
                             cache.output.shape_string());
    }

    Gradients grads;
    grads.layers.resize(net.size());
    Matrix upstream = output_grad;
    for (std::size_t li = net.size(); li-- > 0;) {
        const DenseLayer& layer = net[li];
        const Matrix& in = cache.inputs[li];
        const Matrix& pre = cache.pre_activations[li];

        Matrix delta = upstream;
        for (std::size_t i = 0; i < delta.size(); ++i) {
            delta.data()[i] *= activation_grad(layer.activation, pre.data()[i]);
        }

        LayerGrad& g = grads.layers[li];
        g.weights = Matrix(layer.outputs(), layer.inputs());
        g.biases.assign(layer.outputs(), 0.0);
        Matrix down(in.rows(), in.cols());
        for (std::size_t r = 0; r < delta.rows(); ++r) {
            auto d = delta.row(r);
            auto x = in.row(r);
            auto dx = down.row(r);
            for (std::size_t o = 0; o < d.size(); ++o) {
                const double dz = d[o];
                if (dz == 0.0) {
                    continue;
                }
                g.biases[o] += dz;
                auto gw = g.weights.row(o);
                auto w = layer.weights.row(o);
                for (std::size_t k = 0; k < x.size(); ++k) {
                    gw[k] += dz * x[k];
                    dx[k] += dz * w[k];
                }
            }
        }
        upstream = std::move(down);
    }
    grads.input = std::move(upstream);
    return grads;
}

}  // namespace mofuse::nn
