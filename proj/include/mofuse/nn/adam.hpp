#ifndef MOFUSE_NN_ADAM_HPP
#define MOFUSE_NN_ADAM_HPP

#include "mofuse/nn/layer.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace mofuse::nn {

struct AdamOptions {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

class AdamState {
public:
    AdamState() = default;
    AdamState(std::size_t parameter_count, AdamOptions options = {});

    const AdamOptions& options() const noexcept { return options_; }
    std::uint64_t step_count() const noexcept { return step_; }
    std::span<const double> first_moment() const noexcept { return m_; }
    std::span<const double> second_moment() const noexcept { return v_; }

    /// One bias-corrected Adam update of `params` in place.
    void step(std::span<double> params, std::span<const double> grads);

private:
    AdamOptions options_;
    std::vector<double> m_;
    std::vector<double> v_;
    std::uint64_t step_ = 0;
};

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

/// Updates every layer of `net` using gradients from `backward`.
void adam_step(Network& net, const Gradients& grads, AdamState& state);

}  // namespace mofuse::nn

#endif
