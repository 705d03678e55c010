#ifndef MOFUSE_NN_LOSS_HPP
#define MOFUSE_NN_LOSS_HPP

#include "mofuse/nn/matrix.hpp"

namespace mofuse::nn {

/// Probabilities are clamped to [eps, 1 - eps] before taking logs.
inline constexpr double bce_epsilon = 1e-7;

struct LossResult {
    double value = 0.0;
    /// Gradient with respect to the prediction argument.
    Matrix grad;
};

/**
 * Mean squared error over every scalar entry:
 * (1/N) sum (x - x')^2, gradient (2/N)(x' - x) with respect to x'.
 */
LossResult mse_loss(const Matrix& target, const Matrix& reconstruction);

/**
 * Mean binary cross-entropy, -mean(y log p + (1 - y) log(1 - p)).
 * Every target must be exactly 0 or 1.
 *
 * The gradient is evaluated at the clamped probability, so saturated
 * predictions still receive a push in the right direction.
 */
LossResult bce_loss(const Matrix& predicted, const Matrix& target);

}  // namespace mofuse::nn

#endif
