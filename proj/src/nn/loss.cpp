#include "mofuse/nn/loss.hpp"

#include "mofuse/error.hpp"

#include <algorithm>
#include <cmath>

namespace mofuse::nn {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(what) + ": shape " + a.shape_string() + " vs " + b.shape_string());
    }
}

}  // namespace

LossResult mse_loss(const Matrix& target, const Matrix& reconstruction) {
    require_same_shape(target, reconstruction, "mse_loss");
    const std::size_t n = target.size();
    LossResult out{0.0, Matrix(target.rows(), target.cols())};
    if (n == 0) {
        return out;
    }
    const double scale = 2.0 / static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double diff = reconstruction.data()[i] - target.data()[i];
        sum += diff * diff;
        out.grad.data()[i] = scale * diff;
    }
    out.value = sum / static_cast<double>(n);
    return out;
}

LossResult bce_loss(const Matrix& predicted, const Matrix& target) {
    require_same_shape(predicted, target, "bce_loss");
    const std::size_t n = predicted.size();
    LossResult out{0.0, Matrix(predicted.rows(), predicted.cols())};
    if (n == 0) {
        return out;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double y = target.data()[i];
        if (y != 0.0 && y != 1.0) {
            throw DataError("bce_loss: target " + std::to_string(y) + " at index " + std::to_string(i) +
                            " is not 0 or 1");
        }
        const double p = std::clamp(predicted.data()[i], bce_epsilon, 1.0 - bce_epsilon);
        if (y == 1.0) {
            sum -= std::log(p);
            out.grad.data()[i] = -inv_n / p;
        } else {
            sum -= std::log(1.0 - p);
            out.grad.data()[i] = inv_n / (1.0 - p);
        }
    }
    out.value = sum * inv_n;
    return out;
}

}  // namespace mofuse::nn
