#include "mofuse/nn/matrix.hpp"

#include "mofuse/error.hpp"

#include <algorithm>
#include <cmath>

namespace mofuse::nn {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw DimensionError("matrix data length " + std::to_string(data_.size()) + " does not match shape " +
                             std::to_string(rows) + "x" + std::to_string(cols));
    }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t nr = rows.size();
    const std::size_t nc = nr ? rows.begin()->size() : 0;
    std::vector<double> data;
    data.reserve(nr * nc);
    for (const auto& r : rows) {
        if (r.size() != nc) {
            throw DimensionError("ragged rows in matrix literal");
        }
        data.insert(data.end(), r.begin(), r.end());
    }
    return Matrix(nr, nc, std::move(data));
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        out[r] = (*this)(r, c);
    }
    return out;
}

std::string Matrix::shape_string() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

Matrix transpose(const Matrix& m) {
    Matrix out(m.cols(), m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out(c, r) = m(r, c);
        }
    }
    return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul: " + a.shape_string() + " times " + b.shape_string());
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        auto dst = out.row(r);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(r, k);
            auto src = b.row(k);
            for (std::size_t c = 0; c < b.cols(); ++c) {
                dst[c] += aik * src[c];
            }
        }
    }
    return out;
}

Matrix matmul_transposed(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw DimensionError("matmul_transposed: " + a.shape_string() + " times transpose of " + b.shape_string());
    }
    Matrix out(a.rows(), b.rows());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        auto ar = a.row(r);
        for (std::size_t o = 0; o < b.rows(); ++o) {
            auto br = b.row(o);
            double acc = 0.0;
            for (std::size_t k = 0; k < ar.size(); ++k) {
                acc += ar[k] * br[k];
            }
            out(r, o) = acc;
        }
    }
    return out;
}

Matrix select_rows(const Matrix& m, std::span<const std::size_t> rows) {
    Matrix out(rows.size(), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= m.rows()) {
            throw DimensionError("row index " + std::to_string(rows[i]) + " out of range for " + m.shape_string());
        }
        auto src = m.row(rows[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

Matrix select_cols(const Matrix& m, std::span<const std::size_t> cols) {
    for (auto c : cols) {
        if (c >= m.cols()) {
            throw DimensionError("column index " + std::to_string(c) + " out of range for " + m.shape_string());
        }
    }
    Matrix out(m.rows(), cols.size());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            out(r, i) = m(r, cols[i]);
        }
    }
    return out;
}

Matrix hstack(std::span<const Matrix> parts) {
    if (parts.empty()) {
        return {};
    }
    const std::size_t nr = parts.front().rows();
    std::size_t nc = 0;
    for (const auto& p : parts) {
        if (p.rows() != nr) {
            throw DimensionError("hstack: " + parts.front().shape_string() + " vs " + p.shape_string());
        }
        nc += p.cols();
    }
    Matrix out(nr, nc);
    for (std::size_t r = 0; r < nr; ++r) {
        auto dst = out.row(r).begin();
        for (const auto& p : parts) {
            auto src = p.row(r);
            dst = std::copy(src.begin(), src.end(), dst);
        }
    }
    return out;
}

Matrix vstack(std::span<const Matrix> parts) {
    if (parts.empty()) {
        return {};
    }
    const std::size_t nc = parts.front().cols();
    std::vector<double> data;
    std::size_t nr = 0;
    for (const auto& p : parts) {
        if (p.cols() != nc) {
            throw DimensionError("vstack: " + parts.front().shape_string() + " vs " + p.shape_string());
        }
        data.insert(data.end(), p.data().begin(), p.data().end());
        nr += p.rows();
    }
    return Matrix(nr, nc, std::move(data));
}

bool all_finite(const Matrix& m) noexcept {
    for (double v : m.data()) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

void require_finite(const Matrix& m, const std::string& what) {
    if (!all_finite(m)) {
        throw NumericError("non-finite value detected in " + what);
    }
}

}  // namespace mofuse::nn
