#ifndef MOFUSE_NN_MATRIX_HPP
#define MOFUSE_NN_MATRIX_HPP

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace mofuse::nn {

/**
 * Dense row-major matrix of doubles.
 *
 * Batches of samples are stored one sample per row, so a layer input of
 * `batch x in` features is a `Matrix(batch, in)`.
 */
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    std::vector<double> column(std::size_t c) const;

    /// "RxC", used in dimension error messages.
    std::string shape_string() const;

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix transpose(const Matrix& m);

/// a * b.
Matrix matmul(const Matrix& a, const Matrix& b);

/// a * b^T; the natural product for weights stored as out x in.
Matrix matmul_transposed(const Matrix& a, const Matrix& b);

Matrix select_rows(const Matrix& m, std::span<const std::size_t> rows);
Matrix select_cols(const Matrix& m, std::span<const std::size_t> cols);

/// Column-wise concatenation; all parts must have the same row count.
Matrix hstack(std::span<const Matrix> parts);

/// Row-wise concatenation; all parts must have the same column count.
Matrix vstack(std::span<const Matrix> parts);

bool all_finite(const Matrix& m) noexcept;

/// Throws NumericError naming `what` if any entry is NaN or infinite.
void require_finite(const Matrix& m, const std::string& what);

}  // namespace mofuse::nn

#endif
