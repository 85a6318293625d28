#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dlufs {

/// Dense row-major matrix of doubles. Dimensions are fixed at construction;
/// a default-constructed Matrix is the empty 0x0 placeholder.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    static Matrix identity(std::size_t n);
    /// n x n matrix with the given diagonal entries.
    static Matrix diagonal(std::span<const double> d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row_ptr(std::size_t i) { return data_.data() + i * cols_; }
    const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }
    std::span<const double> row(std::size_t i) const { return {row_ptr(i), cols_}; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool all_finite() const;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

using Vector = std::vector<double>;

// Shape-checked dense operations. All products are kernel-backed; the
// (m x k)(k x n) forms run axpy over contiguous rows, the transposed forms
// run dot over row pairs.

/// A * B
Matrix matmul(const Matrix& a, const Matrix& b);
/// A * B^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);
/// A^T * B
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// A * A^T, exploiting symmetry of the result.
Matrix gram(const Matrix& a);
/// A^T * A, exploiting symmetry of the result.
Matrix gram_t(const Matrix& a);
/// A * x for a length-cols vector.
Vector matvec(const Matrix& a, std::span<const double> x);
/// A^T * x for a length-rows vector.
Vector matvec_t(const Matrix& a, std::span<const double> x);

Matrix transpose(const Matrix& a);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

/// a += s * b
void add_scaled_in_place(Matrix& a, double s, const Matrix& b);
/// a += s on the diagonal (square only).
void add_diagonal_in_place(Matrix& a, double s);
/// (a + a^T) / 2
Matrix symmetrize(const Matrix& a);

double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);
/// max_ij |a_ij - b_ij|
double max_abs_diff(const Matrix& a, const Matrix& b);

/// Relative asymmetry max|A - A^T| / max|A| (0 for the zero matrix).
double asymmetry(const Matrix& a);

double norm2(std::span<const double> v);

}  // namespace dlufs
