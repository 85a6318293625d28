#include "dlufs/matrix.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <utility>

#include "dlufs/errors.hpp"
#include "dlufs/kernels.hpp"

namespace dlufs {

namespace {

std::string shape(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(op) + ": shape mismatch " + shape(a) + " vs " + shape(b));
    }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionError("Matrix: entry count " + std::to_string(data_.size()) +
                             " does not match " + std::to_string(rows_) + "x" +
                             std::to_string(cols_));
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

bool Matrix::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul: inner dimensions " + shape(a) + " * " + shape(b));
    }
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* ci = c.row_ptr(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik != 0.0) kernels::axpy(aik, b.row_ptr(k), ci, b.cols());
        }
    }
    return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw DimensionError("matmul_nt: inner dimensions " + shape(a) + " * " + shape(b) + "^T");
    }
    Matrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ai = a.row_ptr(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            c(i, j) = kernels::dot(ai, b.row_ptr(j), a.cols());
        }
    }
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw DimensionError("matmul_tn: inner dimensions " + shape(a) + "^T * " + shape(b));
    }
    Matrix c(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* bk = b.row_ptr(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = a(k, i);
            if (aki != 0.0) kernels::axpy(aki, bk, c.row_ptr(i), b.cols());
        }
    }
    return c;
}

Matrix gram(const Matrix& a) {
    Matrix c(a.rows(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ai = a.row_ptr(i);
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = kernels::dot(ai, a.row_ptr(j), a.cols());
            c(i, j) = v;
            c(j, i) = v;
        }
    }
    return c;
}

Matrix gram_t(const Matrix& a) {
    Matrix c(a.cols(), a.cols());
    // Accumulate rank-one updates row by row; keeps the inner loop contiguous.
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* ak = a.row_ptr(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            if (ak[i] != 0.0) kernels::axpy(ak[i], ak + i, c.row_ptr(i) + i, a.cols() - i);
        }
    }
    for (std::size_t i = 0; i < c.rows(); ++i) {
        for (std::size_t j = 0; j < i; ++j) c(i, j) = c(j, i);
    }
    return c;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
    if (x.size() != a.cols()) throw DimensionError("matvec: vector length vs " + shape(a));
    Vector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = kernels::dot(a.row_ptr(i), x.data(), a.cols());
    return y;
}

Vector matvec_t(const Matrix& a, std::span<const double> x) {
    if (x.size() != a.rows()) throw DimensionError("matvec_t: vector length vs " + shape(a));
    Vector y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        if (x[i] != 0.0) kernels::axpy(x[i], a.row_ptr(i), y.data(), a.cols());
    }
    return y;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    }
    return t;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "operator+");
    Matrix c = a;
    kernels::axpy(1.0, b.data(), c.data(), c.size());
    return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "operator-");
    Matrix c = a;
    kernels::axpy(-1.0, b.data(), c.data(), c.size());
    return c;
}

Matrix operator*(double s, const Matrix& a) {
    Matrix c = a;
    kernels::scale(c.data(), s, c.size());
    return c;
}

void add_scaled_in_place(Matrix& a, double s, const Matrix& b) {
    require_same_shape(a, b, "add_scaled_in_place");
    kernels::axpy(s, b.data(), a.data(), a.size());
}

void add_diagonal_in_place(Matrix& a, double s) {
    if (a.rows() != a.cols()) throw DimensionError("add_diagonal_in_place: non-square " + shape(a));
    for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += s;
}

Matrix symmetrize(const Matrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("symmetrize: non-square " + shape(a));
    Matrix s(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
    }
    return s;
}

double frobenius_norm(const Matrix& a) { return std::sqrt(kernels::sumsq(a.data(), a.size())); }

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i]));
    return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    }
    return m;
}

double asymmetry(const Matrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("asymmetry: non-square " + shape(a));
    const double scale = max_abs(a);
    if (scale == 0.0) return 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            worst = std::max(worst, std::abs(a(i, j) - a(j, i)));
        }
    }
    return worst / scale;
}

double norm2(std::span<const double> v) { return std::sqrt(kernels::sumsq(v.data(), v.size())); }

}  // namespace dlufs
