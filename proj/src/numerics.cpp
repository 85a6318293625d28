#include "dlufs/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dlufs/errors.hpp"
#include "dlufs/kernels.hpp"

namespace dlufs {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_square(const Matrix& m, const char* who) {
    if (m.rows() != m.cols()) {
        throw DimensionError(std::string(who) + ": expected a square matrix, got " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    if (m.rows() == 0) throw DimensionError(std::string(who) + ": empty matrix");
}

void require_finite(const Matrix& m, const char* who) {
    if (!m.all_finite()) throw ParameterError(std::string(who) + ": non-finite entries");
}

Matrix checked_symmetric(const Matrix& m, const char* who) {
    require_square(m, who);
    require_finite(m, who);
    if (asymmetry(m) > kSymmetryTol) {
        throw SymmetryError(std::string(who) + ": matrix is not symmetric within " +
                            std::to_string(kSymmetryTol) + " relative tolerance");
    }
    return symmetrize(m);
}

// Householder reduction of a symmetric matrix to tridiagonal form with
// accumulated transformations (EISPACK tred2 lineage). On return z holds
// the orthogonal accumulation, d the diagonal and e the subdiagonal.
void tridiagonalize(Matrix& z, Vector& d, Vector& e) {
    const std::size_t n = z.rows();
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t l = i - 1;
        double h = 0.0;
        double scale = 0.0;
        if (l > 0) {
            for (std::size_t k = 0; k < i; ++k) scale += std::abs(z(i, k));
            if (scale == 0.0) {
                e[i] = z(i, l);
            } else {
                for (std::size_t k = 0; k < i; ++k) {
                    z(i, k) /= scale;
                    h += z(i, k) * z(i, k);
                }
                double f = z(i, l);
                double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                z(i, l) = f - g;
                f = 0.0;
                for (std::size_t j = 0; j < i; ++j) {
                    z(j, i) = z(i, j) / h;
                    g = 0.0;
                    for (std::size_t k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
                    for (std::size_t k = j + 1; k < i; ++k) g += z(k, j) * z(i, k);
                    e[j] = g / h;
                    f += e[j] * z(i, j);
                }
                const double hh = f / (h + h);
                for (std::size_t j = 0; j < i; ++j) {
                    f = z(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (std::size_t k = 0; k <= j; ++k) z(j, k) -= f * e[k] + g * z(i, k);
                }
            }
        } else {
            e[i] = z(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i] != 0.0) {
            for (std::size_t j = 0; j < i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k < i; ++k) g += z(i, k) * z(k, j);
                for (std::size_t k = 0; k < i; ++k) z(k, j) -= g * z(k, i);
            }
        }
        d[i] = z(i, i);
        z(i, i) = 1.0;
        for (std::size_t j = 0; j < i; ++j) z(j, i) = z(i, j) = 0.0;
    }
}

// Implicit-shift QL iteration on the tridiagonal form, rotating the
// accumulated transformation matrix along (EISPACK tql2 lineage). The
// deflation test compares subdiagonals against the overall matrix scale,
// which keeps the iteration convergent on effectively rank-deficient
// inputs whose trailing diagonal entries underflow toward zero.
void tridiagonal_ql(Vector& d, Vector& e, Matrix& z) {
    const std::size_t n = d.size();
    if (n == 1) return;
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    double f = 0.0;
    double tst1 = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m = l;
        while (m < n - 1 && std::abs(e[m]) > kEps * tst1) ++m;

        if (m > l) {
            int iter = 0;
            do {
                if (++iter > 64) {
                    throw SingularityError("sym_eig: QL iteration failed to converge");
                }
                // Implicit shift from the leading 2x2.
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0.0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                // Implicit QL sweep from m back to l.
                p = d[m];
                double c = 1.0;
                double c2 = c;
                double c3 = c;
                const double el1 = e[l + 1];
                double s = 0.0;
                double s2 = 0.0;
                for (std::size_t i = m; i-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = std::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for (std::size_t k = 0; k < n; ++k) {
                        h = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * h;
                        z(k, i) = c * z(k, i) - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > kEps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

// Descending eigenvalue order with deterministic tie-breaking and a fixed
// sign convention per eigenvector.
EigenPairs sort_pairs(Vector d, const Matrix& z) {
    const std::size_t n = d.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });
    EigenPairs out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.values[j] = d[src];
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double a = std::abs(z(k, src));
            if (a > best) {
                best = a;
                arg = k;
            }
        }
        const double sign = z(arg, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = sign * z(k, src);
    }
    return out;
}

}  // namespace

EigenPairs sym_eig(const Matrix& m) {
    Matrix z = checked_symmetric(m, "sym_eig");
    const std::size_t n = z.rows();
    Vector d(n, 0.0);
    Vector e(n, 0.0);
    tridiagonalize(z, d, e);
    tridiagonal_ql(d, e, z);
    return sort_pairs(std::move(d), z);
}

Cholesky Cholesky::compute(const Matrix& a) {
    require_square(a, "cholesky");
    const std::size_t n = a.rows();
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = j; i < n; ++i) {
            const double acc = kernels::dot(l.row_ptr(i), l.row_ptr(j), j);
            const double s = a(i, j) - acc;
            if (i == j) {
                if (!(s > 0.0) || s < max_diag * 1e-15) {
                    throw SingularityError("cholesky: matrix is not positive definite (pivot " +
                                           std::to_string(s) + " at index " + std::to_string(j) +
                                           ")");
                }
                l(j, j) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return Cholesky(std::move(l));
}

Matrix Cholesky::forward_solve(const Matrix& b) const {
    const std::size_t n = l_.rows();
    if (b.rows() != n) throw DimensionError("cholesky forward_solve: dimension mismatch");
    Matrix y = b;
    for (std::size_t i = 0; i < n; ++i) {
        double* yi = y.row_ptr(i);
        for (std::size_t k = 0; k < i; ++k) {
            kernels::axpy(-l_(i, k), y.row_ptr(k), yi, y.cols());
        }
        kernels::scale(yi, 1.0 / l_(i, i), y.cols());
    }
    return y;
}

Matrix Cholesky::backward_solve(const Matrix& b) const {
    const std::size_t n = l_.rows();
    if (b.rows() != n) throw DimensionError("cholesky backward_solve: dimension mismatch");
    Matrix x = b;
    for (std::size_t i = n; i-- > 0;) {
        double* xi = x.row_ptr(i);
        for (std::size_t k = i + 1; k < n; ++k) {
            kernels::axpy(-l_(k, i), x.row_ptr(k), xi, x.cols());
        }
        kernels::scale(xi, 1.0 / l_(i, i), x.cols());
    }
    return x;
}

Matrix Cholesky::solve(const Matrix& b) const { return backward_solve(forward_solve(b)); }

Vector Cholesky::solve(const Vector& b) const {
    Matrix col(b.size(), 1);
    for (std::size_t i = 0; i < b.size(); ++i) col(i, 0) = b[i];
    const Matrix x = solve(col);
    Vector out(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) out[i] = x(i, 0);
    return out;
}

EigenPairs gen_sym_eig_top(const Matrix& sb, const Matrix& sw, std::size_t r, double ridge) {
    const Matrix sbs = checked_symmetric(sb, "gen_sym_eig_top(Sb)");
    Matrix sws = checked_symmetric(sw, "gen_sym_eig_top(Sw)");
    if (sbs.rows() != sws.rows()) {
        throw DimensionError("gen_sym_eig_top: Sb and Sw dimensions differ");
    }
    const std::size_t p = sbs.rows();
    if (r < 1 || r > p) {
        throw ParameterError("gen_sym_eig_top: r = " + std::to_string(r) +
                             " outside [1, " + std::to_string(p) + "]");
    }
    if (ridge < 0.0) throw ParameterError("gen_sym_eig_top: ridge must be non-negative");
    add_diagonal_in_place(sws, ridge);

    Cholesky chol = [&] {
        try {
            return Cholesky::compute(sws);
        } catch (const SingularityError&) {
            throw SingularityError(
                "gen_sym_eig_top: Sw + ridge*I is not positive definite; increase ridge");
        }
    }();

    // Whiten: C = L^-1 Sb L^-T, then an ordinary symmetric eigensolve.
    const Matrix half = chol.forward_solve(sbs);
    const Matrix whitened = symmetrize(chol.forward_solve(transpose(half)));
    const EigenPairs full = sym_eig(whitened);

    Matrix y(p, r);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < r; ++j) y(i, j) = full.vectors(i, j);
    }
    EigenPairs out;
    out.values.assign(full.values.begin(), full.values.begin() + static_cast<std::ptrdiff_t>(r));
    out.vectors = chol.backward_solve(y);
    return out;
}

namespace {

// Per-mode denominator guard for the decoupled solves: a shift is singular
// when the two eigenvalues cancel each other, not merely when it is small
// against the largest mode of the operator.
void check_shift(double denom, double mode_scale, const char* who) {
    if (!(std::abs(denom) > mode_scale * 1e-13)) {
        throw SingularityError(std::string(who) + ": shifted system is numerically singular");
    }
}

// One decoupled solve in the joint eigenbasis.
Matrix coupled_solve(const EigenPairs& eig_m, const EigenPairs& eig_n, const Matrix& c) {
    const std::size_t p = eig_m.vectors.rows();
    const std::size_t n = eig_n.vectors.rows();
    Matrix zhat = matmul(matmul_tn(eig_m.vectors, c), eig_n.vectors);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double denom = eig_m.values[i] + eig_n.values[j];
            check_shift(denom, std::abs(eig_m.values[i]) + std::abs(eig_n.values[j]),
                        "solve_sylvester");
            zhat(i, j) /= denom;
        }
    }
    return matmul_nt(matmul(eig_m.vectors, zhat), eig_n.vectors);
}

// M Z + Z N evaluated through the factorizations.
Matrix apply_pencil(const EigenPairs& eig_m, const EigenPairs& eig_n, const Matrix& z) {
    Matrix mz_hat = matmul_tn(eig_m.vectors, z);
    for (std::size_t i = 0; i < mz_hat.rows(); ++i) {
        kernels::scale(mz_hat.row_ptr(i), eig_m.values[i], mz_hat.cols());
    }
    Matrix out = matmul(eig_m.vectors, mz_hat);
    Matrix zn_hat = matmul(z, eig_n.vectors);
    for (std::size_t j = 0; j < zn_hat.cols(); ++j) {
        for (std::size_t i = 0; i < zn_hat.rows(); ++i) zn_hat(i, j) *= eig_n.values[j];
    }
    add_scaled_in_place(out, 1.0, matmul_nt(zn_hat, eig_n.vectors));
    return out;
}

}  // namespace

Matrix solve_sylvester(const EigenPairs& eig_m, const EigenPairs& eig_n, const Matrix& c) {
    const std::size_t p = eig_m.vectors.rows();
    const std::size_t n = eig_n.vectors.rows();
    if (c.rows() != p || c.cols() != n) {
        throw DimensionError("solve_sylvester: C must be " + std::to_string(p) + "x" +
                             std::to_string(n));
    }
    Matrix z = coupled_solve(eig_m, eig_n, c);
    // One round of iterative refinement keeps the residual bound through
    // badly scaled instances arising late in the optimizer's loop.
    const Matrix residual = c - apply_pencil(eig_m, eig_n, z);
    add_scaled_in_place(z, 1.0, coupled_solve(eig_m, eig_n, residual));
    return z;
}

Matrix solve_sylvester(const Matrix& m, const Matrix& n, const Matrix& c) {
    const Matrix ms = checked_symmetric(m, "solve_sylvester(M)");
    const Matrix ns = checked_symmetric(n, "solve_sylvester(N)");
    require_finite(c, "solve_sylvester(C)");
    return solve_sylvester(sym_eig(ms), sym_eig(ns), c);
}

namespace {

// Column-wise Woodbury pass for (diag(d) + U^T U) Z' + Z' diag(shifts) = C'
// with everything already expressed in N's eigenbasis.
Matrix lowrank_pass(const Vector& d, const Matrix& u, const Vector& shifts, const Matrix& cp) {
    const std::size_t p = d.size();
    const std::size_t n = shifts.size();
    const std::size_t r = u.rows();
    Matrix zp(p, n);
    Vector inv_dj(p);
    Matrix u_scaled(r, r > 0 ? p : 0);
    Vector w(p);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < p; ++i) {
            const double denom = d[i] + shifts[j];
            check_shift(denom, std::abs(d[i]) + std::abs(shifts[j]), "solve_sylvester_lowrank");
            inv_dj[i] = 1.0 / denom;
            w[i] = cp(i, j) * inv_dj[i];
        }
        if (r > 0) {
            // Woodbury: (D + U^T U)^-1 = D^-1 - D^-1 U^T (I + U D^-1 U^T)^-1 U D^-1.
            for (std::size_t a = 0; a < r; ++a) {
                const double* ua = u.row_ptr(a);
                double* sa = u_scaled.row_ptr(a);
                for (std::size_t i = 0; i < p; ++i) sa[i] = ua[i] * std::sqrt(inv_dj[i]);
            }
            Matrix k = gram(u_scaled);
            add_diagonal_in_place(k, 1.0);
            Vector g(r);
            for (std::size_t a = 0; a < r; ++a) g[a] = kernels::dot(u.row_ptr(a), w.data(), p);
            const Vector h = Cholesky::compute(k).solve(g);
            Vector correction(p, 0.0);
            for (std::size_t a = 0; a < r; ++a) {
                kernels::axpy(h[a], u.row_ptr(a), correction.data(), p);
            }
            for (std::size_t i = 0; i < p; ++i) w[i] -= inv_dj[i] * correction[i];
        }
        for (std::size_t i = 0; i < p; ++i) zp(i, j) = w[i];
    }
    return zp;
}

// (diag(d) + U^T U) Z' + Z' diag(shifts) in the same basis.
Matrix lowrank_apply(const Vector& d, const Matrix& u, const Vector& shifts, const Matrix& zp) {
    const std::size_t p = d.size();
    const std::size_t n = shifts.size();
    Matrix out(p, n);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < n; ++j) out(i, j) = (d[i] + shifts[j]) * zp(i, j);
    }
    if (u.rows() > 0) add_scaled_in_place(out, 1.0, matmul_tn(u, matmul(u, zp)));
    return out;
}

}  // namespace

Matrix solve_sylvester_lowrank(const Vector& d, const Matrix& u, const EigenPairs& eig_n,
                               const Matrix& c) {
    const std::size_t p = d.size();
    const std::size_t n = eig_n.values.size();
    const std::size_t r = u.rows();
    if (c.rows() != p || c.cols() != n || (r > 0 && u.cols() != p)) {
        throw DimensionError("solve_sylvester_lowrank: operand shapes disagree");
    }
    // Move the right-hand side into N's eigenbasis; columns then decouple.
    const Matrix cp = matmul(c, eig_n.vectors);
    Matrix zp = lowrank_pass(d, u, eig_n.values, cp);
    // The Woodbury subtraction cancels when the low-rank block dominates the
    // diagonal; one refinement pass restores the residual bound.
    const Matrix residual = cp - lowrank_apply(d, u, eig_n.values, zp);
    add_scaled_in_place(zp, 1.0, lowrank_pass(d, u, eig_n.values, residual));
    return matmul_nt(zp, eig_n.vectors);
}

double l21_norm(const Matrix& m) {
    double total = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        total += std::sqrt(kernels::sumsq(m.row_ptr(i), m.cols()));
    }
    return total;
}

Vector row_norms(const Matrix& m) {
    Vector norms(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        norms[i] = std::sqrt(kernels::sumsq(m.row_ptr(i), m.cols()));
    }
    return norms;
}

}  // namespace dlufs
