#pragma once

#include "dlufs/matrix.hpp"

namespace dlufs {

/// Eigenvalues sorted non-increasing with the corresponding eigenvectors as
/// columns, in matching order.
struct EigenPairs {
    Vector values;
    Matrix vectors;
};

/// Relative asymmetry accepted before an input is rejected. Inputs within
/// the tolerance are symmetrized as (M + M^T)/2 prior to factorization.
inline constexpr double kSymmetryTol = 1e-10;

/// Full eigendecomposition of a symmetric matrix via Householder
/// tridiagonalization and implicit-shift QL. Eigenvectors are orthonormal
/// by construction; each column's sign is fixed so its largest-magnitude
/// entry is positive.
EigenPairs sym_eig(const Matrix& m);

/// Top-r eigenpairs of the symmetric-definite pencil (Sb, Sw + ridge*I):
/// Sb v = value * (Sw + ridge*I) v, solved by Cholesky whitening. Returned
/// eigenvectors satisfy V^T (Sw + ridge*I) V = I.
EigenPairs gen_sym_eig_top(const Matrix& sb, const Matrix& sw, std::size_t r, double ridge);

/// Solve M Z + Z N = C for symmetric positive definite M (p x p) and
/// symmetric N (n x n). Both sides are diagonalized once, so the cost is
/// max{O(p^3), O(p^2 n)}; the per-column shifted solves then decouple.
Matrix solve_sylvester(const Matrix& m, const Matrix& n, const Matrix& c);

/// Same equation with both eigendecompositions precomputed (callers that
/// solve repeatedly against a fixed N reuse its factorization).
Matrix solve_sylvester(const EigenPairs& eig_m, const EigenPairs& eig_n, const Matrix& c);

/// Solve (diag(d) + U^T U) Z + Z N = C where d > 0 has length p and U is
/// r x p with r << p. Each column is solved through the Sherman-Morrison-
/// Woodbury identity in O(p r^2), avoiding any p x p factorization.
Matrix solve_sylvester_lowrank(const Vector& d, const Matrix& u, const EigenPairs& eig_n,
                               const Matrix& c);

/// Sum over rows of the row-wise l2 norms.
double l21_norm(const Matrix& m);

/// Row-wise l2 norms.
Vector row_norms(const Matrix& m);

/// Cholesky factorization A = L L^T of a symmetric positive definite
/// matrix. Throws SingularityError when a pivot is not safely positive.
class Cholesky {
  public:
    static Cholesky compute(const Matrix& a);

    const Matrix& lower() const { return l_; }

    /// Solve A x = b.
    Vector solve(const Vector& b) const;
    /// Solve A X = B column-wise.
    Matrix solve(const Matrix& b) const;
    /// Solve L Y = B (forward substitution on each column).
    Matrix forward_solve(const Matrix& b) const;
    /// Solve L^T X = B (back substitution on each column).
    Matrix backward_solve(const Matrix& b) const;

  private:
    explicit Cholesky(Matrix l) : l_(std::move(l)) {}
    Matrix l_;
};

}  // namespace dlufs
