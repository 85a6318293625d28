#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "dlufs/graph.hpp"
#include "dlufs/matrix.hpp"
#include "dlufs/numerics.hpp"

namespace dlufs {

/// Solver route for the B update. Dense forms the p x p scatter matrices
/// and whitens; Dual solves the equivalent n x n problem through the
/// factored form of S_b and is preferred when n << p.
enum class BStrategy { kAuto, kDense, kDual };

/// Solver route for the Z update. Dense eigendecomposes the p x p left
/// coefficient; LowRank exploits its diagonal-plus-rank-r structure.
enum class ZStrategy { kAuto, kDense, kLowRank };

struct DlufsParams {
    double alpha = 1.0;    // spectral weight
    double lambda = 1.0;   // row-sparsity weight
    std::size_t r = 1;     // induced rank, 1 <= r < min(p, n)
    double eps = 1e-8;     // reweighting floor
    double ridge = 0.0;    // absolute S_w regularizer, used when auto_ridge is off
    bool auto_ridge = true;  // ridge = 1e-6 * tr(S_w)/p, recomputed each sweep
    std::size_t max_iters = 50;
    double tol = 1e-3;     // relative objective change |f(t)-f(t-1)|/f(t)
    BStrategy b_strategy = BStrategy::kAuto;
    ZStrategy z_strategy = ZStrategy::kAuto;

    void validate(std::size_t p, std::size_t n) const;
};

struct DlufsModel {
    Matrix a;              // p x r
    Matrix b;              // r x p
    Matrix z;              // p x n representation
    Vector reweight;       // p reweighting diagonal entries
    Vector history;        // objective value after each full sweep
    std::vector<std::size_t> ranking;  // features by descending row norm of Z
    bool converged = false;
};

/// ||X - A B Z||_F^2 + alpha tr(Z L Z^T) + lambda ||Z||_{2,1}
double objective(const Matrix& x, const Matrix& a, const Matrix& b, const Matrix& z,
                 const Matrix& l, double alpha, double lambda);

/// Rows of B are the top-r generalized eigenvectors of (S_b, S_w + ridge*I)
/// with S_w = Z Z^T and S_b = Z X^T X Z^T.
Matrix update_B(const Matrix& x, const Matrix& z, std::size_t r, double ridge,
                BStrategy strategy = BStrategy::kAuto);

/// A = X Z^T B^T (B (S_w + ridge*I) B^T)^-1.
Matrix update_A(const Matrix& x, const Matrix& z, const Matrix& b, double ridge);

/// Reweighting diagonal entries 1 / (2 ||z_i||_2 + eps).
Vector update_Drw(const Matrix& z, double eps);

/// Solve ((AB)^T AB + lambda diag(drw)) Z + Z (alpha L) = (AB)^T X.
Matrix update_Z(const Matrix& x, const Matrix& a, const Matrix& b, const Matrix& l,
                const Vector& drw, double alpha, double lambda,
                ZStrategy strategy = ZStrategy::kAuto);

/// Feature indices sorted by descending row l2 norm of Z; ties broken by
/// ascending feature index.
std::vector<std::size_t> rank_features(const Matrix& z);

/// Invoked after every completed sweep with the 1-based sweep index and the
/// current model state (objective already appended to history).
using SweepCallback = std::function<void(std::size_t, const DlufsModel&)>;

/// Run the alternating optimization from Z = X until the relative objective
/// change drops below params.tol or params.max_iters sweeps complete. The
/// graph must have been built over the columns of the same X.
DlufsModel fit(const Matrix& x, const SimilarityGraph& graph, const DlufsParams& params,
               const SweepCallback& on_sweep = {});

}  // namespace dlufs
