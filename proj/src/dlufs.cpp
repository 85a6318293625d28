#include "dlufs/dlufs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>

#include "dlufs/errors.hpp"
#include "dlufs/kernels.hpp"

namespace dlufs {

namespace {

constexpr double kAutoRidgeScale = 1e-6;
// Floor on tr(S_w) relative to tr(X^T X) in the automatic ridge. Without
// it the ridge collapses quadratically when the spectral and sparsity
// terms drive Z toward zero, which lets the dictionary factors inflate
// without bound and poisons the conditioning of every later solve.
constexpr double kAutoRidgeTraceFloor = 1e-4;

void require_shape(const Matrix& m, std::size_t rows, std::size_t cols, const char* what) {
    if (m.rows() != rows || m.cols() != cols) {
        throw DimensionError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                             std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()));
    }
}

// Symmetric square root of a PSD matrix; roundoff negatives in the
// spectrum are truncated at zero.
Matrix psd_sqrt(const Matrix& m) {
    const EigenPairs eig = sym_eig(m);
    const std::size_t n = m.rows();
    Matrix scaled = eig.vectors;
    for (std::size_t j = 0; j < n; ++j) {
        const double s = std::sqrt(std::max(eig.values[j], 0.0));
        for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= s;
    }
    return matmul_nt(scaled, eig.vectors);
}

// Eigendecomposition of alpha*L with tiny roundoff negatives clamped to
// zero (L is PSD by construction).
EigenPairs spectral_pairs(const Matrix& l, double alpha) {
    EigenPairs eig = sym_eig(l);
    double top = 0.0;
    for (double v : eig.values) top = std::max(top, std::abs(v));
    for (double& v : eig.values) {
        if (v < 0.0 && -v <= 1e-10 * top) v = 0.0;
        v *= alpha;
    }
    return eig;
}

EigenPairs zero_spectrum(std::size_t n) {
    return EigenPairs{Vector(n, 0.0), Matrix::identity(n)};
}

// Reusable per-fit state: X^T X (and its square root for the dual B
// route) and the spectral factorization never change across sweeps.
struct FitCache {
    const Matrix* k = nullptr;
    const Matrix* khalf = nullptr;
    const EigenPairs* spectral = nullptr;
};

Matrix update_b_dense(const Matrix& x, const Matrix& z, std::size_t r, double ridge,
                      const Matrix* k_cached) {
    Matrix k_local;
    if (k_cached == nullptr) {
        k_local = gram_t(x);
        k_cached = &k_local;
    }
    const Matrix sw = gram(z);
    const Matrix sb = symmetrize(matmul_nt(matmul(z, *k_cached), z));
    const EigenPairs top = gen_sym_eig_top(sb, sw, r, ridge);
    return transpose(top.vectors);
}

// Equivalent n x n problem: the nonzero spectrum of (S_w + ridge I)^-1 S_b
// with S_b = G G^T, G = Z (X^T X)^{1/2}, matches that of
// T = G^T (S_w + ridge I)^-1 G, and eigenvectors map back through
// v = (S_w + ridge I)^-1 G w / sqrt(mu). Requires ridge > 0 (Woodbury) and
// at least r safely-positive eigenvalues of T.
std::optional<Matrix> update_b_dual(const Matrix& x, const Matrix& z, std::size_t r, double ridge,
                                    const Matrix* khalf_cached) {
    const std::size_t p = z.rows();
    const std::size_t n = z.cols();
    if (ridge <= 0.0) return std::nullopt;

    Matrix khalf_local;
    if (khalf_cached == nullptr) {
        khalf_local = psd_sqrt(gram_t(x));
        khalf_cached = &khalf_local;
    }
    const Matrix g = matmul(z, *khalf_cached);

    Matrix inner = gram_t(z);
    add_diagonal_in_place(inner, ridge);
    const Cholesky chol = Cholesky::compute(inner);
    const Matrix h = (1.0 / ridge) * (g - matmul(z, chol.solve(matmul_tn(z, g))));

    const EigenPairs eig = sym_eig(symmetrize(matmul_tn(g, h)));
    const double floor = std::max(eig.values.empty() ? 0.0 : eig.values[0], 0.0) * 1e-12;
    if (r > n || eig.values[r - 1] <= floor) return std::nullopt;

    Matrix b(r, p);
    Vector w(n);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < n; ++j) w[j] = eig.vectors(j, i);
        const Vector v = matvec(h, w);
        const double inv = 1.0 / std::sqrt(eig.values[i]);
        for (std::size_t j = 0; j < p; ++j) b(i, j) = v[j] * inv;
    }
    return b;
}

Matrix update_b_impl(const Matrix& x, const Matrix& z, std::size_t r, double ridge,
                     BStrategy strategy, const FitCache& cache) {
    const std::size_t p = z.rows();
    const std::size_t n = z.cols();
    require_shape(x, p, n, "update_B(X)");
    if (r < 1 || r > p) throw ParameterError("update_B: r outside [1, p]");
    if (frobenius_norm(z) == 0.0) throw ParameterError("update_B: Z is identically zero");

    const bool prefer_dual = ridge > 0.0 && 2 * n <= p;
    if (strategy == BStrategy::kDual || (strategy == BStrategy::kAuto && prefer_dual)) {
        if (auto b = update_b_dual(x, z, r, ridge, cache.khalf)) return std::move(*b);
        if (strategy == BStrategy::kDual) {
            throw SingularityError(
                "update_B: dual route needs ridge > 0 and rank(S_b) >= r; use the dense route");
        }
    }
    return update_b_dense(x, z, r, ridge, cache.k);
}

Matrix update_z_impl(const Matrix& x, const Matrix& a, const Matrix& b, const EigenPairs& spectral,
                     const Vector& drw, double lambda, ZStrategy strategy) {
    const std::size_t p = x.rows();
    const std::size_t r = a.cols();
    require_shape(a, p, r, "update_Z(A)");
    require_shape(b, r, p, "update_Z(B)");
    if (drw.size() != p) throw DimensionError("update_Z: Drw length must equal p");

    const Matrix rhs = matmul_tn(b, matmul_tn(a, x));  // (AB)^T X
    const Matrix ata = gram_t(a);

    double min_d = lambda > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    for (double v : drw) min_d = std::min(min_d, lambda * v);
    const bool low_rank_ok = min_d > 0.0;
    const bool prefer_low_rank = low_rank_ok && 3 * r <= p;

    if (strategy == ZStrategy::kLowRank || (strategy == ZStrategy::kAuto && prefer_low_rank)) {
        if (!low_rank_ok) {
            throw SingularityError("update_Z: low-rank route requires lambda > 0 and Drw > 0");
        }
        // Split (AB)^T AB = U^T U with U = diag(sqrt(s)) V^T B from the
        // eigendecomposition of A^T A, dropping a numerically null tail.
        const EigenPairs eig_ata = sym_eig(ata);
        const double floor = std::max(eig_ata.values.empty() ? 0.0 : eig_ata.values[0], 0.0) * 1e-14;
        std::size_t kept = 0;
        while (kept < r && eig_ata.values[kept] > floor) ++kept;
        Matrix u = matmul_tn(eig_ata.vectors, b);  // r x p, rows scaled next
        Matrix u_kept(kept, p);
        for (std::size_t i = 0; i < kept; ++i) {
            const double s = std::sqrt(eig_ata.values[i]);
            for (std::size_t j = 0; j < p; ++j) u_kept(i, j) = s * u(i, j);
        }
        Vector d(p);
        for (std::size_t i = 0; i < p; ++i) d[i] = lambda * drw[i];
        return solve_sylvester_lowrank(d, u_kept, spectral, rhs);
    }

    Matrix m = matmul_tn(b, matmul(ata, b));
    for (std::size_t i = 0; i < p; ++i) m(i, i) += lambda * drw[i];
    return solve_sylvester(sym_eig(symmetrize(m)), spectral, rhs);
}

double effective_ridge(const DlufsParams& params, const Matrix& z, double trace_k) {
    if (!params.auto_ridge) return params.ridge;
    const double trace_sw = kernels::sumsq(z.data(), z.size());
    const double floored = std::max(trace_sw, kAutoRidgeTraceFloor * trace_k);
    return kAutoRidgeScale * floored / static_cast<double>(z.rows());
}

}  // namespace

void DlufsParams::validate(std::size_t p, std::size_t n) const {
    if (!(alpha > 0.0)) throw ParameterError("DlufsParams: alpha must be positive");
    if (!(lambda > 0.0)) throw ParameterError("DlufsParams: lambda must be positive");
    const std::size_t cap = std::min(p, n);
    if (r < 1 || r >= cap) {
        throw ParameterError("DlufsParams: r = " + std::to_string(r) +
                             " must satisfy 1 <= r < min(p, n) = " + std::to_string(cap));
    }
    if (!(eps > 0.0)) throw ParameterError("DlufsParams: eps must be positive");
    if (ridge < 0.0) throw ParameterError("DlufsParams: ridge must be non-negative");
    if (max_iters < 1) throw ParameterError("DlufsParams: max_iters must be at least 1");
    if (!(tol >= 0.0)) throw ParameterError("DlufsParams: tol must be non-negative");
}

double objective(const Matrix& x, const Matrix& a, const Matrix& b, const Matrix& z,
                 const Matrix& l, double alpha, double lambda) {
    const Matrix recon = matmul(a, matmul(b, z));
    require_shape(recon, x.rows(), x.cols(), "objective: A B Z");
    double fit_term = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x.data()[i] - recon.data()[i];
        fit_term += d * d;
    }
    return fit_term + alpha * laplacian_quadratic(z, l) + lambda * l21_norm(z);
}

Matrix update_B(const Matrix& x, const Matrix& z, std::size_t r, double ridge,
                BStrategy strategy) {
    return update_b_impl(x, z, r, ridge, strategy, FitCache{});
}

Matrix update_A(const Matrix& x, const Matrix& z, const Matrix& b, double ridge) {
    const std::size_t p = x.rows();
    const std::size_t n = x.cols();
    const std::size_t r = b.rows();
    require_shape(z, p, n, "update_A(Z)");
    require_shape(b, r, p, "update_A(B)");
    const Matrix bz = matmul(b, z);
    Matrix m = gram(bz);  // B S_w B^T
    if (ridge > 0.0) add_scaled_in_place(m, ridge, gram(b));
    const Matrix rhs = matmul_nt(x, bz);  // X Z^T B^T
    try {
        return transpose(Cholesky::compute(m).solve(transpose(rhs)));
    } catch (const SingularityError&) {
        throw SingularityError("update_A: B (S_w + ridge I) B^T is singular; increase ridge");
    }
}

Vector update_Drw(const Matrix& z, double eps) {
    if (!(eps > 0.0)) throw ParameterError("update_Drw: eps must be positive");
    Vector d = row_norms(z);
    for (double& v : d) v = 1.0 / (2.0 * v + eps);
    return d;
}

Matrix update_Z(const Matrix& x, const Matrix& a, const Matrix& b, const Matrix& l,
                const Vector& drw, double alpha, double lambda, ZStrategy strategy) {
    if (alpha < 0.0 || lambda < 0.0) {
        throw ParameterError("update_Z: alpha and lambda must be non-negative");
    }
    require_shape(l, x.cols(), x.cols(), "update_Z(L)");
    const EigenPairs spectral =
        alpha == 0.0 ? zero_spectrum(x.cols()) : spectral_pairs(l, alpha);
    return update_z_impl(x, a, b, spectral, drw, lambda, strategy);
}

std::vector<std::size_t> rank_features(const Matrix& z) {
    const Vector norms = row_norms(z);
    std::vector<std::size_t> order(z.rows());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });
    return order;
}

DlufsModel fit(const Matrix& x, const SimilarityGraph& graph, const DlufsParams& params,
               const SweepCallback& on_sweep) {
    const std::size_t p = x.rows();
    const std::size_t n = x.cols();
    if (!x.all_finite()) throw ParameterError("fit: non-finite data");
    if (graph.sample_count() != n) {
        throw DimensionError("fit: graph has " + std::to_string(graph.sample_count()) +
                             " samples but X has " + std::to_string(n) + " columns");
    }
    params.validate(p, n);

    const Matrix k = gram_t(x);
    const EigenPairs spectral = spectral_pairs(graph.laplacian, params.alpha);
    Matrix khalf;
    const bool wants_dual = params.b_strategy != BStrategy::kDense && 2 * n <= p;
    if (wants_dual) khalf = psd_sqrt(k);

    FitCache cache;
    cache.k = &k;
    cache.khalf = wants_dual ? &khalf : nullptr;
    cache.spectral = &spectral;

    const double trace_k = kernels::sumsq(x.data(), x.size());
    DlufsModel model;
    model.z = x;
    for (std::size_t t = 1; t <= params.max_iters; ++t) {
        const double ridge = effective_ridge(params, model.z, trace_k);
        model.b = update_b_impl(x, model.z, params.r, ridge, params.b_strategy, cache);
        model.a = update_A(x, model.z, model.b, ridge);
        model.reweight = update_Drw(model.z, params.eps);
        model.z = update_z_impl(x, model.a, model.b, spectral, model.reweight, params.lambda,
                                params.z_strategy);

        const double f =
            objective(x, model.a, model.b, model.z, graph.laplacian, params.alpha, params.lambda);
        if (!std::isfinite(f)) {
            throw DivergenceError("fit: non-finite objective at iteration " + std::to_string(t), t);
        }
        model.history.push_back(f);
        if (on_sweep) on_sweep(t, model);
        if (t >= 2) {
            const double prev = model.history[model.history.size() - 2];
            if (f == 0.0 || std::abs(f - prev) / f < params.tol) {
                model.converged = true;
                break;
            }
        }
    }
    model.ranking = rank_features(model.z);
    return model;
}

}  // namespace dlufs
