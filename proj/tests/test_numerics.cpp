#include <doctest.h>

#include <cmath>

#include "dlufs/errors.hpp"
#include "dlufs/numerics.hpp"
#include "helpers.hpp"

using namespace dlufs;

namespace {

Matrix reconstruct(const EigenPairs& eig) {
    Matrix scaled = eig.vectors;
    for (std::size_t j = 0; j < eig.values.size(); ++j) {
        for (std::size_t i = 0; i < scaled.rows(); ++i) scaled(i, j) *= eig.values[j];
    }
    return matmul_nt(scaled, eig.vectors);
}

double orthonormality_defect(const Matrix& v) {
    return max_abs_diff(gram_t(v), Matrix::identity(v.cols()));
}

// Test-local Cholesky + triangular solves, independent of the production
// implementation, used to build the whitened matrix for the oracle checks.
Matrix naive_whiten(const Matrix& sb, const Matrix& sw_ridged) {
    const std::size_t n = sb.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = j; i < n; ++i) {
            double s = sw_ridged(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                REQUIRE(s > 0.0);
                l(j, j) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    // W = L^-1 Sb L^-T by two rounds of forward substitution.
    Matrix w = sb;
    for (std::size_t col = 0; col < n; ++col) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = w(i, col);
            for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * w(k, col);
            w(i, col) = s / l(i, i);
        }
    }
    Matrix wt = transpose(w);
    for (std::size_t col = 0; col < n; ++col) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = wt(i, col);
            for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * wt(k, col);
            wt(i, col) = s / l(i, i);
        }
    }
    return symmetrize(wt);
}

}  // namespace

TEST_CASE("sym_eig: diagonal case") {
    const EigenPairs eig = sym_eig(Matrix::diagonal(Vector{3.0, 1.0}));
    CHECK(eig.values[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(eig.values[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(max_abs_diff(eig.vectors, Matrix::identity(2)) <= 1e-14);
}

TEST_CASE("sym_eig: identity case") {
    const EigenPairs eig = sym_eig(Matrix::identity(4));
    for (double v : eig.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(orthonormality_defect(eig.vectors) <= 1e-14);
}

TEST_CASE("sym_eig: reconstruction oracle on a random symmetric 6x6") {
    Rng rng(21);
    const Matrix m = symmetrize(gram(testgen::random_matrix(rng, 6, 6)));
    const EigenPairs eig = sym_eig(m);
    CHECK(max_abs_diff(reconstruct(eig), m) <= 1e-8);
}

TEST_CASE("sym_eig: invariants over random sizes") {
    Rng rng(22);
    for (std::size_t n : {1, 2, 3, 5, 8, 13, 24, 33}) {
        CAPTURE(n);
        const Matrix m = symmetrize(testgen::random_matrix(rng, n, n) +
                                    transpose(testgen::random_matrix(rng, n, n)));
        const EigenPairs eig = sym_eig(m);
        const double scale = std::max(max_abs(m), 1.0);
        CHECK(orthonormality_defect(eig.vectors) <= 1e-8);
        CHECK(max_abs_diff(reconstruct(eig), m) <= 1e-8 * scale);
        for (std::size_t i = 1; i < n; ++i) CHECK(eig.values[i - 1] >= eig.values[i]);
    }
}

TEST_CASE("sym_eig: clustered and deficient spectra") {
    // Repeated eigenvalues: 2 I plus a rank-one bump.
    Rng rng(23);
    Matrix m = Matrix::identity(5);
    for (std::size_t i = 0; i < 5; ++i) m(i, i) = 2.0;
    const Matrix u = testgen::random_matrix(rng, 5, 1);
    m = symmetrize(m + gram(u));
    const EigenPairs eig = sym_eig(m);
    CHECK(orthonormality_defect(eig.vectors) <= 1e-10);
    CHECK(max_abs_diff(reconstruct(eig), m) <= 1e-10 * max_abs(m));

    const EigenPairs zero = sym_eig(Matrix(3, 3));
    for (double v : zero.values) CHECK(v == 0.0);
    CHECK(orthonormality_defect(zero.vectors) <= 1e-14);
}

TEST_CASE("sym_eig: input validation") {
    CHECK_THROWS_AS(sym_eig(Matrix(2, 3)), DimensionError);
    Matrix bad(2, 2, {1.0, 0.5, 0.2, 1.0});
    CHECK_THROWS_AS(sym_eig(bad), SymmetryError);
    Matrix nan(2, 2);
    nan(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(sym_eig(nan), ParameterError);
}

TEST_CASE("gen_sym_eig_top: identity metric reduces to sym_eig") {
    Rng rng(31);
    const Matrix sb = testgen::random_psd(rng, 6, 6);
    const EigenPairs full = sym_eig(sb);
    const EigenPairs top = gen_sym_eig_top(sb, Matrix::identity(6), 3, 0.0);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(top.values[j] == doctest::Approx(full.values[j]).epsilon(1e-10));
        for (std::size_t i = 0; i < 6; ++i) {
            CHECK(top.vectors(i, j) == doctest::Approx(full.vectors(i, j)).epsilon(1e-8));
        }
    }
}

TEST_CASE("gen_sym_eig_top: diagonal case") {
    const Matrix sb = Matrix::diagonal(Vector{4.0, 1.0});
    const Matrix sw = Matrix::diagonal(Vector{2.0, 1.0});
    const EigenPairs top = gen_sym_eig_top(sb, sw, 1, 0.0);
    CHECK(top.values[0] == doctest::Approx(2.0).epsilon(1e-12));
    // Sw-normalized first axis: v = (1/sqrt(2), 0).
    CHECK(std::abs(top.vectors(0, 0)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(top.vectors(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("gen_sym_eig_top: whitened-oracle equivalence on a random PSD pair") {
    Rng rng(32);
    const Matrix sb = testgen::random_psd(rng, 8, 8);
    const Matrix sw = testgen::random_spd(rng, 8);
    const double ridge = 0.01;
    const EigenPairs top = gen_sym_eig_top(sb, sw, 3, ridge);

    Matrix sw_r = sw;
    add_diagonal_in_place(sw_r, ridge);
    const EigenPairs whitened_full = sym_eig(naive_whiten(sb, sw_r));
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(top.values[j] == doctest::Approx(whitened_full.values[j]).epsilon(1e-9));
    }

    // Defining-equation residual: ||Sb v - value (Sw + ridge I) v|| <= 1e-8 ||Sb||.
    const double sb_norm = frobenius_norm(sb);
    for (std::size_t j = 0; j < 3; ++j) {
        Vector v(8);
        for (std::size_t i = 0; i < 8; ++i) v[i] = top.vectors(i, j);
        const Vector lhs = matvec(sb, v);
        const Vector rhs = matvec(sw_r, v);
        double res = 0.0;
        for (std::size_t i = 0; i < 8; ++i) {
            const double d = lhs[i] - top.values[j] * rhs[i];
            res += d * d;
        }
        CHECK(std::sqrt(res) <= 1e-8 * sb_norm);
        CHECK(top.values[j] >= -1e-10);
    }
}

TEST_CASE("gen_sym_eig_top: r = p reproduces the whitened trace") {
    Rng rng(33);
    const std::size_t p = 7;
    const Matrix sb = testgen::random_psd(rng, p, p);
    const Matrix sw = testgen::random_spd(rng, p);
    const EigenPairs all = gen_sym_eig_top(sb, sw, p, 0.0);
    const Matrix whitened = naive_whiten(sb, sw);
    double trace = 0.0;
    for (std::size_t i = 0; i < p; ++i) trace += whitened(i, i);
    double sum = 0.0;
    for (double v : all.values) sum += v;
    CHECK(std::abs(sum - trace) <= 1e-8 * std::max(1.0, std::abs(trace)));
}

TEST_CASE("gen_sym_eig_top: indefinite metric rejected with ridge guidance") {
    const Matrix sb = Matrix::identity(3);
    const Matrix sw = Matrix::diagonal(Vector{1.0, -1.0, 1.0});
    CHECK_THROWS_WITH_AS(gen_sym_eig_top(sb, sw, 1, 0.0), doctest::Contains("increase ridge"),
                         SingularityError);
    CHECK_THROWS_AS(gen_sym_eig_top(sb, sw, 0, 0.0), ParameterError);
    CHECK_THROWS_AS(gen_sym_eig_top(sb, sw, 4, 0.0), ParameterError);
    CHECK_THROWS_AS(gen_sym_eig_top(sb, Matrix::identity(4), 1, 0.0), DimensionError);
    // A large enough ridge repairs the metric.
    const EigenPairs fixed = gen_sym_eig_top(sb, sw, 1, 2.0);
    CHECK(fixed.values.size() == 1);
}

TEST_CASE("solve_sylvester: decoupled case N = 0 gives M^-1 C") {
    Rng rng(41);
    const Matrix m = testgen::random_spd(rng, 6);
    const Matrix c = testgen::random_matrix(rng, 6, 4);
    const Matrix z = solve_sylvester(m, Matrix(4, 4), c);
    CHECK(max_abs_diff(matmul(m, z), c) <= 1e-10 * max_abs(c));
}

TEST_CASE("solve_sylvester: scalar shift M = N = I gives C/2") {
    Rng rng(42);
    const Matrix c = testgen::random_matrix(rng, 5, 5);
    const Matrix z = solve_sylvester(Matrix::identity(5), Matrix::identity(5), c);
    CHECK(max_abs_diff(z, 0.5 * c) <= 1e-14);
}

TEST_CASE("solve_sylvester: residual oracle on random SPD / Laplacian instances") {
    Rng rng(43);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t p = 2 + rng.uniform_below(63);
        const std::size_t n = 2 + rng.uniform_below(63);
        const Matrix m = testgen::random_spd(rng, p);
        const Matrix nn = testgen::random_laplacian(rng, n);
        const Matrix c = testgen::random_matrix(rng, p, n);
        const Matrix z = solve_sylvester(m, nn, c);
        const Matrix residual = matmul(m, z) + matmul(z, nn) - c;
        CHECK(frobenius_norm(residual) <= 1e-8 * frobenius_norm(c));
    }
}

TEST_CASE("solve_sylvester: singular shifted system is rejected") {
    // M has eigenvalue 1 and N has eigenvalue -1: the (1,-1) shift is singular.
    const Matrix m = Matrix::identity(2);
    const Matrix n = Matrix::diagonal(Vector{-1.0, 2.0});
    const Matrix c(2, 2, {1.0, 1.0, 1.0, 1.0});
    CHECK_THROWS_AS(solve_sylvester(m, n, c), SingularityError);
    CHECK_THROWS_AS(solve_sylvester(m, n, Matrix(3, 2)), DimensionError);
}

TEST_CASE("solve_sylvester_lowrank matches the dense route") {
    Rng rng(44);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t p = 8 + rng.uniform_below(24);
        const std::size_t n = 2 + rng.uniform_below(10);
        const std::size_t r = 1 + rng.uniform_below(4);
        Vector d(p);
        for (double& v : d) v = 0.1 + rng.uniform01();
        const Matrix u = testgen::random_matrix(rng, r, p);
        const Matrix nn = testgen::random_laplacian(rng, n);
        const Matrix c = testgen::random_matrix(rng, p, n);

        Matrix m = gram_t(u);
        for (std::size_t i = 0; i < p; ++i) m(i, i) += d[i];
        m = symmetrize(m);

        const EigenPairs eig_n = sym_eig(nn);
        const Matrix z_lr = solve_sylvester_lowrank(d, u, eig_n, c);
        const Matrix z_dense = solve_sylvester(m, nn, c);
        CHECK(max_abs_diff(z_lr, z_dense) <= 1e-9 * std::max(1.0, max_abs(z_dense)));

        const Matrix residual = matmul(m, z_lr) + matmul(z_lr, nn) - c;
        CHECK(frobenius_norm(residual) <= 1e-8 * frobenius_norm(c));
    }
}

TEST_CASE("solve_sylvester_lowrank: empty factor solves the diagonal system") {
    Rng rng(45);
    const std::size_t p = 6, n = 3;
    Vector d(p, 2.0);
    const Matrix c = testgen::random_matrix(rng, p, n);
    const Matrix z = solve_sylvester_lowrank(d, Matrix(), sym_eig(Matrix(n, n)), c);
    CHECK(max_abs_diff(z, 0.5 * c) <= 1e-14);
}

TEST_CASE("l21_norm: stated examples") {
    CHECK(l21_norm(Matrix(2, 2, {3.0, 4.0, 0.0, 0.0})) == 5.0);
    CHECK(l21_norm(Matrix(3, 4)) == 0.0);
    CHECK(l21_norm(Matrix::identity(2)) == 2.0);
}

TEST_CASE("l21_norm: dominates the Frobenius norm and scales absolutely") {
    Rng rng(51);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix m = testgen::random_matrix(rng, 1 + rng.uniform_below(8),
                                                1 + rng.uniform_below(8));
        CHECK(l21_norm(m) >= frobenius_norm(m) - 1e-12);
        const double c = -2.5;
        CHECK(l21_norm(c * m) == doctest::Approx(std::abs(c) * l21_norm(m)).epsilon(1e-12));
    }
}

TEST_CASE("cholesky solve round trip") {
    Rng rng(52);
    const Matrix a = testgen::random_spd(rng, 9);
    const Matrix b = testgen::random_matrix(rng, 9, 3);
    const Cholesky chol = Cholesky::compute(a);
    CHECK(max_abs_diff(matmul(a, chol.solve(b)), b) <= 1e-10 * std::max(1.0, max_abs(b)));
    CHECK_THROWS_AS(Cholesky::compute(Matrix::diagonal(Vector{1.0, 0.0})), SingularityError);
}
