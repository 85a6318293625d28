#pragma once

// Shared data generators for the unit and acceptance suites. Everything is
// seeded; no test input depends on global state.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "dlufs/matrix.hpp"
#include "dlufs/rng.hpp"

namespace testgen {

inline dlufs::Matrix random_matrix(dlufs::Rng& rng, std::size_t rows, std::size_t cols,
                                   double scale = 1.0) {
    dlufs::Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.normal();
    return m;
}

// Well-conditioned SPD matrix A A^T/n + shift I.
inline dlufs::Matrix random_spd(dlufs::Rng& rng, std::size_t n, double shift = 0.5) {
    const dlufs::Matrix a = random_matrix(rng, n, n);
    dlufs::Matrix s = dlufs::gram(a);
    for (std::size_t i = 0; i < s.size(); ++i) s.data()[i] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) s(i, i) += shift;
    return dlufs::symmetrize(s);
}

// PSD matrix of the given rank.
inline dlufs::Matrix random_psd(dlufs::Rng& rng, std::size_t n, std::size_t rank) {
    const dlufs::Matrix a = random_matrix(rng, n, rank);
    dlufs::Matrix s = dlufs::gram(a);
    for (std::size_t i = 0; i < s.size(); ++i) s.data()[i] /= static_cast<double>(rank);
    return dlufs::symmetrize(s);
}

// Weighted-graph Laplacian on a random connected-ish graph: symmetric PSD
// with zero row sums, the shape of the spectral term's N side.
inline dlufs::Matrix random_laplacian(dlufs::Rng& rng, std::size_t n) {
    dlufs::Matrix w(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = rng.uniform01() < 0.4 ? rng.uniform01() : 0.0;
            w(i, j) = v;
            w(j, i) = v;
        }
    }
    // A path backbone keeps the graph connected.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        w(i, i + 1) += 0.5;
        w(i + 1, i) += 0.5;
    }
    dlufs::Matrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        double deg = 0.0;
        for (std::size_t j = 0; j < n; ++j) deg += w(i, j);
        for (std::size_t j = 0; j < n; ++j) l(i, j) = -w(i, j);
        l(i, i) = deg;
    }
    return l;
}

// Three Gaussian clusters separable in the first `informative` features,
// standard-normal noise elsewhere. Columns are samples; labels returned
// alongside. Cluster means are +/- separation on disjoint thirds of the
// informative block.
struct PlantedData {
    dlufs::Matrix x;  // p x n
    std::vector<int> labels;
    std::vector<std::size_t> informative;
};

inline PlantedData planted_clusters(std::uint64_t seed, std::size_t informative,
                                    std::size_t noise, std::size_t n, double separation = 4.0) {
    dlufs::Rng rng(seed);
    const std::size_t p = informative + noise;
    PlantedData data;
    data.x = dlufs::Matrix(p, n);
    data.labels.resize(n);
    data.informative.resize(informative);
    for (std::size_t f = 0; f < informative; ++f) data.informative[f] = f;

    for (std::size_t j = 0; j < n; ++j) {
        const int cluster = static_cast<int>(j % 3);
        data.labels[j] = cluster;
        for (std::size_t f = 0; f < p; ++f) {
            double mean = 0.0;
            if (f < informative) {
                // Each cluster owns a third of the informative block.
                const int owner = static_cast<int>(f % 3);
                mean = owner == cluster ? separation : 0.0;
            }
            data.x(f, j) = mean + rng.normal();
        }
    }
    return data;
}

// The nine-feature / six-sample scenario: three correlated feature groups
// {0,4,6}, {1,2,7}, {3,5,8} and three similar sample pairs (0,4), (1,5),
// (2,3). Feature rows within a group share a base pattern over the sample
// pairs plus small seeded noise.
struct BlockScenario {
    dlufs::Matrix x;  // 9 x 6
    std::vector<std::vector<std::size_t>> groups;
};

inline BlockScenario block_scenario(std::uint64_t seed, double noise = 0.02) {
    dlufs::Rng rng(seed);
    BlockScenario out;
    out.groups = {{0, 4, 6}, {1, 2, 7}, {3, 5, 8}};
    const std::size_t pair_of[6] = {0, 1, 2, 2, 0, 1};  // sample -> pair id
    // Group base intensities per sample pair; rows are nearly orthogonal
    // patterns of comparable energy, all non-negative.
    const double base[3][3] = {{1.0, 0.1, 0.4}, {0.3, 1.0, 0.1}, {0.1, 0.4, 1.0}};
    out.x = dlufs::Matrix(9, 6);
    for (std::size_t g = 0; g < 3; ++g) {
        for (std::size_t f : out.groups[g]) {
            for (std::size_t s = 0; s < 6; ++s) {
                out.x(f, s) = base[g][pair_of[s]] + noise * rng.uniform01();
            }
        }
    }
    return out;
}

// Singular values by one-sided Jacobi: rotate column pairs until mutually
// orthogonal; the column norms are then the singular values. Gives high
// relative accuracy on tiny singular values, unlike the Gram-matrix route.
inline std::vector<double> singular_values(dlufs::Matrix a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    const auto col_dot = [&](std::size_t i, std::size_t j) {
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) s += a(k, i) * a(k, j);
        return s;
    };
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double app = col_dot(i, i);
                const double aqq = col_dot(j, j);
                const double apq = col_dot(i, j);
                if (std::abs(apq) <= 1e-18 * std::sqrt(app * aqq) || apq == 0.0) continue;
                rotated = true;
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t k = 0; k < m; ++k) {
                    const double x = a(k, i);
                    const double y = a(k, j);
                    a(k, i) = c * x - s * y;
                    a(k, j) = s * x + c * y;
                }
            }
        }
        if (!rotated) break;
    }
    std::vector<double> sv(n);
    for (std::size_t j = 0; j < n; ++j) sv[j] = std::sqrt(col_dot(j, j));
    std::sort(sv.begin(), sv.end(), std::greater<>());
    return sv;
}

// Count of singular values of A B above 1e-10 * sigma_max.
inline std::size_t product_numerical_rank(const dlufs::Matrix& a, const dlufs::Matrix& b) {
    const std::vector<double> sv = singular_values(dlufs::matmul(a, b));
    if (sv.empty() || sv[0] == 0.0) return 0;
    std::size_t rank = 0;
    for (double s : sv) {
        if (s > 1e-10 * sv[0]) ++rank;
    }
    return rank;
}

inline bool is_permutation(const std::vector<std::size_t>& v, std::size_t n) {
    if (v.size() != n) return false;
    std::vector<char> seen(n, 0);
    for (std::size_t idx : v) {
        if (idx >= n || seen[idx]) return false;
        seen[idx] = 1;
    }
    return true;
}

}  // namespace testgen
