#include "dlufs/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dlufs/errors.hpp"
#include "dlufs/kernels.hpp"

namespace dlufs {

SimilarityGraph build_similarity(const Matrix& x, const GraphParams& params) {
    const std::size_t n = x.cols();
    if (!x.all_finite()) throw ParameterError("build_similarity: non-finite data");
    if (params.sigma <= 0.0) throw ParameterError("build_similarity: sigma must be positive");
    if (params.k < 1 || params.k >= n) {
        throw ParameterError("build_similarity: k = " + std::to_string(params.k) +
                             " must satisfy 1 <= k < n = " + std::to_string(n));
    }

    // Samples are columns; transpose once so each sample is contiguous.
    const Matrix samples = transpose(x);

    Matrix dist2(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        dist2(i, i) = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d2 = kernels::sqdist(samples.row_ptr(i), samples.row_ptr(j), x.rows());
            dist2(i, j) = d2;
            dist2(j, i) = d2;
        }
    }

    // kNN sets with deterministic tie-breaking (distance, then index).
    std::vector<std::vector<std::size_t>> neighbors(n);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) order.push_back(j);
        }
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(params.k),
                          order.end(), [&](std::size_t a, std::size_t b) {
                              if (dist2(i, a) != dist2(i, b)) return dist2(i, a) < dist2(i, b);
                              return a < b;
                          });
        neighbors[i].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(params.k));
    }

    SimilarityGraph graph;
    graph.similarity = Matrix(n, n);
    const double sigma2 = params.sigma * params.sigma;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j : neighbors[i]) {
            const double w = std::exp(-dist2(i, j) / sigma2);
            graph.similarity(i, j) = w;
            graph.similarity(j, i) = w;
        }
    }

    graph.degrees.assign(n, 0.0);
    graph.laplacian = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        double deg = 0.0;
        for (std::size_t j = 0; j < n; ++j) deg += graph.similarity(i, j);
        graph.degrees[i] = deg;
        for (std::size_t j = 0; j < n; ++j) graph.laplacian(i, j) = -graph.similarity(i, j);
        graph.laplacian(i, i) = deg;
    }
    return graph;
}

double laplacian_quadratic(const Matrix& z, const Matrix& l) {
    if (l.rows() != l.cols() || z.cols() != l.rows()) {
        throw DimensionError("laplacian_quadratic: Z is " + std::to_string(z.rows()) + "x" +
                             std::to_string(z.cols()) + " but L is " + std::to_string(l.rows()) +
                             "x" + std::to_string(l.cols()));
    }
    const Matrix zl = matmul(z, l);
    return kernels::dot(zl.data(), z.data(), z.size());
}

}  // namespace dlufs
