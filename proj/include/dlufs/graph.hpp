#pragma once

#include "dlufs/matrix.hpp"

namespace dlufs {

/// k-nearest-neighbour similarity graph parameters.
struct GraphParams {
    std::size_t k = 5;
    double sigma = 1.0;
};

/// Gaussian kNN similarity S, its degree vector and the unnormalized
/// Laplacian L = diag(degrees) - S. S is structurally sparse (at most 2k
/// off-diagonal entries per row) but stored dense; the spectral term needs
/// a dense eigendecomposition of L anyway.
struct SimilarityGraph {
    Matrix similarity;
    Vector degrees;
    Matrix laplacian;

    std::size_t sample_count() const { return degrees.size(); }
};

/// Build the similarity graph over the columns (samples) of the p x n data
/// matrix. S_ij = exp(-||x^i - x^j||^2 / sigma^2) when i is among the k
/// nearest neighbours of j or vice versa (symmetric OR rule), 0 otherwise;
/// S_ii = 0. Distance ties are broken by ascending sample index.
SimilarityGraph build_similarity(const Matrix& x, const GraphParams& params);

/// tr(Z L Z^T) for Z of shape p x n and L of shape n x n.
double laplacian_quadratic(const Matrix& z, const Matrix& l);

}  // namespace dlufs
