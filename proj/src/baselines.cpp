#include "dlufs/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dlufs/errors.hpp"
#include "dlufs/kernels.hpp"

namespace dlufs {

SelectorResult baseline_all(std::size_t p) {
    if (p < 1) throw ParameterError("baseline_all: p must be at least 1");
    SelectorResult result;
    result.method = "baseline";
    result.ranking.resize(p);
    std::iota(result.ranking.begin(), result.ranking.end(), 0);
    return result;
}

SelectorResult laplacian_score(const Matrix& x, const SimilarityGraph& graph) {
    const std::size_t p = x.rows();
    const std::size_t n = x.cols();
    if (graph.sample_count() != n) {
        throw DimensionError("laplacian_score: graph sample count does not match data");
    }
    if (!x.all_finite()) throw ParameterError("laplacian_score: non-finite data");

    double total_degree = 0.0;
    for (double d : graph.degrees) total_degree += d;

    Vector scores(p);
    Vector centered(n);
    const double scale = max_abs(x);
    for (std::size_t f = 0; f < p; ++f) {
        const double* row = x.row_ptr(f);
        double weighted_mean = 0.0;
        for (std::size_t j = 0; j < n; ++j) weighted_mean += graph.degrees[j] * row[j];
        weighted_mean /= total_degree;
        for (std::size_t j = 0; j < n; ++j) centered[j] = row[j] - weighted_mean;

        double denom = 0.0;
        for (std::size_t j = 0; j < n; ++j) denom += graph.degrees[j] * centered[j] * centered[j];
        if (denom <= scale * scale * 1e-24) {
            scores[f] = std::numeric_limits<double>::infinity();
            continue;
        }
        const Vector lc = matvec(graph.laplacian, centered);
        scores[f] = kernels::dot(centered.data(), lc.data(), n) / denom;
    }

    SelectorResult result;
    result.method = "laplacian_score";
    result.ranking.resize(p);
    std::iota(result.ranking.begin(), result.ranking.end(), 0);
    std::stable_sort(result.ranking.begin(), result.ranking.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    return result;
}

}  // namespace dlufs
