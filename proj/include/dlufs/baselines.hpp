#pragma once

#include <map>
#include <string>
#include <vector>

#include "dlufs/graph.hpp"
#include "dlufs/matrix.hpp"

namespace dlufs {

/// Output of a reference selector: a method name, the feature ranking
/// (best first) and a record of the parameters that produced it.
struct SelectorResult {
    std::string method;
    std::vector<std::size_t> ranking;
    std::map<std::string, double> metadata;
};

/// Identity ranking; evaluating it with m = p reproduces the
/// all-features protocol.
SelectorResult baseline_all(std::size_t p);

/// Laplacian Score filter: per feature f, the ratio f~^T L f~ / f~^T Dg f~
/// of the degree-weighted mean-centered feature, ranked ascending (lower
/// preserves locality better). Zero-variance features get the worst rank.
SelectorResult laplacian_score(const Matrix& x, const SimilarityGraph& graph);

}  // namespace dlufs
