#pragma once

#include <cstdint>
#include <vector>

#include "dlufs/matrix.hpp"

namespace dlufs {

/// Integer labels in [0, class_count).
struct LabelVector {
    std::vector<int> labels;
    int class_count = 0;

    std::size_t size() const { return labels.size(); }
    void validate() const;
};

/// Mean and population standard deviation of ACC and NMI over repeated
/// clustering runs.
struct EvalStats {
    double acc_mean = 0.0;
    double acc_std = 0.0;
    double nmi_mean = 0.0;
    double nmi_std = 0.0;
    std::size_t repetitions = 0;
};

/// Per-iteration within-cluster sum of squares, exposed for testing.
struct KmeansTrace {
    Vector wcss;
};

/// Lloyd's algorithm with k-means++ seeding. Columns of `data` are samples.
/// Deterministic for a fixed seed; at most 300 iterations or until the
/// largest centroid shift drops below 1e-6. An emptied cluster is re-seeded
/// at the point farthest from its assigned centroid.
LabelVector kmeans(const Matrix& data, int c, std::uint64_t seed, KmeansTrace* trace = nullptr);

/// Injective mapping of predicted clusters to classes maximizing the total
/// agreement, solved as an assignment problem on the contingency matrix.
/// Entry j is the class assigned to cluster j, or -1 when there are more
/// clusters than classes and cluster j is left unmatched.
std::vector<int> hungarian_map(const LabelVector& y, const LabelVector& yhat);

/// Fraction of samples whose optimally mapped predicted label equals the
/// ground truth.
double accuracy(const LabelVector& y, const LabelVector& yhat);

/// I(y, yhat) / max(H(y), H(yhat)) with natural-log entropies. Identical
/// partitions give exactly 1 (including the single-cluster case); the
/// value is symmetric and invariant under relabeling.
double nmi(const LabelVector& y, const LabelVector& yhat);

/// Restrict X (features x samples) to the top-m ranked features, cluster
/// with seeds base_seed .. base_seed+repetitions-1, and aggregate ACC/NMI.
EvalStats evaluate_selection(const Matrix& x, const LabelVector& labels,
                             const std::vector<std::size_t>& ranking, std::size_t m,
                             std::size_t repetitions, std::uint64_t base_seed);

}  // namespace dlufs
