#include "dlufs/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include "dlufs/errors.hpp"
#include "dlufs/kernels.hpp"
#include "dlufs/rng.hpp"

namespace dlufs {

namespace {

// Contingency counts[cluster][class].
std::vector<std::vector<long long>> contingency(const LabelVector& y, const LabelVector& yhat) {
    std::vector<std::vector<long long>> counts(
        static_cast<std::size_t>(yhat.class_count),
        std::vector<long long>(static_cast<std::size_t>(y.class_count), 0));
    for (std::size_t i = 0; i < y.size(); ++i) {
        counts[static_cast<std::size_t>(yhat.labels[i])][static_cast<std::size_t>(y.labels[i])]++;
    }
    return counts;
}

void require_comparable(const LabelVector& y, const LabelVector& yhat) {
    y.validate();
    yhat.validate();
    if (y.size() != yhat.size()) {
        throw DimensionError("label vectors have different lengths: " + std::to_string(y.size()) +
                             " vs " + std::to_string(yhat.size()));
    }
}

// Min-cost assignment on a square cost matrix (shortest augmenting paths
// with potentials). Returns the column matched to each row.
std::vector<int> assign_min_cost(const std::vector<std::vector<long long>>& cost) {
    const int n = static_cast<int>(cost.size());
    constexpr long long kBig = std::numeric_limits<long long>::max() / 4;
    std::vector<long long> u(n + 1, 0), v(n + 1, 0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<long long> minv(n + 1, kBig);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            int j1 = -1;
            long long delta = kBig;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const long long cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (match[j] != 0) row_to_col[match[j] - 1] = j - 1;
    }
    return row_to_col;
}

double entropy_from_sorted_counts(std::vector<long long> counts, std::size_t n) {
    std::sort(counts.begin(), counts.end());
    double acc = 0.0;
    for (long long c : counts) {
        if (c > 0) acc += static_cast<double>(c) * std::log(static_cast<double>(c));
    }
    return std::log(static_cast<double>(n)) - acc / static_cast<double>(n);
}

}  // namespace

void LabelVector::validate() const {
    if (labels.empty()) throw ParameterError("LabelVector: empty");
    if (class_count < 1) throw ParameterError("LabelVector: class_count must be at least 1");
    for (int v : labels) {
        if (v < 0 || v >= class_count) {
            throw ParameterError("LabelVector: label " + std::to_string(v) + " outside [0, " +
                                 std::to_string(class_count) + ")");
        }
    }
}

LabelVector kmeans(const Matrix& data, int c, std::uint64_t seed, KmeansTrace* trace) {
    const std::size_t n = data.cols();
    const std::size_t dim = data.rows();
    if (!data.all_finite()) throw ParameterError("kmeans: non-finite data");
    if (c < 1) throw ParameterError("kmeans: c must be at least 1");
    if (static_cast<std::size_t>(c) > n) {
        throw ParameterError("kmeans: c = " + std::to_string(c) + " exceeds sample count " +
                             std::to_string(n));
    }

    const Matrix pts = transpose(data);  // samples as contiguous rows
    const std::size_t k = static_cast<std::size_t>(c);
    Rng rng(seed);

    // k-means++ seeding.
    Matrix centers(k, dim);
    Vector d2(n, 0.0);
    {
        const std::size_t first = static_cast<std::size_t>(rng.uniform_below(n));
        for (std::size_t j = 0; j < dim; ++j) centers(0, j) = pts(first, j);
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = kernels::sqdist(pts.row_ptr(i), centers.row_ptr(0), dim);
        }
        for (std::size_t t = 1; t < k; ++t) {
            double total = 0.0;
            for (double v : d2) total += v;
            std::size_t pick;
            if (total > 0.0) {
                const double target = rng.uniform01() * total;
                double acc = 0.0;
                pick = n;  // sentinel
                std::size_t last_positive = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (d2[i] <= 0.0) continue;
                    acc += d2[i];
                    last_positive = i;
                    if (acc >= target && pick == n) pick = i;
                }
                if (pick == n) pick = last_positive;
            } else {
                // All points coincide with existing centers.
                pick = static_cast<std::size_t>(rng.uniform_below(n));
            }
            for (std::size_t j = 0; j < dim; ++j) centers(t, j) = pts(pick, j);
            for (std::size_t i = 0; i < n; ++i) {
                d2[i] = std::min(d2[i], kernels::sqdist(pts.row_ptr(i), centers.row_ptr(t), dim));
            }
        }
    }

    std::vector<int> assign(n, 0);
    Vector dist_to_center(n, 0.0);
    std::vector<std::size_t> sizes(k, 0);
    Matrix next(k, dim);
    for (int iter = 0; iter < 300; ++iter) {
        // Assignment step; ties go to the lowest centroid index.
        double wcss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = kernels::sqdist(pts.row_ptr(i), centers.row_ptr(0), dim);
            for (std::size_t t = 1; t < k; ++t) {
                const double d = kernels::sqdist(pts.row_ptr(i), centers.row_ptr(t), dim);
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(t);
                }
            }
            assign[i] = best;
            dist_to_center[i] = best_d;
            wcss += best_d;
        }
        if (trace != nullptr) trace->wcss.push_back(wcss);

        // Update step.
        next = Matrix(k, dim);
        std::fill(sizes.begin(), sizes.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            kernels::axpy(1.0, pts.row_ptr(i), next.row_ptr(static_cast<std::size_t>(assign[i])),
                          dim);
            sizes[static_cast<std::size_t>(assign[i])]++;
        }
        std::vector<std::size_t> empties;
        for (std::size_t t = 0; t < k; ++t) {
            if (sizes[t] == 0) {
                empties.push_back(t);
            } else {
                kernels::scale(next.row_ptr(t), 1.0 / static_cast<double>(sizes[t]), dim);
            }
        }
        if (!empties.empty()) {
            // Farthest points from their assigned centroids, one per empty
            // cluster, ties by ascending sample index.
            std::vector<std::size_t> order(n);
            for (std::size_t i = 0; i < n; ++i) order[i] = i;
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return dist_to_center[a] > dist_to_center[b];
            });
            for (std::size_t e = 0; e < empties.size(); ++e) {
                const std::size_t src = order[e % n];
                for (std::size_t j = 0; j < dim; ++j) next(empties[e], j) = pts(src, j);
            }
        }

        double max_shift2 = 0.0;
        for (std::size_t t = 0; t < k; ++t) {
            max_shift2 =
                std::max(max_shift2, kernels::sqdist(centers.row_ptr(t), next.row_ptr(t), dim));
        }
        centers = next;
        if (max_shift2 < 1e-6 * 1e-6 && empties.empty()) break;
    }

    // Final assignment against the converged centroids.
    LabelVector out;
    out.class_count = c;
    out.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        int best = 0;
        double best_d = kernels::sqdist(pts.row_ptr(i), centers.row_ptr(0), dim);
        for (std::size_t t = 1; t < k; ++t) {
            const double d = kernels::sqdist(pts.row_ptr(i), centers.row_ptr(t), dim);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(t);
            }
        }
        out.labels[i] = best;
    }
    return out;
}

std::vector<int> hungarian_map(const LabelVector& y, const LabelVector& yhat) {
    require_comparable(y, yhat);
    const auto counts = contingency(y, yhat);
    const std::size_t k =
        static_cast<std::size_t>(std::max(y.class_count, yhat.class_count));
    // Maximize agreement == minimize negated counts; padding stays at 0.
    std::vector<std::vector<long long>> cost(k, std::vector<long long>(k, 0));
    for (std::size_t i = 0; i < counts.size(); ++i) {
        for (std::size_t j = 0; j < counts[i].size(); ++j) cost[i][j] = -counts[i][j];
    }
    const std::vector<int> matched = assign_min_cost(cost);
    std::vector<int> map(static_cast<std::size_t>(yhat.class_count), -1);
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (matched[i] < y.class_count) map[i] = matched[i];
    }
    return map;
}

double accuracy(const LabelVector& y, const LabelVector& yhat) {
    require_comparable(y, yhat);
    const std::vector<int> map = hungarian_map(y, yhat);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (map[static_cast<std::size_t>(yhat.labels[i])] == y.labels[i]) ++agree;
    }
    return static_cast<double>(agree) / static_cast<double>(y.size());
}

double nmi(const LabelVector& y, const LabelVector& yhat) {
    require_comparable(y, yhat);
    const std::size_t n = y.size();
    const auto counts = contingency(y, yhat);

    std::vector<long long> row_sums(counts.size(), 0);
    std::vector<long long> col_sums(static_cast<std::size_t>(y.class_count), 0);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        for (std::size_t j = 0; j < counts[i].size(); ++j) {
            row_sums[i] += counts[i][j];
            col_sums[j] += counts[i][j];
        }
    }

    // Identical partitions (the contingency matrix is permutation-diagonal)
    // give exactly 1; this also covers the degenerate single-cluster case.
    bool diagonal = true;
    for (std::size_t i = 0; i < counts.size() && diagonal; ++i) {
        int nonzero = 0;
        for (std::size_t j = 0; j < counts[i].size(); ++j) {
            if (counts[i][j] > 0) ++nonzero;
        }
        if (row_sums[i] > 0 && nonzero != 1) diagonal = false;
    }
    for (std::size_t j = 0; j < col_sums.size() && diagonal; ++j) {
        int nonzero = 0;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            if (counts[i][j] > 0) ++nonzero;
        }
        if (col_sums[j] > 0 && nonzero != 1) diagonal = false;
    }
    if (diagonal) return 1.0;

    const double h_y = entropy_from_sorted_counts(col_sums, n);
    const double h_yhat = entropy_from_sorted_counts(row_sums, n);
    const double h_max = std::max(h_y, h_yhat);
    if (!(h_max > 0.0)) return 0.0;

    // Mutual information summed over cells in a canonical order so the
    // result is bit-identical under any relabeling of either side.
    std::vector<std::tuple<long long, long long, long long>> cells;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        for (std::size_t j = 0; j < counts[i].size(); ++j) {
            if (counts[i][j] > 0) cells.emplace_back(counts[i][j], row_sums[i], col_sums[j]);
        }
    }
    std::sort(cells.begin(), cells.end());
    double info = 0.0;
    const double dn = static_cast<double>(n);
    for (const auto& [nij, a, b] : cells) {
        const double num = dn * static_cast<double>(nij);
        const double den = static_cast<double>(a) * static_cast<double>(b);
        info += (static_cast<double>(nij) / dn) * std::log(num / den);
    }
    return std::clamp(info / h_max, 0.0, 1.0);
}

EvalStats evaluate_selection(const Matrix& x, const LabelVector& labels,
                             const std::vector<std::size_t>& ranking, std::size_t m,
                             std::size_t repetitions, std::uint64_t base_seed) {
    const std::size_t p = x.rows();
    labels.validate();
    if (labels.size() != x.cols()) {
        throw DimensionError("evaluate_selection: label count does not match sample count");
    }
    if (m < 1 || m > p) {
        throw ParameterError("evaluate_selection: m = " + std::to_string(m) + " outside [1, " +
                             std::to_string(p) + "]");
    }
    if (repetitions < 1) throw ParameterError("evaluate_selection: repetitions must be >= 1");
    if (ranking.size() != p) throw ParameterError("evaluate_selection: ranking length must be p");

    Matrix sub(m, x.cols());
    for (std::size_t i = 0; i < m; ++i) {
        if (ranking[i] >= p) throw ParameterError("evaluate_selection: ranking index out of range");
        std::copy(x.row_ptr(ranking[i]), x.row_ptr(ranking[i]) + x.cols(), sub.row_ptr(i));
    }

    double acc_sum = 0.0, acc_sq = 0.0, nmi_sum = 0.0, nmi_sq = 0.0;
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
        const LabelVector pred = kmeans(sub, labels.class_count, base_seed + rep);
        const double a = accuracy(labels, pred);
        const double m_i = nmi(labels, pred);
        acc_sum += a;
        acc_sq += a * a;
        nmi_sum += m_i;
        nmi_sq += m_i * m_i;
    }
    const double reps = static_cast<double>(repetitions);
    EvalStats stats;
    stats.repetitions = repetitions;
    stats.acc_mean = acc_sum / reps;
    stats.nmi_mean = nmi_sum / reps;
    stats.acc_std = std::sqrt(std::max(acc_sq / reps - stats.acc_mean * stats.acc_mean, 0.0));
    stats.nmi_std = std::sqrt(std::max(nmi_sq / reps - stats.nmi_mean * stats.nmi_mean, 0.0));
    return stats;
}

}  // namespace dlufs
