#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dlufs/evaluation.hpp"
#include "dlufs/matrix.hpp"

namespace dlufs {

/// Full description of an evaluation run. Defaults mirror the standard
/// protocol: k = 5, sigma = 1, alpha/lambda grids {1e-4, 1e-2, 1, 1e2,
/// 1e4}, feature counts 50..300, 20 repetitions.
struct ExperimentConfig {
    std::string dataset_path;
    std::string format = "auto";
    std::string preprocessing = "none";  // none | zscore
    std::vector<std::string> methods = {"dlufs", "baseline", "laplacian_score"};
    std::vector<double> alpha_grid = {1e-4, 1e-2, 1.0, 1e2, 1e4};
    std::vector<double> lambda_grid = {1e-4, 1e-2, 1.0, 1e2, 1e4};
    std::size_t rank = 0;  // 0 = derive from the data (see default_rank)
    std::size_t k = 5;
    double sigma = 1.0;
    std::vector<std::size_t> feature_counts = {50, 100, 150, 200, 250, 300};
    std::size_t repetitions = 20;
    std::uint64_t base_seed = 0;
    std::string output_dir = "out";
    double eps = 1e-8;
    double ridge = -1.0;  // negative = scale-aware automatic ridge
    std::size_t max_iters = 50;
    double tol = 1e-3;

    void validate() const;
};

/// One (method, feature count) result cell with its provenance.
struct CellStats {
    std::size_t feature_count = 0;  // requested
    std::size_t used_features = 0;  // after clamping / the all-features rule
    EvalStats stats;
    std::optional<double> alpha;  // grid point, methods with a grid only
    std::optional<double> lambda;
};

/// One optimizer run at a grid point, or its failure record.
struct FitRecord {
    double alpha = 0.0;
    double lambda = 0.0;
    bool failed = false;
    std::string error;
    bool converged = false;
    Vector objective_history;
    std::vector<CellStats> cells;
};

struct MethodReport {
    std::string name;
    std::vector<FitRecord> fits;  // empty for methods without an optimizer
    std::vector<CellStats> best;  // per feature count, best grid point
};

struct Report {
    ExperimentConfig config;
    std::size_t samples = 0;
    std::size_t features = 0;
    std::size_t classes = 0;
    std::size_t rank_used = 0;
    std::string kernel_backend;
    std::vector<std::string> warnings;
    std::vector<MethodReport> methods;
};

/// Rank default when the config leaves it unset: min(classes, p-1, n-1)
/// with labels, min(20, p-1, n-1) without.
std::size_t default_rank(std::size_t p, std::size_t n, std::optional<std::size_t> classes);

/// Execute the full protocol: load and optionally standardize the dataset,
/// build the graph once, run every method over its grid, evaluate each
/// ranking at each feature count with seeded k-means repetitions, and
/// select the best grid point per cell by ACC mean (ties: NMI mean, then
/// smaller alpha, then smaller lambda). A diverging fit marks its grid
/// point failed and the run continues.
Report run_experiment(const ExperimentConfig& config);

/// Write summary.json, metrics.csv and convergence_<method>.csv under
/// outdir. Numeric text is emitted with round-trip precision so a re-parse
/// reproduces the exact values.
void emit_reports(const Report& report, const std::string& outdir);

std::string report_to_json_string(const Report& report);
Report report_from_json_string(const std::string& text);

}  // namespace dlufs
