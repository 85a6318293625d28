// Command-line interface: `select` fits and ranks one dataset at a single
// (alpha, lambda), `evaluate` runs the full grid-search protocol and writes
// reports, `report` re-emits the CSV views from an existing summary.json.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dlufs/dataset.hpp"
#include "dlufs/dlufs.hpp"
#include "dlufs/errors.hpp"
#include "dlufs/experiment.hpp"
#include "dlufs/graph.hpp"
#include "dlufs/kernels.hpp"

namespace {

using nlohmann::json;

struct DatasetFlags {
    std::string path;
    std::string format = "auto";
    std::string preprocessing = "none";
    std::optional<std::size_t> expect_n;
    std::optional<std::size_t> expect_p;
    std::optional<std::size_t> expect_c;

    dlufs::ExpectedDims expected() const { return {expect_n, expect_p, expect_c}; }
};

void add_dataset_flags(CLI::App* cmd, DatasetFlags& flags) {
    cmd->add_option("--data", flags.path, "Path to the dataset file")->required();
    cmd->add_option("--format", flags.format, "Dataset format: csv or auto");
    cmd->add_option("--preprocess", flags.preprocessing,
                    "Per-feature preprocessing: none or zscore")
        ->check(CLI::IsMember({"none", "zscore"}));
    cmd->add_option("--expect-n", flags.expect_n, "Fail unless the sample count matches");
    cmd->add_option("--expect-p", flags.expect_p, "Fail unless the feature count matches");
    cmd->add_option("--expect-c", flags.expect_c, "Fail unless the class count matches");
}

dlufs::DataMatrix load_with_flags(const DatasetFlags& flags) {
    dlufs::DataMatrix data = dlufs::load_dataset(flags.path, flags.format, flags.expected());
    if (flags.preprocessing == "zscore") dlufs::zscore_features(data.values);
    return data;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw dlufs::IoError("cannot open " + path.string() + " for writing");
    out << contents;
    if (!out) throw dlufs::IoError("failed writing " + path.string());
}

int run_select(const DatasetFlags& dataset_flags, dlufs::DlufsParams params, double ridge_flag,
               std::size_t rank_flag, std::size_t k, double sigma, const std::string& outdir) {
    const dlufs::DataMatrix data = load_with_flags(dataset_flags);
    const std::size_t p = data.feature_count();
    const std::size_t n = data.sample_count();

    params.r = rank_flag > 0
                   ? rank_flag
                   : dlufs::default_rank(
                         p, n,
                         data.labels ? std::optional<std::size_t>(
                                           static_cast<std::size_t>(data.labels->class_count))
                                     : std::nullopt);
    if (ridge_flag >= 0.0) {
        params.auto_ridge = false;
        params.ridge = ridge_flag;
    }

    const dlufs::SimilarityGraph graph =
        dlufs::build_similarity(data.values, dlufs::GraphParams{k, sigma});
    const dlufs::DlufsModel model = dlufs::fit(data.values, graph, params);

    std::filesystem::create_directories(outdir);
    const dlufs::Vector norms = dlufs::row_norms(model.z);
    std::string ranking_csv = "rank,feature,z_row_norm\n";
    for (std::size_t i = 0; i < model.ranking.size(); ++i) {
        ranking_csv += std::to_string(i) + "," + std::to_string(model.ranking[i]) + "," +
                       fmt_double(norms[model.ranking[i]]) + "\n";
    }
    write_text(std::filesystem::path(outdir) / "ranking.csv", ranking_csv);

    json meta;
    meta["dataset"] = dataset_flags.path;
    meta["preprocessing"] = dataset_flags.preprocessing;
    meta["alpha"] = params.alpha;
    meta["lambda"] = params.lambda;
    meta["rank"] = params.r;
    meta["k"] = k;
    meta["sigma"] = sigma;
    meta["eps"] = params.eps;
    meta["ridge"] = params.auto_ridge ? json("auto") : json(params.ridge);
    meta["max_iters"] = params.max_iters;
    meta["tol"] = params.tol;
    meta["converged"] = model.converged;
    meta["iterations"] = model.history.size();
    meta["objective_history"] = model.history;
    meta["kernel_backend"] = dlufs::kernels::active_backend().name;
    write_text(std::filesystem::path(outdir) / "fit.json", meta.dump(2) + "\n");

    std::cout << "wrote " << outdir << "/ranking.csv and " << outdir << "/fit.json ("
              << model.history.size() << " iterations, "
              << (model.converged ? "converged" : "max iterations") << ")\n";
    return 0;
}

int run_evaluate(const DatasetFlags& dataset_flags, dlufs::ExperimentConfig config) {
    if (dataset_flags.expect_n || dataset_flags.expect_p || dataset_flags.expect_c) {
        (void)dlufs::load_dataset(dataset_flags.path, dataset_flags.format,
                                  dataset_flags.expected());
    }
    config.dataset_path = dataset_flags.path;
    config.format = dataset_flags.format;
    config.preprocessing = dataset_flags.preprocessing;

    const dlufs::Report report = dlufs::run_experiment(config);
    dlufs::emit_reports(report, config.output_dir);
    std::cout << "wrote reports for " << report.methods.size() << " method(s) to "
              << config.output_dir << "\n";
    return 0;
}

int run_report(const std::string& summary_path, const std::string& outdir) {
    std::ifstream in(summary_path, std::ios::binary);
    if (!in) throw dlufs::IoError("cannot open " + summary_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const dlufs::Report report = dlufs::report_from_json_string(buffer.str());
    dlufs::emit_reports(report, outdir);
    std::cout << "re-emitted reports to " << outdir << "\n";
    return 0;
}

void print_error_json(const std::string& type, const std::string& message) {
    json j;
    j["error"] = {{"type", type}, {"message", message}};
    std::cerr << j.dump() << "\n";
}

template <typename E>
bool emit_if(const std::exception& e, const char* name) {
    if (dynamic_cast<const E*>(&e) != nullptr) {
        print_error_json(name, e.what());
        return true;
    }
    return false;
}

void report_exception(const std::exception& e) {
    if (emit_if<dlufs::DimensionError>(e, "dimension")) return;
    if (emit_if<dlufs::SymmetryError>(e, "symmetry")) return;
    if (emit_if<dlufs::SingularityError>(e, "singularity")) return;
    if (emit_if<dlufs::DivergenceError>(e, "divergence")) return;
    if (emit_if<dlufs::ParseError>(e, "parse")) return;
    if (emit_if<dlufs::ParameterError>(e, "parameter")) return;
    if (emit_if<dlufs::IoError>(e, "io")) return;
    print_error_json("internal", e.what());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low-rank dictionary learning for unsupervised feature selection"};
    app.require_subcommand(1);

    // select
    DatasetFlags sel_data;
    dlufs::DlufsParams sel_params;
    sel_params.alpha = 1.0;
    sel_params.lambda = 1.0;
    double sel_ridge = -1.0;
    std::size_t sel_rank = 0;
    std::size_t sel_k = 5;
    double sel_sigma = 1.0;
    std::string sel_out = "out";
    CLI::App* select = app.add_subcommand("select", "Fit and rank the features of one dataset");
    add_dataset_flags(select, sel_data);
    select->add_option("--alpha", sel_params.alpha, "Spectral weight");
    select->add_option("--lambda", sel_params.lambda, "Row-sparsity weight");
    select->add_option("--r", sel_rank, "Induced rank (0 = derive from the data)");
    select->add_option("--k", sel_k, "Neighbour count for the similarity graph");
    select->add_option("--sigma", sel_sigma, "Gaussian kernel width");
    select->add_option("--eps", sel_params.eps, "Reweighting floor");
    select->add_option("--ridge", sel_ridge, "Absolute S_w ridge (negative = automatic)");
    select->add_option("--max-iters", sel_params.max_iters, "Maximum optimizer sweeps");
    select->add_option("--tol", sel_params.tol, "Relative objective-change stopping tolerance");
    select->add_option("--out", sel_out, "Output directory");

    // evaluate
    DatasetFlags eval_data;
    dlufs::ExperimentConfig config;
    double eval_ridge = -1.0;
    CLI::App* evaluate = app.add_subcommand("evaluate", "Run the full clustering evaluation protocol");
    add_dataset_flags(evaluate, eval_data);
    evaluate->add_option("--methods", config.methods, "Methods: dlufs, baseline, laplacian_score")
        ->delimiter(',');
    evaluate->add_option("--alpha-grid", config.alpha_grid, "Alpha grid values")->delimiter(',');
    evaluate->add_option("--lambda-grid", config.lambda_grid, "Lambda grid values")->delimiter(',');
    evaluate->add_option("--r", config.rank, "Induced rank (0 = derive from the data)");
    evaluate->add_option("--k", config.k, "Neighbour count for the similarity graph");
    evaluate->add_option("--sigma", config.sigma, "Gaussian kernel width");
    evaluate->add_option("--counts", config.feature_counts, "Feature counts to evaluate")
        ->delimiter(',');
    evaluate->add_option("--reps", config.repetitions, "k-means repetitions per cell");
    evaluate->add_option("--seed", config.base_seed, "Base seed for all randomness");
    evaluate->add_option("--eps", config.eps, "Reweighting floor");
    evaluate->add_option("--ridge", eval_ridge, "Absolute S_w ridge (negative = automatic)");
    evaluate->add_option("--max-iters", config.max_iters, "Maximum optimizer sweeps");
    evaluate->add_option("--tol", config.tol, "Relative objective-change stopping tolerance");
    evaluate->add_option("--out", config.output_dir, "Output directory");

    // report
    std::string summary_path;
    std::string report_out = "out";
    CLI::App* report = app.add_subcommand("report", "Re-emit CSV reports from a summary.json");
    report->add_option("--summary", summary_path, "Path to an existing summary.json")->required();
    report->add_option("--out", report_out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error_json("usage", e.what());
        return 2;
    }

    try {
        if (select->parsed()) {
            return run_select(sel_data, sel_params, sel_ridge, sel_rank, sel_k, sel_sigma, sel_out);
        }
        if (evaluate->parsed()) {
            config.ridge = eval_ridge;
            return run_evaluate(eval_data, config);
        }
        if (report->parsed()) {
            return run_report(summary_path, report_out);
        }
    } catch (const std::exception& e) {
        report_exception(e);
        return 1;
    }
    return 0;
}
