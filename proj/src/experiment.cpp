#include "dlufs/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "dlufs/baselines.hpp"
#include "dlufs/dataset.hpp"
#include "dlufs/dlufs.hpp"
#include "dlufs/errors.hpp"
#include "dlufs/graph.hpp"
#include "dlufs/kernels.hpp"

namespace dlufs {

namespace {

using nlohmann::json;

const std::set<std::string> kKnownMethods = {"dlufs", "baseline", "laplacian_score"};

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CellStats evaluate_cell(const Matrix& x, const LabelVector& labels,
                        const std::vector<std::size_t>& ranking, std::size_t requested,
                        std::size_t used, const ExperimentConfig& config) {
    CellStats cell;
    cell.feature_count = requested;
    cell.used_features = used;
    cell.stats = evaluate_selection(x, labels, ranking, used, config.repetitions, config.base_seed);
    return cell;
}

bool better_cell(const CellStats& a, const CellStats& b) {
    if (a.stats.acc_mean != b.stats.acc_mean) return a.stats.acc_mean > b.stats.acc_mean;
    if (a.stats.nmi_mean != b.stats.nmi_mean) return a.stats.nmi_mean > b.stats.nmi_mean;
    if (*a.alpha != *b.alpha) return *a.alpha < *b.alpha;
    return *a.lambda < *b.lambda;
}

json cell_to_json(const CellStats& cell) {
    json j;
    j["feature_count"] = cell.feature_count;
    j["used_features"] = cell.used_features;
    j["acc_mean"] = cell.stats.acc_mean;
    j["acc_std"] = cell.stats.acc_std;
    j["nmi_mean"] = cell.stats.nmi_mean;
    j["nmi_std"] = cell.stats.nmi_std;
    j["repetitions"] = cell.stats.repetitions;
    j["alpha"] = cell.alpha ? json(*cell.alpha) : json(nullptr);
    j["lambda"] = cell.lambda ? json(*cell.lambda) : json(nullptr);
    return j;
}

CellStats cell_from_json(const json& j) {
    CellStats cell;
    cell.feature_count = j.at("feature_count").get<std::size_t>();
    cell.used_features = j.at("used_features").get<std::size_t>();
    cell.stats.acc_mean = j.at("acc_mean").get<double>();
    cell.stats.acc_std = j.at("acc_std").get<double>();
    cell.stats.nmi_mean = j.at("nmi_mean").get<double>();
    cell.stats.nmi_std = j.at("nmi_std").get<double>();
    cell.stats.repetitions = j.at("repetitions").get<std::size_t>();
    if (!j.at("alpha").is_null()) cell.alpha = j.at("alpha").get<double>();
    if (!j.at("lambda").is_null()) cell.lambda = j.at("lambda").get<double>();
    return cell;
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["dataset"] = c.dataset_path;
    j["format"] = c.format;
    j["preprocessing"] = c.preprocessing;
    j["methods"] = c.methods;
    j["alpha_grid"] = c.alpha_grid;
    j["lambda_grid"] = c.lambda_grid;
    j["rank"] = c.rank;
    j["k"] = c.k;
    j["sigma"] = c.sigma;
    j["feature_counts"] = c.feature_counts;
    j["repetitions"] = c.repetitions;
    j["base_seed"] = c.base_seed;
    j["eps"] = c.eps;
    j["ridge"] = c.ridge;
    j["max_iters"] = c.max_iters;
    j["tol"] = c.tol;
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    c.dataset_path = j.at("dataset").get<std::string>();
    c.format = j.at("format").get<std::string>();
    c.preprocessing = j.at("preprocessing").get<std::string>();
    c.methods = j.at("methods").get<std::vector<std::string>>();
    c.alpha_grid = j.at("alpha_grid").get<std::vector<double>>();
    c.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
    c.rank = j.at("rank").get<std::size_t>();
    c.k = j.at("k").get<std::size_t>();
    c.sigma = j.at("sigma").get<double>();
    c.feature_counts = j.at("feature_counts").get<std::vector<std::size_t>>();
    c.repetitions = j.at("repetitions").get<std::size_t>();
    c.base_seed = j.at("base_seed").get<std::uint64_t>();
    c.eps = j.at("eps").get<double>();
    c.ridge = j.at("ridge").get<double>();
    c.max_iters = j.at("max_iters").get<std::size_t>();
    c.tol = j.at("tol").get<double>();
    return c;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (dataset_path.empty()) throw ParameterError("config: dataset path is required");
    if (preprocessing != "none" && preprocessing != "zscore") {
        throw ParameterError("config: preprocessing must be 'none' or 'zscore'");
    }
    if (methods.empty()) return;  // an empty method list is a valid no-op run
    for (const auto& m : methods) {
        if (kKnownMethods.count(m) == 0) throw ParameterError("config: unknown method '" + m + "'");
    }
    if (alpha_grid.empty() || lambda_grid.empty()) {
        throw ParameterError("config: alpha and lambda grids must be non-empty");
    }
    if (feature_counts.empty()) throw ParameterError("config: feature count list must be non-empty");
    if (repetitions < 1) throw ParameterError("config: repetitions must be at least 1");
    if (!(sigma > 0.0)) throw ParameterError("config: sigma must be positive");
    if (k < 1) throw ParameterError("config: k must be at least 1");
}

std::size_t default_rank(std::size_t p, std::size_t n, std::optional<std::size_t> classes) {
    const std::size_t cap = std::min(p - 1, n - 1);
    return std::min(classes.value_or(20), cap);
}

Report run_experiment(const ExperimentConfig& config) {
    config.validate();

    DataMatrix data = load_dataset(config.dataset_path, config.format);
    if (!data.labels && !config.methods.empty()) {
        throw ParameterError("run_experiment: the evaluation protocol requires labels");
    }
    if (config.preprocessing == "zscore") zscore_features(data.values);

    const std::size_t p = data.feature_count();
    const std::size_t n = data.sample_count();

    Report report;
    report.config = config;
    report.samples = n;
    report.features = p;
    report.classes = data.labels ? static_cast<std::size_t>(data.labels->class_count) : 0;
    report.kernel_backend = kernels::active_backend().name;

    if (config.methods.empty()) return report;

    report.rank_used = config.rank > 0
                           ? config.rank
                           : default_rank(p, n, static_cast<std::size_t>(data.labels->class_count));

    // Requested feature counts, clamped to the actual feature count.
    std::vector<std::pair<std::size_t, std::size_t>> counts;  // (requested, used)
    for (std::size_t m : config.feature_counts) {
        std::size_t used = m;
        if (m > p) {
            used = p;
            report.warnings.push_back("feature count " + std::to_string(m) +
                                      " exceeds p = " + std::to_string(p) + "; clamped");
        }
        if (m < 1) throw ParameterError("config: feature counts must be at least 1");
        counts.emplace_back(m, used);
    }

    const SimilarityGraph graph = build_similarity(data.values, GraphParams{config.k, config.sigma});

    for (const std::string& name : config.methods) {
        MethodReport method;
        method.name = name;
        if (name == "dlufs") {
            for (double alpha : config.alpha_grid) {
                for (double lambda : config.lambda_grid) {
                    FitRecord record;
                    record.alpha = alpha;
                    record.lambda = lambda;
                    DlufsParams params;
                    params.alpha = alpha;
                    params.lambda = lambda;
                    params.r = report.rank_used;
                    params.eps = config.eps;
                    if (config.ridge >= 0.0) {
                        params.auto_ridge = false;
                        params.ridge = config.ridge;
                    }
                    params.max_iters = config.max_iters;
                    params.tol = config.tol;
                    try {
                        const DlufsModel model = fit(data.values, graph, params);
                        record.converged = model.converged;
                        record.objective_history = model.history;
                        for (const auto& [requested, used] : counts) {
                            CellStats cell = evaluate_cell(data.values, *data.labels, model.ranking,
                                                           requested, used, config);
                            cell.alpha = alpha;
                            cell.lambda = lambda;
                            record.cells.push_back(cell);
                        }
                    } catch (const Error& e) {
                        record.failed = true;
                        record.error = e.what();
                    }
                    method.fits.push_back(std::move(record));
                }
            }
            for (std::size_t ci = 0; ci < counts.size(); ++ci) {
                const CellStats* best = nullptr;
                for (const FitRecord& record : method.fits) {
                    if (record.failed) continue;
                    const CellStats& cell = record.cells[ci];
                    if (best == nullptr || better_cell(cell, *best)) best = &cell;
                }
                if (best != nullptr) method.best.push_back(*best);
            }
        } else if (name == "baseline") {
            const SelectorResult sel = baseline_all(p);
            for (const auto& [requested, used] : counts) {
                (void)used;  // the all-features protocol always evaluates at p
                method.best.push_back(
                    evaluate_cell(data.values, *data.labels, sel.ranking, requested, p, config));
            }
        } else if (name == "laplacian_score") {
            const SelectorResult sel = laplacian_score(data.values, graph);
            for (const auto& [requested, used] : counts) {
                method.best.push_back(
                    evaluate_cell(data.values, *data.labels, sel.ranking, requested, used, config));
            }
        }
        report.methods.push_back(std::move(method));
    }
    return report;
}

std::string report_to_json_string(const Report& report) {
    json j;
    j["config"] = config_to_json(report.config);
    j["dataset"] = {{"samples", report.samples},
                    {"features", report.features},
                    {"classes", report.classes}};
    j["rank_used"] = report.rank_used;
    j["metadata"] = {{"std", "population"},
                     {"entropy_log", "natural"},
                     {"kmeans_init", "k-means++"},
                     {"kernel_backend", report.kernel_backend}};
    j["warnings"] = report.warnings;
    j["methods"] = json::array();
    for (const MethodReport& method : report.methods) {
        json jm;
        jm["name"] = method.name;
        jm["fits"] = json::array();
        for (const FitRecord& record : method.fits) {
            json jf;
            jf["alpha"] = record.alpha;
            jf["lambda"] = record.lambda;
            if (record.failed) {
                jf["error"] = record.error;
            } else {
                jf["converged"] = record.converged;
                jf["iterations"] = record.objective_history.size();
                jf["objective_history"] = record.objective_history;
                jf["cells"] = json::array();
                for (const CellStats& cell : record.cells) jf["cells"].push_back(cell_to_json(cell));
            }
            jm["fits"].push_back(std::move(jf));
        }
        jm["best"] = json::array();
        for (const CellStats& cell : method.best) jm["best"].push_back(cell_to_json(cell));
        j["methods"].push_back(std::move(jm));
    }
    return j.dump(2) + "\n";
}

Report report_from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("summary.json: ") + e.what(), 0, 0);
    }
    try {
        Report report;
        report.config = config_from_json(j.at("config"));
        report.samples = j.at("dataset").at("samples").get<std::size_t>();
        report.features = j.at("dataset").at("features").get<std::size_t>();
        report.classes = j.at("dataset").at("classes").get<std::size_t>();
        report.rank_used = j.at("rank_used").get<std::size_t>();
        report.kernel_backend = j.at("metadata").at("kernel_backend").get<std::string>();
        report.warnings = j.at("warnings").get<std::vector<std::string>>();
        for (const json& jm : j.at("methods")) {
            MethodReport method;
            method.name = jm.at("name").get<std::string>();
            for (const json& jf : jm.at("fits")) {
                FitRecord record;
                record.alpha = jf.at("alpha").get<double>();
                record.lambda = jf.at("lambda").get<double>();
                if (jf.contains("error")) {
                    record.failed = true;
                    record.error = jf.at("error").get<std::string>();
                } else {
                    record.converged = jf.at("converged").get<bool>();
                    record.objective_history = jf.at("objective_history").get<Vector>();
                    for (const json& jc : jf.at("cells")) record.cells.push_back(cell_from_json(jc));
                }
                method.fits.push_back(std::move(record));
            }
            for (const json& jc : jm.at("best")) method.best.push_back(cell_from_json(jc));
            report.methods.push_back(std::move(method));
        }
        return report;
    } catch (const json::exception& e) {
        throw ParseError(std::string("summary.json: ") + e.what(), 0, 0);
    }
}

void emit_reports(const Report& report, const std::string& outdir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) throw IoError("cannot create output directory " + outdir + ": " + ec.message());

    const auto write_file = [&](const std::string& name, const std::string& contents) {
        const fs::path path = fs::path(outdir) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot open " + path.string() + " for writing");
        out << contents;
        if (!out) throw IoError("failed writing " + path.string());
    };

    write_file("summary.json", report_to_json_string(report));
    if (report.methods.empty()) return;

    std::string metrics = "method,feature_count,acc_mean,acc_std,nmi_mean,nmi_std,alpha,lambda\n";
    for (const MethodReport& method : report.methods) {
        for (const CellStats& cell : method.best) {
            metrics += method.name + "," + std::to_string(cell.feature_count) + "," +
                       fmt_double(cell.stats.acc_mean) + "," + fmt_double(cell.stats.acc_std) +
                       "," + fmt_double(cell.stats.nmi_mean) + "," + fmt_double(cell.stats.nmi_std) +
                       "," + (cell.alpha ? fmt_double(*cell.alpha) : "") + "," +
                       (cell.lambda ? fmt_double(*cell.lambda) : "") + "\n";
        }
    }
    write_file("metrics.csv", metrics);

    for (const MethodReport& method : report.methods) {
        bool any = false;
        std::string csv = "alpha,lambda,iteration,objective\n";
        for (const FitRecord& record : method.fits) {
            if (record.failed) continue;
            for (std::size_t t = 0; t < record.objective_history.size(); ++t) {
                csv += fmt_double(record.alpha) + "," + fmt_double(record.lambda) + "," +
                       std::to_string(t + 1) + "," + fmt_double(record.objective_history[t]) + "\n";
                any = true;
            }
        }
        if (any) write_file("convergence_" + method.name + ".csv", csv);
    }
}

}  // namespace dlufs
