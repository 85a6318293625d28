#include "dlufs/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "dlufs/errors.hpp"

namespace dlufs {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return fields;
}

bool parse_double(std::string_view field, double& out) {
    if (field.empty()) return false;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

DataMatrix load_csv(const std::string& path, const ExpectedDims& expected) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset file: " + path);

    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw ParseError(path + ": file contains no data", 1, 1);

    // Header row iff any first-line field fails to parse as a number.
    const auto first_fields = split_fields(lines[0]);
    bool has_header = false;
    for (const auto& f : first_fields) {
        double unused;
        if (!parse_double(f, unused)) {
            has_header = true;
            break;
        }
    }
    const bool has_labels = has_header && !first_fields.empty() &&
                            lower(first_fields.back()) == "label";
    const std::size_t n_cols = first_fields.size();
    const std::size_t n_features = has_labels ? n_cols - 1 : n_cols;
    if (n_features == 0) throw ParseError(path + ": no feature columns", 1, 1);

    const std::size_t first_data = has_header ? 1 : 0;
    const std::size_t n_samples = lines.size() - first_data;
    if (n_samples == 0) throw ParseError(path + ": no data rows", lines.size(), 1);

    Matrix samples(n_samples, n_features);
    std::vector<double> raw_labels;
    raw_labels.reserve(has_labels ? n_samples : 0);

    for (std::size_t s = 0; s < n_samples; ++s) {
        const std::size_t row_no = first_data + s + 1;  // 1-based for messages
        const auto fields = split_fields(lines[first_data + s]);
        if (fields.size() != n_cols) {
            throw ParseError(path + ": row " + std::to_string(row_no) + " has " +
                                 std::to_string(fields.size()) + " fields, expected " +
                                 std::to_string(n_cols),
                             row_no, std::min(fields.size(), n_cols) + 1);
        }
        for (std::size_t c = 0; c < n_cols; ++c) {
            double value;
            if (!parse_double(fields[c], value) || !std::isfinite(value)) {
                throw ParseError(path + ": non-numeric cell '" + std::string(fields[c]) +
                                     "' at row " + std::to_string(row_no) + ", column " +
                                     std::to_string(c + 1),
                                 row_no, c + 1);
            }
            if (has_labels && c == n_cols - 1) {
                raw_labels.push_back(value);
            } else {
                samples(s, c) = value;
            }
        }
    }

    DataMatrix data;
    data.values = transpose(samples);
    if (has_labels) {
        std::map<double, int> classes;
        for (double v : raw_labels) classes.emplace(v, 0);
        int next_id = 0;
        for (auto& [value, id] : classes) id = next_id++;
        LabelVector lv;
        lv.class_count = next_id;
        lv.labels.reserve(raw_labels.size());
        for (double v : raw_labels) lv.labels.push_back(classes.at(v));
        data.labels = std::move(lv);
    }

    if (expected.samples && *expected.samples != data.sample_count()) {
        throw ParameterError(path + ": expected " + std::to_string(*expected.samples) +
                             " samples, found " + std::to_string(data.sample_count()));
    }
    if (expected.features && *expected.features != data.feature_count()) {
        throw ParameterError(path + ": expected " + std::to_string(*expected.features) +
                             " features, found " + std::to_string(data.feature_count()));
    }
    if (expected.classes) {
        if (!data.labels) throw ParameterError(path + ": expected labels, none found");
        if (*expected.classes != static_cast<std::size_t>(data.labels->class_count)) {
            throw ParameterError(path + ": expected " + std::to_string(*expected.classes) +
                                 " classes, found " + std::to_string(data.labels->class_count));
        }
    }
    return data;
}

}  // namespace

DataMatrix load_dataset(const std::string& path, const std::string& format,
                        const ExpectedDims& expected) {
    std::string fmt = lower(format);
    if (fmt == "auto") {
        const std::size_t dot = path.rfind('.');
        const std::string ext = dot == std::string::npos ? "" : lower(path.substr(dot + 1));
        if (ext == "csv" || ext == "txt" || ext.empty()) {
            fmt = "csv";
        } else {
            throw ParseError(path + ": cannot infer format from extension '." + ext + "'", 0, 0);
        }
    }
    if (fmt != "csv") throw ParseError(path + ": unknown format '" + format + "'", 0, 0);
    return load_csv(path, expected);
}

void zscore_features(Matrix& values) {
    const std::size_t p = values.rows();
    const std::size_t n = values.cols();
    for (std::size_t i = 0; i < p; ++i) {
        double* row = values.row_ptr(i);
        double mean = 0.0;
        for (std::size_t j = 0; j < n; ++j) mean += row[j];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            row[j] -= mean;
            var += row[j] * row[j];
        }
        var /= static_cast<double>(n);
        if (var > 0.0) {
            const double inv = 1.0 / std::sqrt(var);
            for (std::size_t j = 0; j < n; ++j) row[j] *= inv;
        }
    }
}

}  // namespace dlufs
