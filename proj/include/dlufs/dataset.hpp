#pragma once

#include <optional>
#include <string>

#include "dlufs/evaluation.hpp"
#include "dlufs/matrix.hpp"

namespace dlufs {

/// Data in the internal features x samples orientation, with optional
/// ground-truth class labels carried alongside.
struct DataMatrix {
    Matrix values;  // p x n
    std::optional<LabelVector> labels;

    std::size_t feature_count() const { return values.rows(); }
    std::size_t sample_count() const { return values.cols(); }
};

/// Expected dataset dimensions for post-load validation.
struct ExpectedDims {
    std::optional<std::size_t> samples;
    std::optional<std::size_t> features;
    std::optional<std::size_t> classes;
};

/// Load a dataset. CSV files hold one sample per row, one feature per
/// column, with an optional header; when the header's last column is
/// "label" that column becomes the class labels (distinct values are
/// mapped to 0..c-1 in ascending order). The matrix is transposed into
/// the internal features x samples orientation. `format` is "csv" or
/// "auto" (extension-based).
DataMatrix load_dataset(const std::string& path, const std::string& format = "auto",
                        const ExpectedDims& expected = {});

/// Per-feature z-score standardization (population std). Zero-variance
/// features are centered only.
void zscore_features(Matrix& values);

}  // namespace dlufs
