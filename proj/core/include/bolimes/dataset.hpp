#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bolimes/matrix.hpp"

namespace bolimes {

struct DatasetMeta {
    std::string name;
    std::size_t n_samples = 0;
    std::size_t n_features = 0;
    int n_classes = 0;
};

/// A sample-by-feature expression matrix with dense class ids. Immutable
/// after construction; safe to share across workers.
struct Dataset {
    Matrix x;                                // n_samples x n_features
    std::vector<int> labels;                 // dense ids in [0, n_classes)
    std::vector<std::string> feature_names;  // unique
    std::vector<std::string> class_names;    // id -> original label text
    std::string name;
    std::string label_column = "label";

    std::size_t n_samples() const { return x.rows(); }
    std::size_t n_features() const { return x.cols(); }
    int n_classes() const { return static_cast<int>(class_names.size()); }

    DatasetMeta meta() const { return {name, n_samples(), n_features(), n_classes()}; }

    /// Enforce the construction invariants: finite values, consistent shapes,
    /// unique feature names, K >= 2 with every class present.
    void validate() const;

    Dataset select_rows(std::span<const std::size_t> indices) const;
    Dataset select_columns(std::span<const std::size_t> indices) const;

    std::vector<std::size_t> class_counts() const;
};

struct SplitPair {
    Dataset train;
    Dataset test;
    std::uint64_t seed = 0;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
};

struct SyntheticSpec {
    std::size_t n_samples = 200;
    std::size_t n_informative = 10;
    std::size_t n_noise = 490;
    int n_classes = 3;
    double class_separation = 2.0;  // mean gap between adjacent class levels, in sigmas
    std::uint64_t seed = 42;
};

/// Parse a UTF-8, comma-separated file with a header row. `label_column`
/// names the label column; every other cell must be a finite real. Labels are
/// mapped to dense ids in first-appearance order and the mapping is kept in
/// `class_names` for reporting.
Dataset load_csv(const std::string& path, const std::string& label_column);

/// Write a Dataset back to CSV. Values are serialized at full (shortest
/// round-trip) precision so load_csv(save_csv(ds)) reproduces the matrix
/// bit-exactly and the label mapping unchanged.
void save_csv(const Dataset& ds, const std::string& path);

/// Stratified train/test split. Per class: floor(n_c * fraction) test slots,
/// remainders distributed to the largest fractional parts (ties to the lower
/// class id) until the total equals ceil(n * fraction). Deterministic in
/// (ds, fraction, seed); row order within each half follows the source.
SplitPair stratified_split(const Dataset& ds, double test_fraction, std::uint64_t seed);

/// Stratified fold assignment for k-fold cross validation: fold id per sample,
/// each class spread as evenly as permutation allows.
std::vector<int> stratified_folds(const Dataset& ds, int n_folds, std::uint64_t seed);

/// Ground-truth-known generator. Informative columns are class-conditionally
/// shifted unit gaussians whose class means sit `class_separation` sigmas
/// apart; noise columns are standard gaussians independent of the labels.
/// Returns the dataset and the sorted informative column indices.
std::pair<Dataset, std::vector<std::size_t>> synthesize(const SyntheticSpec& spec);

/// Per-column affine standardization fitted on training data (population
/// statistics). Zero-variance columns map to all-zeros and are flagged.
class Standardizer {
public:
    static Standardizer fit(const Matrix& train);

    Matrix transform(const Matrix& m) const;
    void transform_row(std::span<const double> in, std::span<double> out) const;
    void inverse_row(std::span<const double> in, std::span<double> out) const;

    std::size_t n_features() const { return means_.size(); }
    std::span<const double> means() const { return means_; }
    std::span<const double> stds() const { return stds_; }
    const std::vector<bool>& constant_columns() const { return constant_; }

private:
    std::vector<double> means_;
    std::vector<double> stds_;
    std::vector<bool> constant_;
};

/// Standardize `apply_to` with statistics fitted on `train`; returns both
/// standardized matrices plus the fitted transform.
struct ZScoreResult {
    Matrix train;
    Matrix applied;
    Standardizer standardizer;
};
ZScoreResult zscore(const Matrix& train, const Matrix& apply_to);

}  // namespace bolimes
