#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ovo/common.hpp"

namespace ovo {

// In-memory dataset: numeric feature matrix plus densely encoded labels.
// Immutable by convention once built; all operations return new objects.
struct Dataset {
    Matrix features;
    std::vector<int> labels;              // per-row class index in [0, n_classes)
    std::vector<std::string> class_names; // original label strings, encoding order
    int n_classes = 0;

    std::size_t size() const { return labels.size(); }
    std::size_t dim() const { return features.cols(); }
    std::span<const double> row(std::size_t i) const { return features.row(i); }
};

// Per-column affine map fitted on one row subset: x -> 2(x-min)/(max-min) - 1.
// Constant columns map to 0.
struct ScalingParams {
    std::vector<double> col_min;
    std::vector<double> col_max;
};

// Stratified fold assignment. Folds are disjoint, cover all rows, global
// sizes differ by at most one, and per-class counts differ by at most one.
struct FoldPlan {
    int k = 0;
    std::vector<int> assignment;  // per-row fold index in [0, k)
    std::uint64_t seed = 0;

    std::vector<int> fold_rows(int fold) const;
    std::vector<int> train_rows(int fold) const;
};

// Column pick for load_csv: 0-based index (negative counts from the end)
// or a header name.
using ColumnSelector = std::variant<int, std::string>;

Dataset load_csv(const std::string& path, const ColumnSelector& label_column);
void save_csv(const Dataset& data, const std::string& path);

ScalingParams fit_scaling(const Dataset& data, std::span<const int> rows);

// Applies params to every row of data. Rows outside the fitting subset may
// land outside [-1, 1]; no clamping is applied.
Dataset apply_scaling(const Dataset& data, const ScalingParams& params);

FoldPlan stratified_kfold(const Dataset& data, int k, std::uint64_t seed);

// Core of stratified_kfold, reusable on any label vector (inner CV uses it
// on two-class views). Classes with fewer than k members are spread as
// evenly as possible.
std::vector<int> stratified_assignment(std::span<const int> labels, int n_classes, int k,
                                       std::uint64_t seed);

// Two-class slice of a dataset: rows of classes a and b in original order,
// with binary labels +1 for a and -1 for b. Holds a pointer to the parent
// dataset, which must outlive the view.
struct TwoClassView {
    const Dataset* data = nullptr;
    std::vector<int> rows;
    std::vector<std::int8_t> y;  // +1 / -1, aligned with rows
    int pos_class = -1;
    int neg_class = -1;

    std::size_t size() const { return rows.size(); }
    std::span<const double> x(std::size_t i) const { return data->row(rows[i]); }
    int label(std::size_t i) const { return y[i]; }

    // Sub-view restricted to positions `keep` (indices into this view).
    TwoClassView subset(std::span<const int> keep) const;
};

TwoClassView pair_subset(const Dataset& data, int class_a, int class_b);

// Copy of the rows in `rows`, preserving class encoding of the parent.
Dataset sub_dataset(const Dataset& data, std::span<const int> rows);

}  // namespace ovo
