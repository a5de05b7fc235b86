#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ovo/svm.hpp"

namespace ovo {

enum class EstimatorKind { Cv, SvBound, MarginBound };

struct GenErrorEstimate {
    double value = 0.0;  // in [0, 1]
    EstimatorKind kind = EstimatorKind::Cv;
    ClassPair pair;
    bool uninformative = false;  // set when the estimate had to fall back to 0.5
    int folds_used = 0;          // cv only; < requested k when a class was small
};

// k-fold cross-validation misclassification fraction of the binary problem.
// Folds are stratified under `seed`, independently of any outer folds. When
// the smaller class has fewer than k members, k is reduced to that size
// (minimum 2, recorded in folds_used); a class with fewer than 2 members
// makes the estimate undefined and yields 0.5 flagged uninformative.
GenErrorEstimate cv_generalization_error(const TwoClassView& view, const KernelSpec& kernel,
                                         const TrainConfig& cfg, int k, std::uint64_t seed);

// Same estimate under an explicit fold assignment (one fold index per view
// position); the estimate depends only on the (row, fold) pairing, not on
// row order.
GenErrorEstimate cv_generalization_error(const TwoClassView& view, const KernelSpec& kernel,
                                         const TrainConfig& cfg,
                                         std::span<const int> fold_assignment);

// sv_count / train_count.
GenErrorEstimate sv_bound(const BinaryModel& model);

// Inverse margins min-max normalized across the ensemble; all-equal margins
// normalize to zeros. Throws on any non-positive margin.
std::vector<GenErrorEstimate> margin_bound(std::span<const BinaryModel> models);

// Pearson product-moment correlation. Requires equal lengths >= 3 and
// nonzero variance on both sides.
double pearson_r(std::span<const double> x, std::span<const double> y);

// Spearman rank correlation (average ranks on ties); used by estimator
// quality checks.
double spearman_rho(std::span<const double> x, std::span<const double> y);

}  // namespace ovo
