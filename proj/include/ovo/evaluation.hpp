#pragma once

#include <array>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ovo/combiners.hpp"
#include "ovo/dataset.hpp"
#include "ovo/ensemble.hpp"

namespace ovo {

struct ExperimentSpec {
    std::vector<KernelSpec> kernels;
    std::vector<CombinerKind> methods;
    int outer_k = 5;
    int inner_k = 5;
    std::uint64_t seed = 42;
    long order_sample_size = 50000;
    double vcf_threshold = 10.0;
    TrainConfig train;
};

struct MethodResult {
    std::vector<double> fold_accuracy;  // length outer_k; ddag/adag are order-averaged
    double mean_accuracy = 0.0;
    double mean_evaluations = 0.0;
    double mean_time_us = 0.0;  // wall time; not reproducible across machines
    double sd_time_us = 0.0;
};

// One kernel grid cell: results per method plus the vote-carrying verdicts
// (out-of-fold Max Wins / VCF runs) that feed risk analysis.
struct KernelCellResult {
    KernelSpec kernel;
    std::map<CombinerKind, MethodResult> methods;
    std::vector<Verdict> vote_verdicts;
    std::vector<int> vote_labels;
    bool all_converged = true;
};

struct ExperimentResult {
    FoldPlan plan;
    std::vector<KernelCellResult> cells;

    bool all_converged() const;
    // Mean of per-cell mean accuracies for one method.
    double grid_mean_accuracy(CombinerKind method) const;
};

struct ExperimentHooks {
    std::function<void(int fold, std::span<const int> train_rows, std::span<const int> val_rows)>
        on_fold;
};

// Outer protocol: per fold, fit scaling on the training rows, train the
// pairwise ensemble (inner-CV generalization errors use training rows only),
// classify the held-out rows with every method. Deterministic given seeds.
ExperimentResult run_experiment(const Dataset& data, const ExperimentSpec& spec, int jobs,
                                const ExperimentHooks* hooks = nullptr);

// Mean accuracy over elimination orders played back on precomputed decision
// tables. Exhaustive for up to 8 classes (all permutations for DDAG, all
// pair-order-canonical sequences for ADAG), otherwise `sample` seeded orders.
double order_average(int n_classes, std::span<const DecisionTable> tables,
                     std::span<const int> labels, CombinerKind method, long sample,
                     std::uint64_t seed, int jobs);
double order_average_serial(int n_classes, std::span<const DecisionTable> tables,
                            std::span<const int> labels, CombinerKind method, long sample,
                            std::uint64_t seed);

// Convenience overload that computes the tables from an ensemble.
double order_average(const PairwiseEnsemble& e, const Dataset& data, std::span<const int> rows,
                     CombinerKind method, long sample, std::uint64_t seed, int jobs);

// Distinct elimination orders the exhaustive path enumerates.
long exhaustive_order_count(int n_classes, CombinerKind method);

struct TTestReport {
    double t = 0.0;
    bool sig90 = false;
    bool sig95 = false;
    bool sig99 = false;
};

// One-tailed paired t-test on per-fold accuracies: t = mean(d)/(sd(d)/sqrt(k))
// with the k-1 denominator; flags compare |t| against one-tailed critical
// values at df = k-1. Zero-variance nonzero-mean differences give infinite t
// with all flags set.
TTestReport paired_t_test(std::span<const double> a, std::span<const double> b);

double t_critical(int df, int level);  // level: 90, 95 or 99

// Histogram over (target-class competition rank, dp_t bucket) of the
// misclassified-or-tied examples. Buckets have integer edges 0..20; bucket
// 20 collects dp_t >= 20. Ranks beyond 8 share the last row.
struct RiskHistogram {
    static constexpr int kRankRows = 9;   // ranks 1..8 plus 9+
    static constexpr int kDpBuckets = 21;

    std::array<std::array<long, kDpBuckets>, kRankRows> cells{};
    long high_risk_examples = 0;
    long total_examples = 0;
};

RiskHistogram risk_analysis(std::span<const Verdict> verdicts, std::span<const int> labels);

// Mean evaluations per method with its structural group.
struct CountRow {
    CombinerKind method;
    double mean_evaluations = 0.0;
    std::string group;       // "n-1", "quadratic" or "between"
    bool within_group = true;
};

std::vector<CountRow> count_report(int n_classes,
                                   const std::map<CombinerKind, MethodResult>& methods);

}  // namespace ovo
