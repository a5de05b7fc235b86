#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ovo/dataset.hpp"
#include "ovo/generalization.hpp"
#include "ovo/matching.hpp"
#include "ovo/svm.hpp"

namespace ovo {

// Combiner-facing ensemble: class count, a decision oracle per unordered
// pair, and one generalization-error estimate per pair. The decision oracle
// returns a signed value; >= 0 means pair.a wins. Real SVM ensembles and
// synthetic outcome tables both fit behind this surface.
class PairwiseEnsemble {
  public:
    using DecisionFn = std::function<double(ClassPair, std::span<const double>)>;

    PairwiseEnsemble(int n_classes, DecisionFn decide, std::vector<double> gen_errors);

    int n_classes() const { return n_classes_; }

    double gen_error(ClassPair p) const { return gen_errors_[pair_index(p, n_classes_)]; }

    // All pairs ascending by gen_error, ties lexicographic.
    std::span<const ClassPair> sorted_pairs() const { return sorted_pairs_; }

    double decide_value(ClassPair p, std::span<const double> x) const { return decide_(p, x); }

    int decide_winner(ClassPair p, std::span<const double> x) const {
        return decide_(p, x) >= 0.0 ? p.a : p.b;
    }

    // Minimum-weight pairing of the full class set on gen_errors; computed
    // once and reused across test examples.
    const PairingResult& top_matching() const { return top_matching_; }

  private:
    int n_classes_;
    DecisionFn decide_;
    std::vector<double> gen_errors_;
    std::vector<ClassPair> sorted_pairs_;
    PairingResult top_matching_;
};

// Owning ensemble of trained binary SVMs, one per unordered class pair,
// each with its cross-validation generalization-error estimate.
struct TrainedPair {
    ClassPair pair;
    BinaryModel model;
    GenErrorEstimate gen_error;
};

struct TrainedEnsemble {
    int n_classes = 0;
    std::vector<std::string> class_names;
    std::vector<TrainedPair> pairs;  // position == pair_index

    bool all_converged() const;

    // Combiner view referencing this ensemble; the ensemble must outlive it.
    PairwiseEnsemble view() const;
};

struct EnsembleTrainOptions {
    KernelSpec kernel;
    TrainConfig train;
    int inner_k = 5;
    std::uint64_t seed = 0;
};

// Serial reference implementation, kept as the ground truth the OpenMP
// path is tested against.
TrainedEnsemble train_pairwise_serial(const Dataset& data, const EnsembleTrainOptions& opts);

// Same results as the serial path for any jobs count; pairs are trained in
// parallel, each writing only its own slot.
TrainedEnsemble train_pairwise(const Dataset& data, const EnsembleTrainOptions& opts, int jobs);

// Per-example table of pair winners (indexed by pair_index), the unit of
// work for order averaging and exhaustive playback.
using DecisionTable = std::vector<int>;

DecisionTable decision_table(const PairwiseEnsemble& e, std::span<const double> x);

std::vector<DecisionTable> decision_tables_serial(const PairwiseEnsemble& e, const Dataset& data,
                                                  std::span<const int> rows);
std::vector<DecisionTable> decision_tables(const PairwiseEnsemble& e, const Dataset& data,
                                           std::span<const int> rows, int jobs);

// Ensemble backed by a single outcome table (test and playback helper).
PairwiseEnsemble table_ensemble(int n_classes, DecisionTable table, std::vector<double> gen_errors);

}  // namespace ovo
