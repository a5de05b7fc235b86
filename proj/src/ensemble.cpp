#include "ovo/ensemble.hpp"

#include <algorithm>

#include "ovo/parallel.hpp"

namespace ovo {

PairwiseEnsemble::PairwiseEnsemble(int n_classes, DecisionFn decide,
                                   std::vector<double> gen_errors)
    : n_classes_(n_classes), decide_(std::move(decide)), gen_errors_(std::move(gen_errors)) {
    if (static_cast<int>(gen_errors_.size()) != pair_count(n_classes_)) {
        throw DataError("PairwiseEnsemble: gen_errors size does not match pair count");
    }
    sorted_pairs_ = all_pairs(n_classes_);
    std::stable_sort(sorted_pairs_.begin(), sorted_pairs_.end(),
                     [&](ClassPair lhs, ClassPair rhs) {
                         return gen_errors_[pair_index(lhs, n_classes_)] <
                                gen_errors_[pair_index(rhs, n_classes_)];
                     });
    if (n_classes_ >= 2) {
        std::vector<int> nodes(n_classes_);
        for (int c = 0; c < n_classes_; ++c) nodes[c] = c;
        MatchingProblem problem = MatchingProblem::complete(
            nodes, [&](int a, int b) { return gen_error(ClassPair(a, b)); });
        if (n_classes_ % 2 != 0) problem = pad_odd(problem);
        top_matching_ = min_weight_perfect_matching(problem);
    }
}

bool TrainedEnsemble::all_converged() const {
    return std::all_of(pairs.begin(), pairs.end(),
                       [](const TrainedPair& p) { return p.model.converged; });
}

PairwiseEnsemble TrainedEnsemble::view() const {
    std::vector<double> errors(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) errors[i] = pairs[i].gen_error.value;
    const TrainedEnsemble* self = this;
    const int n = n_classes;
    return PairwiseEnsemble(
        n_classes,
        [self, n](ClassPair p, std::span<const double> x) {
            return decide(self->pairs[pair_index(p, n)].model, x);
        },
        std::move(errors));
}

namespace {

TrainedPair train_one(const Dataset& data, const EnsembleTrainOptions& opts, ClassPair p) {
    TrainedPair out;
    out.pair = p;
    TwoClassView view = pair_subset(data, p.a, p.b);

    TrainConfig cfg = opts.train;
    cfg.seed = derive_seed(opts.seed, {0x7a11, static_cast<std::uint64_t>(p.a),
                                       static_cast<std::uint64_t>(p.b)});
    std::uint64_t cv_seed = derive_seed(opts.seed, {0xcfcf, static_cast<std::uint64_t>(p.a),
                                                    static_cast<std::uint64_t>(p.b)});
    out.gen_error = cv_generalization_error(view, opts.kernel, cfg, opts.inner_k, cv_seed);
    out.model = train(view, opts.kernel, cfg);
    return out;
}

}  // namespace

TrainedEnsemble train_pairwise_serial(const Dataset& data, const EnsembleTrainOptions& opts) {
    TrainedEnsemble out;
    out.n_classes = data.n_classes;
    out.class_names = data.class_names;
    for (ClassPair p : all_pairs(data.n_classes)) {
        out.pairs.push_back(train_one(data, opts, p));
    }
    return out;
}

TrainedEnsemble train_pairwise(const Dataset& data, const EnsembleTrainOptions& opts, int jobs) {
    TrainedEnsemble out;
    out.n_classes = data.n_classes;
    out.class_names = data.class_names;
    const std::vector<ClassPair> pairs = all_pairs(data.n_classes);
    out.pairs.resize(pairs.size());
    parallel_for(static_cast<long>(pairs.size()), jobs,
                 [&](long i) { out.pairs[i] = train_one(data, opts, pairs[i]); });
    return out;
}

DecisionTable decision_table(const PairwiseEnsemble& e, std::span<const double> x) {
    DecisionTable table(pair_count(e.n_classes()));
    for (ClassPair p : all_pairs(e.n_classes())) {
        table[pair_index(p, e.n_classes())] = e.decide_winner(p, x);
    }
    return table;
}

std::vector<DecisionTable> decision_tables_serial(const PairwiseEnsemble& e, const Dataset& data,
                                                  std::span<const int> rows) {
    std::vector<DecisionTable> tables(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        tables[i] = decision_table(e, data.row(rows[i]));
    }
    return tables;
}

std::vector<DecisionTable> decision_tables(const PairwiseEnsemble& e, const Dataset& data,
                                           std::span<const int> rows, int jobs) {
    std::vector<DecisionTable> tables(rows.size());
    parallel_for(static_cast<long>(rows.size()), jobs,
                 [&](long i) { tables[i] = decision_table(e, data.row(rows[i])); });
    return tables;
}

PairwiseEnsemble table_ensemble(int n_classes, DecisionTable table,
                                std::vector<double> gen_errors) {
    auto shared = std::make_shared<DecisionTable>(std::move(table));
    const int n = n_classes;
    return PairwiseEnsemble(
        n_classes,
        [shared, n](ClassPair p, std::span<const double>) {
            return (*shared)[pair_index(p, n)] == p.a ? 1.0 : -1.0;
        },
        std::move(gen_errors));
}

}  // namespace ovo
