#include "ovo/generalization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ovo {

GenErrorEstimate cv_generalization_error(const TwoClassView& view, const KernelSpec& kernel,
                                         const TrainConfig& cfg,
                                         std::span<const int> fold_assignment) {
    GenErrorEstimate est;
    est.kind = EstimatorKind::Cv;
    est.pair = ClassPair(view.pos_class, view.neg_class);
    if (fold_assignment.size() != view.size()) {
        throw DataError("cv_generalization_error: assignment length mismatch");
    }
    const int k_eff = *std::max_element(fold_assignment.begin(), fold_assignment.end()) + 1;

    long misclassified = 0;
    for (int f = 0; f < k_eff; ++f) {
        std::vector<int> train_pos, val_pos;
        for (std::size_t i = 0; i < view.size(); ++i) {
            (fold_assignment[i] == f ? val_pos : train_pos).push_back(static_cast<int>(i));
        }
        TwoClassView train_view = view.subset(train_pos);
        TrainConfig fold_cfg = cfg;
        fold_cfg.seed = derive_seed(cfg.seed, {0xcfULL, static_cast<std::uint64_t>(f)});
        BinaryModel model = train(train_view, kernel, fold_cfg);
        for (int i : val_pos) {
            int want = view.label(i) > 0 ? view.pos_class : view.neg_class;
            if (winner(model, view.x(i)) != want) ++misclassified;
        }
    }
    est.value = static_cast<double>(misclassified) / static_cast<double>(view.size());
    est.folds_used = k_eff;
    return est;
}

GenErrorEstimate cv_generalization_error(const TwoClassView& view, const KernelSpec& kernel,
                                         const TrainConfig& cfg, int k, std::uint64_t seed) {
    std::size_t n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < view.size(); ++i) (view.label(i) > 0 ? n_pos : n_neg)++;
    const std::size_t smaller = std::min(n_pos, n_neg);
    if (smaller < 2) {
        GenErrorEstimate est;
        est.kind = EstimatorKind::Cv;
        est.pair = ClassPair(view.pos_class, view.neg_class);
        est.value = 0.5;
        est.uninformative = true;
        return est;
    }
    const int k_eff = std::min<int>(k, static_cast<int>(smaller));

    // 0/1 labels for the stratifier.
    std::vector<int> bin_labels(view.size());
    for (std::size_t i = 0; i < view.size(); ++i) bin_labels[i] = view.label(i) > 0 ? 0 : 1;
    std::vector<int> fold = stratified_assignment(bin_labels, 2, k_eff, seed);
    TrainConfig seeded_cfg = cfg;
    seeded_cfg.seed = seed;
    return cv_generalization_error(view, kernel, seeded_cfg, fold);
}

GenErrorEstimate sv_bound(const BinaryModel& model) {
    GenErrorEstimate est;
    est.kind = EstimatorKind::SvBound;
    est.pair = ClassPair(model.classes.first, model.classes.second);
    est.value = model.train_count > 0
                    ? static_cast<double>(model.sv_count) / static_cast<double>(model.train_count)
                    : 0.0;
    return est;
}

std::vector<GenErrorEstimate> margin_bound(std::span<const BinaryModel> models) {
    if (models.size() < 2) throw DataError("margin_bound: need at least 2 models");
    std::vector<double> inv(models.size());
    for (std::size_t i = 0; i < models.size(); ++i) {
        double d = models[i].margin;
        if (!(d > 0.0)) throw DataError("margin_bound: non-positive margin");
        inv[i] = std::isinf(d) ? 0.0 : 1.0 / d;
    }
    const auto [lo_it, hi_it] = std::minmax_element(inv.begin(), inv.end());
    const double lo = *lo_it, hi = *hi_it;
    std::vector<GenErrorEstimate> out(models.size());
    for (std::size_t i = 0; i < models.size(); ++i) {
        out[i].kind = EstimatorKind::MarginBound;
        out[i].pair = ClassPair(models[i].classes.first, models[i].classes.second);
        out[i].value = hi > lo ? (inv[i] - lo) / (hi - lo) : 0.0;
    }
    return out;
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("pearson_r: length mismatch");
    const std::size_t n = x.size();
    if (n < 3) throw DataError("pearson_r: need at least 3 points");
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw DataError("pearson_r: zero variance");
    return sxy / std::sqrt(sxx * syy);
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman_rho(std::span<const double> x, std::span<const double> y) {
    auto rx = average_ranks(x);
    auto ry = average_ranks(y);
    return pearson_r(rx, ry);
}

}  // namespace ovo
