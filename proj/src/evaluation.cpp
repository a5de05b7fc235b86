#include "ovo/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ovo/parallel.hpp"

namespace ovo {

namespace {

// Lightweight playback of the order-sensitive methods against a decision
// table; equivalent to the combiner ops but without Verdict bookkeeping.
int table_winner(const DecisionTable& t, int n, int a, int b) {
    return t[pair_index(ClassPair(a, b), n)];
}

int ddag_play(const DecisionTable& t, int n, std::span<const int> order) {
    int lo = 0, hi = static_cast<int>(order.size()) - 1;
    while (lo < hi) {
        const int w = table_winner(t, n, order[lo], order[hi]);
        if (w == order[lo]) {
            --hi;
        } else {
            ++lo;
        }
    }
    return order[lo];
}

int adag_play(const DecisionTable& t, int n, std::span<const int> order) {
    std::vector<int> cur(order.begin(), order.end());
    std::vector<int> next;
    while (cur.size() > 1) {
        next.clear();
        std::size_t i = 0;
        for (; i + 1 < cur.size(); i += 2) {
            next.push_back(table_winner(t, n, cur[i], cur[i + 1]));
        }
        if (i < cur.size()) next.push_back(cur[i]);
        cur = next;
    }
    return cur.front();
}

// Canonical ADAG sequences: within-pair ascending, pairs ascending by first
// member, optional bye appended last. Their count is
// n! / (2^floor(n/2) * floor(n/2)!).
void enumerate_pairings(std::vector<int>& remaining, std::vector<int>& seq,
                        const std::function<void(std::span<const int>)>& emit) {
    if (remaining.empty()) {
        emit(seq);
        return;
    }
    if (remaining.size() == 1) {
        seq.push_back(remaining.front());
        emit(seq);
        seq.pop_back();
        return;
    }
    const int u = remaining.front();
    for (std::size_t vi = 1; vi < remaining.size(); ++vi) {
        const int v = remaining[vi];
        std::vector<int> reduced;
        reduced.reserve(remaining.size() - 2);
        for (int r : remaining) {
            if (r != u && r != v) reduced.push_back(r);
        }
        seq.push_back(u);
        seq.push_back(v);
        enumerate_pairings(reduced, seq, emit);
        seq.pop_back();
        seq.pop_back();
    }
}

std::vector<std::vector<int>> adag_canonical_orders(int n, bool with_byes) {
    std::vector<std::vector<int>> orders;
    auto emit = [&](std::span<const int> seq) {
        orders.emplace_back(seq.begin(), seq.end());
    };
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    std::vector<int> seq;
    if (n % 2 == 0 || !with_byes) {
        enumerate_pairings(all, seq, emit);
    } else {
        // Odd: any class may take the bye; it goes last in the sequence.
        for (int bye = 0; bye < n; ++bye) {
            std::vector<int> rest;
            for (int c : all) {
                if (c != bye) rest.push_back(c);
            }
            enumerate_pairings(rest, seq, [&](std::span<const int> s) {
                std::vector<int> full(s.begin(), s.end());
                full.push_back(bye);
                orders.push_back(std::move(full));
            });
        }
    }
    return orders;
}

// A DDAG order and its reversal apply identical classifiers (the ends are
// tested symmetrically), so only the representative with front < back is
// enumerated: n!/2 distinct elimination orders, exactly 1 for n = 2.
std::vector<std::vector<int>> ddag_all_orders(int n) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::vector<int>> orders;
    do {
        if (order.front() < order.back()) orders.push_back(order);
    } while (std::next_permutation(order.begin(), order.end()));
    return orders;
}

double order_average_impl(int n_classes, std::span<const DecisionTable> tables,
                          std::span<const int> labels, CombinerKind method, long sample,
                          std::uint64_t seed, int jobs) {
    if (method != CombinerKind::Ddag && method != CombinerKind::Adag) {
        throw ConfigError("order_average: method is not order-sensitive");
    }
    if (tables.empty()) return 0.0;
    const bool is_ddag = method == CombinerKind::Ddag;

    auto play = [&](const DecisionTable& t, std::span<const int> order) {
        return is_ddag ? ddag_play(t, n_classes, order) : adag_play(t, n_classes, order);
    };

    long n_orders;
    std::vector<std::vector<int>> orders;
    const bool exhaustive = n_classes <= 8;
    if (exhaustive) {
        orders = is_ddag ? ddag_all_orders(n_classes) : adag_canonical_orders(n_classes, true);
        n_orders = static_cast<long>(orders.size());
    } else {
        n_orders = sample;
    }

    std::vector<long> correct(n_orders, 0);
    parallel_for(n_orders, jobs, [&](long oi) {
        std::vector<int> sampled;
        std::span<const int> order;
        if (exhaustive) {
            order = orders[oi];
        } else {
            sampled.resize(n_classes);
            std::iota(sampled.begin(), sampled.end(), 0);
            Rng rng(derive_seed(seed, {0x08de8ULL, static_cast<std::uint64_t>(oi)}));
            rng.shuffle(sampled);
            order = sampled;
        }
        long c = 0;
        for (std::size_t i = 0; i < tables.size(); ++i) {
            if (play(tables[i], order) == labels[i]) ++c;
        }
        correct[oi] = c;
    });
    long total = std::accumulate(correct.begin(), correct.end(), 0L);
    return static_cast<double>(total) /
           (static_cast<double>(n_orders) * static_cast<double>(tables.size()));
}

}  // namespace

long exhaustive_order_count(int n_classes, CombinerKind method) {
    if (method == CombinerKind::Ddag) {
        long f = 1;
        for (int i = 2; i <= n_classes; ++i) f *= i;
        return n_classes >= 2 ? f / 2 : f;
    }
    return static_cast<long>(adag_canonical_orders(n_classes, true).size());
}

double order_average(int n_classes, std::span<const DecisionTable> tables,
                     std::span<const int> labels, CombinerKind method, long sample,
                     std::uint64_t seed, int jobs) {
    return order_average_impl(n_classes, tables, labels, method, sample, seed, jobs);
}

double order_average_serial(int n_classes, std::span<const DecisionTable> tables,
                            std::span<const int> labels, CombinerKind method, long sample,
                            std::uint64_t seed) {
    return order_average_impl(n_classes, tables, labels, method, sample, seed, 1);
}

double order_average(const PairwiseEnsemble& e, const Dataset& data, std::span<const int> rows,
                     CombinerKind method, long sample, std::uint64_t seed, int jobs) {
    std::vector<DecisionTable> tables = decision_tables(e, data, rows, jobs);
    std::vector<int> labels;
    labels.reserve(rows.size());
    for (int r : rows) labels.push_back(data.labels[r]);
    return order_average_impl(e.n_classes(), tables, labels, method, sample, seed, jobs);
}

// ---------------------------------------------------------------------------
// Paired t-test
// ---------------------------------------------------------------------------

namespace {

// One-tailed critical values, df 1..30, then the normal approximation.
constexpr double kCrit90[30] = {3.078, 1.886, 1.638, 1.533, 1.476, 1.440, 1.415, 1.397,
                                1.383, 1.372, 1.363, 1.356, 1.350, 1.345, 1.341, 1.337,
                                1.333, 1.330, 1.328, 1.325, 1.323, 1.321, 1.319, 1.318,
                                1.316, 1.315, 1.314, 1.313, 1.311, 1.310};
constexpr double kCrit95[30] = {6.314, 2.920, 2.353, 2.132, 2.015, 1.943, 1.895, 1.860,
                                1.833, 1.812, 1.796, 1.782, 1.771, 1.761, 1.753, 1.746,
                                1.740, 1.734, 1.729, 1.725, 1.721, 1.717, 1.714, 1.711,
                                1.708, 1.706, 1.703, 1.701, 1.699, 1.697};
constexpr double kCrit99[30] = {31.821, 6.965, 4.541, 3.747, 3.365, 3.143, 2.998, 2.896,
                                2.821,  2.764, 2.718, 2.681, 2.650, 2.624, 2.602, 2.583,
                                2.567,  2.552, 2.539, 2.528, 2.518, 2.508, 2.500, 2.492,
                                2.485,  2.479, 2.473, 2.467, 2.462, 2.457};

}  // namespace

double t_critical(int df, int level) {
    if (df < 1) throw ConfigError("t_critical: df must be positive");
    const double* table = level == 90 ? kCrit90 : level == 95 ? kCrit95 : kCrit99;
    if (level != 90 && level != 95 && level != 99) {
        throw ConfigError("t_critical: level must be 90, 95 or 99");
    }
    if (df <= 30) return table[df - 1];
    switch (level) {
        case 90: return 1.2816;
        case 95: return 1.6449;
        default: return 2.3263;
    }
}

TTestReport paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ConfigError("paired_t_test: length mismatch");
    const int k = static_cast<int>(a.size());
    if (k < 2) throw ConfigError("paired_t_test: need at least 2 paired samples");

    double mean = 0.0;
    for (int i = 0; i < k; ++i) mean += a[i] - b[i];
    mean /= k;
    double var = 0.0;
    for (int i = 0; i < k; ++i) {
        const double d = a[i] - b[i] - mean;
        var += d * d;
    }
    var /= (k - 1);

    TTestReport report;
    if (var == 0.0) {
        if (mean == 0.0) {
            report.t = 0.0;
        } else {
            report.t = mean > 0 ? std::numeric_limits<double>::infinity()
                                : -std::numeric_limits<double>::infinity();
            report.sig90 = report.sig95 = report.sig99 = true;
        }
        return report;
    }
    report.t = mean / (std::sqrt(var) / std::sqrt(static_cast<double>(k)));
    const int df = k - 1;
    const double abs_t = std::abs(report.t);
    report.sig90 = abs_t > t_critical(df, 90);
    report.sig95 = abs_t > t_critical(df, 95);
    report.sig99 = abs_t > t_critical(df, 99);
    return report;
}

// ---------------------------------------------------------------------------
// Risk analysis and count report
// ---------------------------------------------------------------------------

RiskHistogram risk_analysis(std::span<const Verdict> verdicts, std::span<const int> labels) {
    if (verdicts.size() != labels.size()) {
        throw ConfigError("risk_analysis: verdicts and labels differ in length");
    }
    RiskHistogram hist;
    hist.total_examples = static_cast<long>(verdicts.size());
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        if (!verdicts[i].votes) throw ConfigError("risk_analysis: verdict carries no votes");
        const std::vector<int>& votes = *verdicts[i].votes;
        const int t = labels[i];
        const int s_t = votes[t];
        const int s_top = *std::max_element(votes.begin(), votes.end());
        int above = 0, tied = 0;
        for (int c = 0; c < static_cast<int>(votes.size()); ++c) {
            if (c == t) continue;
            if (votes[c] > s_t) ++above;
            if (votes[c] == s_t) ++tied;
        }
        const bool strict_unique_max = (above == 0 && tied == 0);
        if (strict_unique_max) continue;  // not at risk

        const int rank = 1 + above;  // competition ranking
        const double dp = vote_deficit_percent(s_top, s_t);
        const int row = std::min(rank, RiskHistogram::kRankRows) - 1;
        const int bucket = std::min(static_cast<int>(std::floor(dp)), RiskHistogram::kDpBuckets - 1);
        ++hist.cells[row][bucket];
        ++hist.high_risk_examples;
    }
    return hist;
}

std::vector<CountRow> count_report(int n_classes,
                                   const std::map<CombinerKind, MethodResult>& methods) {
    const double linear = n_classes - 1;
    const double quadratic = static_cast<double>(pair_count(n_classes));
    std::vector<CountRow> rows;
    for (const auto& [method, result] : methods) {
        CountRow row;
        row.method = method;
        row.mean_evaluations = result.mean_evaluations;
        switch (method) {
            case CombinerKind::Ddag:
            case CombinerKind::Adag:
            case CombinerKind::Se:
            case CombinerKind::Radag:
                row.group = "n-1";
                row.within_group = std::abs(result.mean_evaluations - linear) < 1e-9;
                break;
            case CombinerKind::MaxWins:
            case CombinerKind::Vcf:
                row.group = "quadratic";
                row.within_group = std::abs(result.mean_evaluations - quadratic) < 1e-9;
                break;
            case CombinerKind::We:
                row.group = "between";
                row.within_group = result.mean_evaluations >= linear - 1e-9 &&
                                   result.mean_evaluations <= quadratic + 1e-9;
                break;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Outer experiment loop
// ---------------------------------------------------------------------------

bool ExperimentResult::all_converged() const {
    return std::all_of(cells.begin(), cells.end(),
                       [](const KernelCellResult& c) { return c.all_converged; });
}

double ExperimentResult::grid_mean_accuracy(CombinerKind method) const {
    double sum = 0.0;
    int n = 0;
    for (const auto& cell : cells) {
        auto it = cell.methods.find(method);
        if (it != cell.methods.end()) {
            sum += it->second.mean_accuracy;
            ++n;
        }
    }
    return n > 0 ? sum / n : 0.0;
}

ExperimentResult run_experiment(const Dataset& data, const ExperimentSpec& spec, int jobs,
                                const ExperimentHooks* hooks) {
    if (spec.methods.empty()) throw ConfigError("run_experiment: empty method list");
    if (spec.outer_k < 2) throw ConfigError("run_experiment: outer fold count must be >= 2");

    ExperimentResult result;
    result.plan = stratified_kfold(data, spec.outer_k, derive_seed(spec.seed, {0x07e8ULL}));

    for (std::size_t ki = 0; ki < spec.kernels.size(); ++ki) {
        const KernelSpec& kernel = spec.kernels[ki];
        KernelCellResult cell;
        cell.kernel = kernel;
        for (CombinerKind m : spec.methods) {
            cell.methods[m].fold_accuracy.assign(spec.outer_k, 0.0);
        }
        std::map<CombinerKind, double> eval_sum, time_sum, time_sq_sum;
        long example_total = 0;

        for (int fold = 0; fold < spec.outer_k; ++fold) {
            std::vector<int> train_rows = result.plan.train_rows(fold);
            std::vector<int> val_rows = result.plan.fold_rows(fold);
            if (hooks && hooks->on_fold && ki == 0) {
                hooks->on_fold(fold, train_rows, val_rows);
            }
            try {
                ScalingParams scaling = fit_scaling(data, train_rows);
                Dataset scaled = apply_scaling(data, scaling);
                Dataset train_ds = sub_dataset(scaled, train_rows);

                EnsembleTrainOptions opts;
                opts.kernel = kernel;
                opts.train = spec.train;
                opts.inner_k = spec.inner_k;
                opts.seed = derive_seed(spec.seed, {0xe5ULL, ki, static_cast<std::uint64_t>(fold)});
                TrainedEnsemble ensemble = train_pairwise(train_ds, opts, jobs);
                if (!ensemble.all_converged()) cell.all_converged = false;
                PairwiseEnsemble view = ensemble.view();

                std::vector<int> val_labels;
                val_labels.reserve(val_rows.size());
                for (int r : val_rows) val_labels.push_back(scaled.labels[r]);
                example_total += static_cast<long>(val_rows.size());

                const bool needs_tables =
                    std::find(spec.methods.begin(), spec.methods.end(), CombinerKind::Ddag) !=
                        spec.methods.end() ||
                    std::find(spec.methods.begin(), spec.methods.end(), CombinerKind::Adag) !=
                        spec.methods.end();
                std::vector<DecisionTable> tables;
                if (needs_tables) tables = decision_tables(view, scaled, val_rows, jobs);

                for (CombinerKind method : spec.methods) {
                    std::vector<Verdict> verdicts(val_rows.size());
                    parallel_for(static_cast<long>(val_rows.size()), jobs, [&](long i) {
                        PredictParams params;
                        params.vcf_threshold = spec.vcf_threshold;
                        params.seed = derive_seed(
                            spec.seed, {0x9eedULL, ki, static_cast<std::uint64_t>(fold),
                                        static_cast<std::uint64_t>(val_rows[i]),
                                        static_cast<std::uint64_t>(method)});
                        verdicts[i] = predict(view, scaled.row(val_rows[i]), method, params);
                    });

                    long correct = 0;
                    for (std::size_t i = 0; i < verdicts.size(); ++i) {
                        if (verdicts[i].predicted == val_labels[i]) ++correct;
                        eval_sum[method] += verdicts[i].evaluations;
                        const double us = static_cast<double>(verdicts[i].elapsed_ns) / 1000.0;
                        time_sum[method] += us;
                        time_sq_sum[method] += us * us;
                    }

                    double acc;
                    if (method == CombinerKind::Ddag || method == CombinerKind::Adag) {
                        acc = order_average(data.n_classes, tables, val_labels, method,
                                            spec.order_sample_size,
                                            derive_seed(spec.seed, {0x08deULL, ki,
                                                                    static_cast<std::uint64_t>(fold),
                                                                    static_cast<std::uint64_t>(method)}),
                                            jobs);
                    } else {
                        acc = static_cast<double>(correct) / static_cast<double>(val_rows.size());
                    }
                    cell.methods[method].fold_accuracy[fold] = acc;

                    if (method == CombinerKind::MaxWins) {
                        for (std::size_t i = 0; i < verdicts.size(); ++i) {
                            cell.vote_verdicts.push_back(verdicts[i]);
                            cell.vote_labels.push_back(val_labels[i]);
                        }
                    }
                }

            } catch (const DataError& e) {
                throw DataError("outer fold " + std::to_string(fold) + ", kernel " +
                                std::to_string(ki) + ": " + e.what());
            }
        }

        for (CombinerKind method : spec.methods) {
            MethodResult& mr = cell.methods[method];
            mr.mean_accuracy =
                std::accumulate(mr.fold_accuracy.begin(), mr.fold_accuracy.end(), 0.0) /
                static_cast<double>(spec.outer_k);
            mr.mean_evaluations = eval_sum[method] / static_cast<double>(example_total);
            const double n = static_cast<double>(example_total);
            mr.mean_time_us = time_sum[method] / n;
            const double var = time_sq_sum[method] / n - mr.mean_time_us * mr.mean_time_us;
            mr.sd_time_us = var > 0.0 ? std::sqrt(var) : 0.0;
        }
        result.cells.push_back(std::move(cell));
    }
    return result;
}

}  // namespace ovo
