// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Expected runtime is dominated by the Glass protocol run.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ovo/cli.hpp"
#include "ovo/evaluation.hpp"
#include "ovo/matching.hpp"
#include "testutil.hpp"

using namespace ovo;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void criterion(int id, const std::string& name, bool pass, const std::string& detail = "") {
    std::printf("[%s] criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

const std::vector<double> kNoX{};

// --------------------------------------------------------------------------
// 1. Structural evaluation counts over random outcome oracles.
// --------------------------------------------------------------------------
void criterion_1() {
    auto start = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    for (int n = 2; n <= 12 && ok; ++n) {
        for (std::uint64_t trial = 0; trial < 500 && ok; ++trial) {
            auto e = ovotest::random_oracle(n, trial * 7919 + n);
            PredictParams params;
            params.seed = trial;
            const int linear = n - 1;
            const int quad = pair_count(n);
            if (predict(e, kNoX, CombinerKind::Ddag, params).evaluations != linear ||
                predict(e, kNoX, CombinerKind::Adag, params).evaluations != linear ||
                predict(e, kNoX, CombinerKind::Se, params).evaluations != linear ||
                predict(e, kNoX, CombinerKind::Radag, params).evaluations != linear) {
                ok = false;
                detail = "a linear-group method broke n-1 at n=" + std::to_string(n);
            }
            if (predict(e, kNoX, CombinerKind::MaxWins, params).evaluations != quad ||
                predict(e, kNoX, CombinerKind::Vcf, params).evaluations != quad) {
                ok = false;
                detail = "a voting method broke n(n-1)/2 at n=" + std::to_string(n);
            }
            int wev = predict(e, kNoX, CombinerKind::We, params).evaluations;
            if (wev < linear || wev > quad) {
                ok = false;
                detail = "we out of range at n=" + std::to_string(n);
            }
        }
    }
    double secs = elapsed_s(start);
    if (secs >= 10.0) {
        ok = false;
        detail = "exceeded 10s budget";
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "11 sizes x 500 oracles x 7 methods in %.1fs", secs);
    criterion(1, "structural evaluation counts", ok, detail.empty() ? buf : detail);
}

// --------------------------------------------------------------------------
// 2. Matching optimality vs the exhaustive oracle; 26-node speed.
// --------------------------------------------------------------------------
MatchingProblem random_problem(int n, std::uint64_t seed) {
    Rng rng(seed);
    MatchingProblem p;
    for (int i = 0; i < n; ++i) p.nodes.push_back(i);
    p.weights = Matrix(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double v = rng.unit();
            p.weights.at(i, j) = v;
            p.weights.at(j, i) = v;
        }
    }
    return p;
}

void criterion_2() {
    bool ok = true;
    std::string detail;
    for (int n : {4, 6, 8, 10, 12}) {
        for (std::uint64_t trial = 0; trial < 1000 && ok; ++trial) {
            auto p = random_problem(n, trial * 31337 + n);
            auto solver = min_weight_perfect_matching(p);
            auto oracle = brute_force_matching(p);
            if (std::abs(solver.total_weight - oracle.total_weight) > 1e-9) {
                ok = false;
                detail = "total weight mismatch at n=" + std::to_string(n) + " trial " +
                         std::to_string(trial);
            } else if (solver.pairs != oracle.pairs) {
                ok = false;
                detail = "pair set mismatch at n=" + std::to_string(n) + " trial " +
                         std::to_string(trial);
            }
        }
        if (!ok) break;
    }
    auto start = std::chrono::steady_clock::now();
    auto big = min_weight_perfect_matching(random_problem(26, 99));
    double secs = elapsed_s(start);
    if (big.pairs.size() != 13) {
        ok = false;
        detail = "26-node matching is not perfect";
    }
    if (secs >= 1.0) {
        ok = false;
        detail = "26-node solve took " + std::to_string(secs) + "s";
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "5000 instances vs oracle; n=26 in %.3fs", secs);
    criterion(2, "matching optimality and tie rule", ok, detail.empty() ? buf : detail);
}

// --------------------------------------------------------------------------
// 3. BCRT theorems, exhaustive for n <= 5.
// --------------------------------------------------------------------------
void criterion_3() {
    bool all_correct_ok = true;
    bool witness_ok = true;
    bool dag_iff_ok = true;
    std::string detail;

    for (int n = 2; n <= 5; ++n) {
        const int P = pair_count(n);
        // (a) all BCRTs correct => Max Wins returns the target, every table
        for (int t = 0; t < n && all_correct_ok; ++t) {
            std::vector<int> free_idx;
            for (ClassPair p : all_pairs(n)) {
                if (p.a != t && p.b != t) free_idx.push_back(pair_index(p, n));
            }
            const int F = static_cast<int>(free_idx.size());
            for (long mask = 0; mask < (1L << F); ++mask) {
                DecisionTable table(P);
                for (ClassPair p : all_pairs(n)) {
                    int idx = pair_index(p, n);
                    table[idx] = (p.a == t || p.b == t) ? t : p.a;
                }
                for (int b = 0; b < F; ++b) {
                    if (mask >> b & 1) {
                        ClassPair p = all_pairs(n)[free_idx[b]];
                        table[free_idx[b]] = p.b;
                    }
                }
                auto e = table_ensemble(n, table, ovotest::random_gen_errors(n, mask + n));
                if (max_wins(e, kNoX, mask).predicted != t) {
                    all_correct_ok = false;
                    detail = "max wins missed an all-correct BCRT table at n=" + std::to_string(n);
                    break;
                }
            }
        }

        // (b) a single flipped BCRT can cost Max Wins the target (n >= 3)
        if (n >= 3) {
            bool found = false;
            const int t = 0;
            for (long mask = 0; mask < (1L << P) && !found; ++mask) {
                DecisionTable table(P);
                int wrong_bcrts = 0;
                for (ClassPair p : all_pairs(n)) {
                    int idx = pair_index(p, n);
                    table[idx] = (mask >> idx & 1) ? p.a : p.b;
                    if ((p.a == t || p.b == t) && table[idx] != t) ++wrong_bcrts;
                }
                if (wrong_bcrts != 1) continue;
                auto e = table_ensemble(n, table, ovotest::random_gen_errors(n, mask));
                const auto votes = *max_wins(e, kNoX, 0).votes;
                const int top = *std::max_element(votes.begin(), votes.end());
                const bool strict_winner =
                    votes[t] == top && std::count(votes.begin(), votes.end(), top) == 1;
                if (!strict_winner) found = true;  // tie or loss witness
            }
            if (!found) {
                witness_ok = false;
                detail = "no single-flip witness at n=" + std::to_string(n);
            }
        }

        // (c) DAG methods: predicted == target iff no applied classifier
        // touching the target picked the rival
        for (long mask = 0; mask < (1L << P) && dag_iff_ok; ++mask) {
            DecisionTable table(P);
            for (ClassPair p : all_pairs(n)) {
                int idx = pair_index(p, n);
                table[idx] = (mask >> idx & 1) ? p.a : p.b;
            }
            for (std::uint64_t variant = 0; variant < 3 && dag_iff_ok; ++variant) {
                auto e = table_ensemble(n, table,
                                        ovotest::random_gen_errors(n, mask * 3 + variant));
                for (int t = 0; t < n && dag_iff_ok; ++t) {
                    for (CombinerKind method :
                         {CombinerKind::Ddag, CombinerKind::Adag, CombinerKind::Radag,
                          CombinerKind::Se, CombinerKind::We}) {
                        PredictParams params;
                        params.seed = mask * 31 + variant;
                        Verdict v = predict(e, kNoX, method, params);
                        bool undefeated = true;
                        for (const auto& [p, w] : v.trace) {
                            if ((p.a == t || p.b == t) && w != t) undefeated = false;
                        }
                        if ((v.predicted == t) != undefeated) {
                            dag_iff_ok = false;
                            detail = std::string("iff violated for ") + combiner_name(method) +
                                     " at n=" + std::to_string(n);
                            break;
                        }
                    }
                }
            }
        }
    }
    criterion(3, "BCRT theorems (exhaustive n<=5)",
              all_correct_ok && witness_ok && dag_iff_ok, detail);
}

// --------------------------------------------------------------------------
// 4. dp arithmetic.
// --------------------------------------------------------------------------
void criterion_4() {
    const double dp = vote_deficit_percent(24, 23);
    char shown[16];
    std::snprintf(shown, sizeof(shown), "%.2f", dp);
    bool ok = std::abs(dp - 4.1667) < 1e-3 && std::string(shown) == "4.17";
    criterion(4, "dp arithmetic (s_top=24, s=23)", ok, std::string("dp=") + shown);
}

// --------------------------------------------------------------------------
// 5. VCF degenerate equivalence with Max Wins at threshold zero.
// --------------------------------------------------------------------------
void criterion_5() {
    long checked = 0;
    bool ok = true;
    std::uint64_t seed = 0;
    while (checked < 10000 && ok) {
        const int n = 3 + static_cast<int>(seed % 8);
        auto e = ovotest::random_oracle(n, seed * 131 + 7);
        Verdict mw = max_wins(e, kNoX, seed);
        const auto& votes = *mw.votes;
        const int top = *std::max_element(votes.begin(), votes.end());
        if (std::count(votes.begin(), votes.end(), top) == 1) {
            ++checked;
            if (vcf(e, kNoX, 0.0, seed).predicted != mw.predicted) ok = false;
        }
        ++seed;
    }
    criterion(5, "vcf(threshold=0) equals max wins on unique argmax", ok,
              std::to_string(checked) + " oracles checked");
}

// --------------------------------------------------------------------------
// 6. Estimator quality ordering on the fixed synthetic benchmark.
// --------------------------------------------------------------------------
void criterion_6() {
    const int problems = 24;
    std::vector<double> cv, sv, margin_est, risk;
    std::vector<BinaryModel> models;
    std::vector<Dataset> keep_alive;
    keep_alive.reserve(problems);

    Rng meta(4242);  // pinned benchmark seed
    for (int q = 0; q < problems; ++q) {
        const double sep = 0.4 + 3.2 * meta.unit();
        const double flip = 0.10 + 0.15 * meta.unit();  // label noise >= 0.1
        const int per_class = 25 + static_cast<int>(meta.below(55));
        Dataset train_ds = ovotest::make_blobs({{0.0, 0.0}, {sep, sep}}, per_class, 1.0, 1000 + q);
        Dataset test_ds = ovotest::make_blobs({{0.0, 0.0}, {sep, sep}}, 220, 1.0, 5000 + q);
        for (Dataset* ds : {&train_ds, &test_ds}) {
            Rng noise(77 + q);
            for (auto& label : ds->labels) {
                if (noise.unit() < flip) label = 1 - label;
            }
        }
        keep_alive.push_back(std::move(train_ds));
        const Dataset& tr = keep_alive.back();
        TwoClassView v = pair_subset(tr, 0, 1);
        KernelSpec kernel = KernelSpec::rbf(0.5);
        BinaryModel m = train(v, kernel, {});
        cv.push_back(cv_generalization_error(v, kernel, {}, 5, 300 + q).value);
        sv.push_back(sv_bound(m).value);
        long wrong = 0;
        for (std::size_t i = 0; i < test_ds.size(); ++i) {
            if (winner(m, test_ds.row(i)) != test_ds.labels[i]) ++wrong;
        }
        risk.push_back(static_cast<double>(wrong) / test_ds.size());
        models.push_back(std::move(m));
    }
    for (const auto& e : margin_bound(models)) margin_est.push_back(e.value);

    const double r_cv = pearson_r(cv, risk);
    const double r_sv = pearson_r(sv, risk);
    const double r_margin = pearson_r(margin_est, risk);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "r_cv=%.3f r_sv=%.3f r_margin=%.3f", r_cv, r_sv, r_margin);
    criterion(6, "estimator ordering: cv beats sv and margin bounds",
              r_cv > r_sv && r_cv > r_margin, buf);
}

// --------------------------------------------------------------------------
// 7. Glass protocol sanity: soft accuracy envelope, single-threaded budget.
// --------------------------------------------------------------------------
void criterion_7() {
    auto start = std::chrono::steady_clock::now();
    const std::string path = std::string(OVO_DATA_DIR) + "/glass.csv";
    if (!fs::exists(path)) {
        criterion(7, "glass protocol accuracy envelope", false, "missing " + path);
        return;
    }
    Dataset glass = load_csv(path, -1);
    if (glass.size() != 214 || glass.dim() != 9 || glass.n_classes != 6) {
        criterion(7, "glass protocol accuracy envelope", false, "unexpected dataset shape");
        return;
    }
    ExperimentSpec spec;
    for (int d : {2, 3, 4, 5}) spec.kernels.push_back(KernelSpec::polynomial(d));
    spec.methods = {CombinerKind::MaxWins, CombinerKind::Ddag,  CombinerKind::Adag,
                    CombinerKind::Radag,   CombinerKind::Se,    CombinerKind::We,
                    CombinerKind::Vcf};
    spec.outer_k = 5;
    spec.seed = 42;
    ExperimentResult result = run_experiment(glass, spec, /*jobs=*/1);
    const double secs = elapsed_s(start);

    bool ok = true;
    std::string detail;
    std::string summary;
    for (CombinerKind m : spec.methods) {
        double acc = result.grid_mean_accuracy(m);
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%s=%.3f ", combiner_name(m), acc);
        summary += buf;
        if (acc < 0.55 || acc > 0.72) {
            ok = false;
            detail += std::string(combiner_name(m)) + " outside [0.55,0.72]; ";
        }
    }
    const double we_mean = result.grid_mean_accuracy(CombinerKind::We);
    const double ddag_mean = result.grid_mean_accuracy(CombinerKind::Ddag);
    if (we_mean < ddag_mean - 0.02) {
        ok = false;
        detail += "we fell more than 0.02 below ddag; ";
    }
    if (secs >= 300.0) {
        ok = false;
        detail += "exceeded 5 minute budget; ";
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "(%.0fs single-threaded)", secs);
    criterion(7, "glass protocol accuracy envelope", ok,
              detail.empty() ? summary + buf : detail + summary);
}

// --------------------------------------------------------------------------
// 8. t-test oracle and antisymmetry.
// --------------------------------------------------------------------------
void criterion_8() {
    std::vector<double> a{0.52, 0.49, 0.53, 0.50, 0.51};
    std::vector<double> b{0.50, 0.50, 0.50, 0.50, 0.50};
    TTestReport r = paired_t_test(a, b);
    bool ok = std::abs(r.t - 1.414) < 1e-3 && !r.sig90;

    Rng rng(17);
    for (int trial = 0; trial < 1000 && ok; ++trial) {
        const int k = 2 + static_cast<int>(rng.below(9));
        std::vector<double> x(k), y(k);
        for (int i = 0; i < k; ++i) {
            x[i] = rng.unit();
            y[i] = rng.unit();
        }
        TTestReport xy = paired_t_test(x, y);
        TTestReport yx = paired_t_test(y, x);
        if (std::abs(xy.t + yx.t) > 1e-9 * std::max(1.0, std::abs(xy.t))) ok = false;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "t=%.4f, no 90%% flag; 1000 antisymmetry checks", r.t);
    criterion(8, "paired t-test oracle", ok, buf);
}

// --------------------------------------------------------------------------
// 9. Zero-error end-to-end on separable blobs with both kernels.
// --------------------------------------------------------------------------
void criterion_9() {
    Dataset blobs = ovotest::separable_blobs3(50, 2024);  // 150 points
    ExperimentSpec spec;
    spec.kernels = {KernelSpec::polynomial(2), KernelSpec::rbf(1.0)};
    spec.methods = {CombinerKind::MaxWins, CombinerKind::Ddag,  CombinerKind::Adag,
                    CombinerKind::Radag,   CombinerKind::Se,    CombinerKind::We,
                    CombinerKind::Vcf};
    spec.outer_k = 5;
    spec.seed = 7;
    ExperimentResult result = run_experiment(blobs, spec, 1);
    bool ok = true;
    std::string detail;
    for (const auto& cell : result.cells) {
        for (const auto& [method, mr] : cell.methods) {
            for (double acc : mr.fold_accuracy) {
                if (acc != 1.0) {
                    ok = false;
                    detail = std::string(combiner_name(method)) + " below 1.0";
                }
            }
        }
    }
    criterion(9, "zero-error end-to-end on separable blobs", ok, detail);
}

// --------------------------------------------------------------------------
// 10. Determinism of cmd_evaluate outputs.
// --------------------------------------------------------------------------
std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_10() {
    auto root = fs::temp_directory_path() / "ovo_acceptance_c10";
    fs::remove_all(root);
    fs::create_directories(root);
    Dataset blobs = ovotest::separable_blobs3(15, 99);
    // a touch of overlap so accuracies are not trivially all-1.0
    Dataset noisy = ovotest::make_blobs({{0, 0}, {2.2, 0.4}, {0.4, 2.2}}, 15, 1.0, 31);
    const std::string csv = (root / "data.csv").string();
    save_csv(noisy, csv);

    json config{{"dataset", csv},
                {"kernels", json::array({json{{"kind", "polynomial"}, {"degree", 3}},
                                         json{{"kind", "rbf"}, {"gamma", 0.5}}})},
                {"k", 5},
                {"seed", 1234},
                {"output_dir", (root / "out").string()}};
    const std::string cfg_path = (root / "config.json").string();
    {
        std::ofstream out(cfg_path);
        out << config.dump(2);
    }

    bool ok = run_cli({"evaluate", "-c", cfg_path}) == 0;
    std::string acc1 = read_file(root / "out" / "accuracy.csv");
    std::string counts1 = read_file(root / "out" / "counts.csv");
    ok = ok && run_cli({"evaluate", "-c", cfg_path}) == 0;
    std::string acc2 = read_file(root / "out" / "accuracy.csv");
    std::string counts2 = read_file(root / "out" / "counts.csv");
    ok = ok && !acc1.empty() && acc1 == acc2 && counts1 == counts2;
    criterion(10, "byte-identical reports across reruns", ok);
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures;
}
