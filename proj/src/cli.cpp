#include "ovo/cli.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "CLI11.hpp"
#include "ovo/parallel.hpp"

namespace ovo {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kAllowedKeys = {
    "dataset",      "label_column",      "kernels",       "methods",
    "k",            "inner_k",           "seed",          "order_sample_size",
    "vcf_threshold", "C",                "tolerance",     "max_iter",
    "holdout_fraction", "output_dir"};

template <typename T>
T get_field(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config field '" + key + "' has the wrong type");
    }
}

std::vector<CombinerKind> all_methods() {
    return {CombinerKind::MaxWins, CombinerKind::Ddag, CombinerKind::Adag, CombinerKind::Radag,
            CombinerKind::Se,      CombinerKind::We,   CombinerKind::Vcf};
}

json canonical_json(const RunConfig& cfg) {
    json j;
    j["dataset"] = cfg.dataset;
    if (std::holds_alternative<int>(cfg.label_column)) {
        j["label_column"] = std::get<int>(cfg.label_column);
    } else {
        j["label_column"] = std::get<std::string>(cfg.label_column);
    }
    j["kernels"] = json::array();
    for (const auto& k : cfg.kernels) j["kernels"].push_back(to_json(k));
    j["methods"] = json::array();
    for (auto m : cfg.methods) j["methods"].push_back(combiner_name(m));
    j["k"] = cfg.k;
    j["inner_k"] = cfg.inner_k;
    j["seed"] = cfg.seed;
    j["order_sample_size"] = cfg.order_sample_size;
    j["vcf_threshold"] = cfg.vcf_threshold;
    j["C"] = cfg.C;
    j["tolerance"] = cfg.tolerance;
    j["max_iter"] = cfg.max_iter;
    j["holdout_fraction"] = cfg.holdout_fraction;
    j["output_dir"] = cfg.output_dir;
    return j;
}

std::string report_header(const RunConfig& cfg) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "# config_hash=%016" PRIx64 " seed=%" PRIu64 "\n", cfg.hash,
                  cfg.seed);
    return buf;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write output file: " + path.string());
    out << text;
}

std::string format_accuracy(double a) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", a);
    return buf;
}

std::string kernel_label(const KernelSpec& k) {
    char buf[48];
    if (k.kind == KernelSpec::Kind::Polynomial) {
        std::snprintf(buf, sizeof(buf), "poly_d%d", k.degree);
    } else {
        std::snprintf(buf, sizeof(buf), "rbf_g%g", k.gamma);
    }
    return buf;
}

// +/- markers: sign from t, symbol count from the confidence level.
std::string significance_marker(const TTestReport& r) {
    int level = r.sig99 ? 3 : r.sig95 ? 2 : r.sig90 ? 1 : 0;
    if (level == 0) return "";
    return std::string(level, r.t >= 0 ? '+' : '-');
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

int cmd_evaluate(const RunConfig& cfg, int jobs, bool strict) {
    Dataset data = load_csv(cfg.dataset, cfg.label_column);
    ExperimentResult result = run_experiment(data, cfg.experiment_spec(), jobs);
    fs::create_directories(cfg.output_dir);

    std::string acc_csv = report_header(cfg) + "kernel,method,fold,accuracy\n";
    std::string acc_txt = report_header(cfg);
    std::string counts_csv = report_header(cfg) + "kernel,method,mean_evaluations,group,within\n";
    std::string timing_csv = report_header(cfg) +
                             "# wall time per predict call; not reproducible across machines\n"
                             "kernel,method,mean_time_us,sd_time_us\n";
    std::string ttest_csv = report_header(cfg) + "kernel,method_a,method_b,t,sig90,sig95,sig99\n";

    for (const auto& cell : result.cells) {
        const std::string kl = kernel_label(cell.kernel);
        for (const auto& [method, mr] : cell.methods) {
            for (int f = 0; f < static_cast<int>(mr.fold_accuracy.size()); ++f) {
                acc_csv += kl + "," + combiner_name(method) + "," + std::to_string(f) + "," +
                           format_accuracy(mr.fold_accuracy[f]) + "\n";
            }
            acc_csv += kl + "," + combiner_name(method) + ",mean," +
                       format_accuracy(mr.mean_accuracy) + "\n";
        }

        // Human table: baseline = first configured method.
        const CombinerKind baseline = cfg.methods.front();
        acc_txt += "\n[" + kl + "]  (baseline: " + combiner_name(baseline) + ")\n";
        char line[160];
        std::snprintf(line, sizeof(line), "%-10s %-10s %-8s\n", "method", "accuracy", "signif");
        acc_txt += line;
        for (const auto& [method, mr] : cell.methods) {
            std::string marker;
            if (method != baseline) {
                TTestReport t = paired_t_test(mr.fold_accuracy,
                                              cell.methods.at(baseline).fold_accuracy);
                marker = significance_marker(t);
            }
            std::snprintf(line, sizeof(line), "%-10s %-10s %-8s\n", combiner_name(method),
                          format_accuracy(mr.mean_accuracy).c_str(), marker.c_str());
            acc_txt += line;
        }

        for (const CountRow& row : count_report(data.n_classes, cell.methods)) {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%s,%s,%.4f,%s,%d\n", kl.c_str(),
                          combiner_name(row.method), row.mean_evaluations, row.group.c_str(),
                          row.within_group ? 1 : 0);
            counts_csv += buf;
        }
        for (const auto& [method, mr] : cell.methods) {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%s,%s,%.3f,%.3f\n", kl.c_str(),
                          combiner_name(method), mr.mean_time_us, mr.sd_time_us);
            timing_csv += buf;
        }
        for (auto ita = cell.methods.begin(); ita != cell.methods.end(); ++ita) {
            for (auto itb = std::next(ita); itb != cell.methods.end(); ++itb) {
                TTestReport t = paired_t_test(ita->second.fold_accuracy, itb->second.fold_accuracy);
                char buf[160];
                std::snprintf(buf, sizeof(buf), "%s,%s,%s,%.6f,%d,%d,%d\n", kl.c_str(),
                              combiner_name(ita->first), combiner_name(itb->first), t.t,
                              t.sig90 ? 1 : 0, t.sig95 ? 1 : 0, t.sig99 ? 1 : 0);
                ttest_csv += buf;
            }
        }
    }

    write_file(fs::path(cfg.output_dir) / "accuracy.csv", acc_csv);
    write_file(fs::path(cfg.output_dir) / "accuracy.txt", acc_txt);
    write_file(fs::path(cfg.output_dir) / "counts.csv", counts_csv);
    write_file(fs::path(cfg.output_dir) / "timing.csv", timing_csv);
    write_file(fs::path(cfg.output_dir) / "ttests.csv", ttest_csv);

    json plan = to_json(result.plan);
    plan["config_hash"] = cfg.hash;
    write_file(fs::path(cfg.output_dir) / "foldplan.json", plan.dump(2) + "\n");

    if (strict && !result.all_converged()) {
        std::fprintf(stderr, "warning: at least one binary model did not converge\n");
        return 4;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

int cmd_train(const RunConfig& cfg, int jobs, bool strict) {
    Dataset data = load_csv(cfg.dataset, cfg.label_column);
    std::vector<int> all_rows(data.size());
    for (std::size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = static_cast<int>(i);
    ScalingParams scaling = fit_scaling(data, all_rows);
    Dataset scaled = apply_scaling(data, scaling);

    bool converged = true;
    for (std::size_t ki = 0; ki < cfg.kernels.size(); ++ki) {
        EnsembleTrainOptions opts;
        opts.kernel = cfg.kernels[ki];
        opts.train.C = cfg.C;
        opts.train.tolerance = cfg.tolerance;
        opts.train.max_iter = cfg.max_iter;
        opts.inner_k = cfg.inner_k;
        opts.seed = derive_seed(cfg.seed, {0x04a1ULL, ki});
        TrainedEnsemble ensemble = train_pairwise(scaled, opts, jobs);
        converged = converged && ensemble.all_converged();

        json manifest;
        manifest["config_hash"] = cfg.hash;
        manifest["seed"] = cfg.seed;
        manifest["kernel"] = to_json(cfg.kernels[ki]);
        manifest["scaling"] = to_json(scaling);
        const fs::path dir = fs::path(cfg.output_dir) / ("bundle_" + kernel_label(cfg.kernels[ki]));
        save_ensemble_bundle(dir.string(), ensemble, manifest);
        std::printf("wrote %s (%d models)\n", dir.string().c_str(),
                    static_cast<int>(ensemble.pairs.size()));
    }
    if (strict && !converged) {
        std::fprintf(stderr, "warning: at least one binary model did not converge\n");
        return 4;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// estimators
// ---------------------------------------------------------------------------

int cmd_estimators(const RunConfig& cfg, int jobs) {
    Dataset data = load_csv(cfg.dataset, cfg.label_column);
    if (pair_count(data.n_classes) < 2) {
        throw DataError("estimators: need at least 2 binary problems");
    }

    // Stratified train/holdout split; holdout rows provide the actual risks.
    const int holdout_k =
        std::max(2, static_cast<int>(std::lround(1.0 / std::max(0.05, cfg.holdout_fraction))));
    FoldPlan split = stratified_kfold(data, holdout_k, derive_seed(cfg.seed, {0xe57ULL}));
    std::vector<int> train_rows = split.train_rows(0);
    std::vector<int> hold_rows = split.fold_rows(0);

    ScalingParams scaling = fit_scaling(data, train_rows);
    Dataset scaled = apply_scaling(data, scaling);
    Dataset train_ds = sub_dataset(scaled, train_rows);

    EnsembleTrainOptions opts;
    opts.kernel = cfg.kernels.front();
    opts.train.C = cfg.C;
    opts.train.tolerance = cfg.tolerance;
    opts.train.max_iter = cfg.max_iter;
    opts.inner_k = cfg.inner_k;
    opts.seed = derive_seed(cfg.seed, {0xe571ULL});
    TrainedEnsemble ensemble = train_pairwise(train_ds, opts, jobs);

    std::vector<BinaryModel> models;
    for (const auto& tp : ensemble.pairs) models.push_back(tp.model);
    std::vector<GenErrorEstimate> margins = margin_bound(models);

    const int P = static_cast<int>(ensemble.pairs.size());
    std::vector<double> cv(P), sv(P), margin(P), risk(P);
    for (int i = 0; i < P; ++i) {
        const TrainedPair& tp = ensemble.pairs[i];
        cv[i] = tp.gen_error.value;
        sv[i] = sv_bound(tp.model).value;
        margin[i] = margins[i].value;
        long wrong = 0, total = 0;
        for (int r : hold_rows) {
            const int label = scaled.labels[r];
            if (label != tp.pair.a && label != tp.pair.b) continue;
            ++total;
            if (winner(tp.model, scaled.row(r)) != label) ++wrong;
        }
        risk[i] = total > 0 ? static_cast<double>(wrong) / static_cast<double>(total) : 0.0;
    }

    fs::create_directories(cfg.output_dir);
    std::string csv = report_header(cfg) + "pair_a,pair_b,cv,sv_bound,margin_bound,holdout_risk\n";
    for (int i = 0; i < P; ++i) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%d,%d,%.6f,%.6f,%.6f,%.6f\n", ensemble.pairs[i].pair.a,
                      ensemble.pairs[i].pair.b, cv[i], sv[i], margin[i], risk[i]);
        csv += buf;
    }
    write_file(fs::path(cfg.output_dir) / "estimators.csv", csv);

    const double r_cv = pearson_r(cv, risk);
    const double r_sv = pearson_r(sv, risk);
    const double r_margin = pearson_r(margin, risk);
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "pearson_r cv=%.4f sv_bound=%.4f margin_bound=%.4f\ncv_best=%d ordering=%s\n",
                  r_cv, r_sv, r_margin, (r_cv > r_sv && r_cv > r_margin) ? 1 : 0,
                  (r_cv > r_sv && r_sv > r_margin) ? "cv>sv>margin" : "other");
    write_file(fs::path(cfg.output_dir) / "estimators_summary.txt", report_header(cfg) + buf);
    std::printf("%s", buf);
    return 0;
}

// ---------------------------------------------------------------------------
// risk
// ---------------------------------------------------------------------------

int cmd_risk(const RunConfig& cfg, int jobs) {
    Dataset data = load_csv(cfg.dataset, cfg.label_column);
    ExperimentSpec spec = cfg.experiment_spec();
    spec.methods = {CombinerKind::MaxWins};
    ExperimentResult result = run_experiment(data, spec, jobs);

    fs::create_directories(cfg.output_dir);
    std::string csv = report_header(cfg) + "kernel,rank,dp_bucket,count\n";
    for (const auto& cell : result.cells) {
        write_verdicts_jsonl((fs::path(cfg.output_dir) /
                              ("verdicts_" + kernel_label(cell.kernel) + ".jsonl"))
                                 .string(),
                             cell.vote_verdicts, cell.vote_labels);
        RiskHistogram hist = risk_analysis(cell.vote_verdicts, cell.vote_labels);
        for (int rank = 0; rank < RiskHistogram::kRankRows; ++rank) {
            for (int b = 0; b < RiskHistogram::kDpBuckets; ++b) {
                if (hist.cells[rank][b] == 0) continue;
                char buf[96];
                std::snprintf(buf, sizeof(buf), "%s,%d,%d,%ld\n",
                              kernel_label(cell.kernel).c_str(), rank + 1, b,
                              hist.cells[rank][b]);
                csv += buf;
            }
        }
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%s,total,,%ld\n", kernel_label(cell.kernel).c_str(),
                      hist.high_risk_examples);
        csv += buf;
    }
    write_file(fs::path(cfg.output_dir) / "risk.csv", csv);
    return 0;
}

}  // namespace

ExperimentSpec RunConfig::experiment_spec() const {
    ExperimentSpec spec;
    spec.kernels = kernels;
    spec.methods = methods;
    spec.outer_k = k;
    spec.inner_k = inner_k;
    spec.seed = seed;
    spec.order_sample_size = order_sample_size;
    spec.vcf_threshold = vcf_threshold;
    spec.train.C = C;
    spec.train.tolerance = tolerance;
    spec.train.max_iter = max_iter;
    return spec;
}

RunConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!kAllowedKeys.count(key)) throw ConfigError("unknown config field '" + key + "'");
    }
    RunConfig cfg;
    if (!j.contains("dataset")) throw ConfigError("config field 'dataset' is required");
    cfg.dataset = get_field<std::string>(j, "dataset", "");

    if (j.contains("label_column")) {
        const json& lc = j.at("label_column");
        if (lc.is_number_integer()) {
            cfg.label_column = lc.get<int>();
        } else if (lc.is_string()) {
            cfg.label_column = lc.get<std::string>();
        } else {
            throw ConfigError("config field 'label_column' must be an integer or a string");
        }
    }

    if (j.contains("kernels")) {
        if (!j.at("kernels").is_array() || j.at("kernels").empty()) {
            throw ConfigError("config field 'kernels' must be a non-empty array");
        }
        for (const auto& kj : j.at("kernels")) {
            try {
                cfg.kernels.push_back(kernel_from_json(kj));
            } catch (const json::exception&) {
                throw ConfigError("config field 'kernels' contains a malformed kernel");
            }
        }
    } else {
        for (int d : {2, 3, 4, 5}) cfg.kernels.push_back(KernelSpec::polynomial(d));
    }
    for (const auto& kspec : cfg.kernels) {
        if (kspec.kind == KernelSpec::Kind::Polynomial && kspec.degree <= 0) {
            throw ConfigError("config field 'kernels': polynomial degree must be positive");
        }
        if (kspec.kind == KernelSpec::Kind::Rbf && !(kspec.gamma > 0.0)) {
            throw ConfigError("config field 'kernels': rbf gamma must be positive");
        }
    }

    if (j.contains("methods")) {
        if (!j.at("methods").is_array() || j.at("methods").empty()) {
            throw ConfigError("config field 'methods' must be a non-empty array");
        }
        for (const auto& mj : j.at("methods")) {
            if (!mj.is_string()) throw ConfigError("config field 'methods' must hold strings");
            auto m = combiner_from_name(mj.get<std::string>());
            if (!m) {
                throw ConfigError("config field 'methods': unknown method '" +
                                  mj.get<std::string>() + "'");
            }
            cfg.methods.push_back(*m);
        }
    } else {
        cfg.methods = all_methods();
    }

    cfg.k = get_field<int>(j, "k", cfg.k);
    if (cfg.k < 2) throw ConfigError("config field 'k' must be at least 2");
    cfg.inner_k = get_field<int>(j, "inner_k", cfg.inner_k);
    if (cfg.inner_k < 2) throw ConfigError("config field 'inner_k' must be at least 2");
    cfg.seed = get_field<std::uint64_t>(j, "seed", cfg.seed);
    cfg.order_sample_size = get_field<long>(j, "order_sample_size", cfg.order_sample_size);
    if (cfg.order_sample_size < 1) {
        throw ConfigError("config field 'order_sample_size' must be positive");
    }
    cfg.vcf_threshold = get_field<double>(j, "vcf_threshold", cfg.vcf_threshold);
    if (cfg.vcf_threshold < 0.0 || cfg.vcf_threshold > 100.0) {
        throw ConfigError("config field 'vcf_threshold' must lie in [0, 100]");
    }
    cfg.C = get_field<double>(j, "C", cfg.C);
    if (!(cfg.C > 0.0)) throw ConfigError("config field 'C' must be positive");
    cfg.tolerance = get_field<double>(j, "tolerance", cfg.tolerance);
    if (!(cfg.tolerance > 0.0)) throw ConfigError("config field 'tolerance' must be positive");
    cfg.max_iter = get_field<long>(j, "max_iter", cfg.max_iter);
    if (cfg.max_iter < 0) throw ConfigError("config field 'max_iter' must be non-negative");
    cfg.holdout_fraction = get_field<double>(j, "holdout_fraction", cfg.holdout_fraction);
    if (!(cfg.holdout_fraction > 0.0) || cfg.holdout_fraction >= 1.0) {
        throw ConfigError("config field 'holdout_fraction' must lie in (0, 1)");
    }
    cfg.output_dir = get_field<std::string>(j, "output_dir", cfg.output_dir);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"one-vs-one multiclass SVM combiners benchmark"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> methods_override;
    std::optional<double> threshold_override;
    int jobs = hardware_jobs();
    bool strict = false;

    for (const char* name : {"train", "evaluate", "estimators", "risk"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("-c,--config", config_path, "JSON config file")->required();
        sub->add_option("--seed", seed_override, "override config seed");
        sub->add_option("--methods", methods_override, "comma-separated method list override");
        sub->add_option("--threshold", threshold_override, "override VCF threshold");
        sub->add_option("-j,--jobs", jobs, "parallel work units");
        sub->add_flag("--strict", strict, "exit 4 on training non-convergence");
    }

    std::vector<const char*> argv;
    argv.push_back("ovo");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        RunConfig cfg = load_config(config_path);
        if (seed_override) cfg.seed = *seed_override;
        if (threshold_override) cfg.vcf_threshold = *threshold_override;
        if (methods_override) {
            cfg.methods.clear();
            std::string item;
            std::stringstream ss(*methods_override);
            while (std::getline(ss, item, ',')) {
                auto m = combiner_from_name(item);
                if (!m) throw ConfigError("unknown method in --methods: '" + item + "'");
                cfg.methods.push_back(*m);
            }
            if (cfg.methods.empty()) throw ConfigError("--methods resolved to an empty list");
        }
        cfg.hash = config_hash(canonical_json(cfg));

        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "train") return cmd_train(cfg, jobs, strict);
        if (sub == "evaluate") return cmd_evaluate(cfg, jobs, strict);
        if (sub == "estimators") return cmd_estimators(cfg, jobs);
        if (sub == "risk") return cmd_risk(cfg, jobs);
        return 1;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    }
}

}  // namespace ovo
