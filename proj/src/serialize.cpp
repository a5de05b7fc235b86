#include "ovo/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

namespace ovo {

namespace fs = std::filesystem;

json to_json(const KernelSpec& k) {
    if (k.kind == KernelSpec::Kind::Polynomial) {
        return json{{"kind", "polynomial"}, {"degree", k.degree}};
    }
    return json{{"kind", "rbf"}, {"gamma", k.gamma}};
}

KernelSpec kernel_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "polynomial") return KernelSpec::polynomial(j.at("degree").get<int>());
    if (kind == "rbf") return KernelSpec::rbf(j.at("gamma").get<double>());
    throw ConfigError("unknown kernel kind: " + kind);
}

json to_json(const ScalingParams& p) {
    return json{{"col_min", p.col_min}, {"col_max", p.col_max}};
}

ScalingParams scaling_from_json(const json& j) {
    ScalingParams p;
    p.col_min = j.at("col_min").get<std::vector<double>>();
    p.col_max = j.at("col_max").get<std::vector<double>>();
    return p;
}

json to_json(const FoldPlan& p) {
    return json{{"k", p.k}, {"assignment", p.assignment}, {"seed", p.seed}};
}

FoldPlan foldplan_from_json(const json& j) {
    FoldPlan p;
    p.k = j.at("k").get<int>();
    p.assignment = j.at("assignment").get<std::vector<int>>();
    p.seed = j.at("seed").get<std::uint64_t>();
    return p;
}

json to_json(const BinaryModel& m) {
    json sv = json::array();
    for (int i = 0; i < m.sv_count; ++i) {
        auto row = m.support_vectors.row(i);
        sv.push_back(std::vector<double>(row.begin(), row.end()));
    }
    json out{{"kernel", to_json(m.kernel)},
             {"support_vectors", std::move(sv)},
             {"alphas", m.alphas},
             {"bias", m.bias},
             {"sv_count", m.sv_count},
             {"train_count", m.train_count},
             {"positive_class", m.classes.first},
             {"negative_class", m.classes.second},
             {"converged", m.converged}};
    // JSON has no infinity literal; degenerate separations store it as a tag
    if (std::isfinite(m.margin)) {
        out["margin"] = m.margin;
    } else {
        out["margin"] = "inf";
    }
    return out;
}

BinaryModel model_from_json(const json& j) {
    BinaryModel m;
    m.kernel = kernel_from_json(j.at("kernel"));
    for (const auto& row : j.at("support_vectors")) {
        m.support_vectors.push_row(row.get<std::vector<double>>());
    }
    m.alphas = j.at("alphas").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    const json& margin = j.at("margin");
    m.margin = margin.is_string() ? std::numeric_limits<double>::infinity()
                                  : margin.get<double>();
    m.sv_count = j.at("sv_count").get<int>();
    m.train_count = j.at("train_count").get<int>();
    m.classes = {j.at("positive_class").get<int>(), j.at("negative_class").get<int>()};
    m.converged = j.at("converged").get<bool>();
    return m;
}

const char* estimator_kind_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::Cv: return "cv";
        case EstimatorKind::SvBound: return "sv_bound";
        case EstimatorKind::MarginBound: return "margin_bound";
    }
    return "?";
}

json to_json(const GenErrorEstimate& e) {
    return json{{"value", e.value},
                {"kind", estimator_kind_name(e.kind)},
                {"pair_a", e.pair.a},
                {"pair_b", e.pair.b},
                {"uninformative", e.uninformative},
                {"folds_used", e.folds_used}};
}

GenErrorEstimate estimate_from_json(const json& j) {
    GenErrorEstimate e;
    e.value = j.at("value").get<double>();
    const std::string kind = j.at("kind").get<std::string>();
    e.kind = kind == "cv"       ? EstimatorKind::Cv
             : kind == "sv_bound" ? EstimatorKind::SvBound
                                  : EstimatorKind::MarginBound;
    e.pair = ClassPair(j.at("pair_a").get<int>(), j.at("pair_b").get<int>());
    e.uninformative = j.at("uninformative").get<bool>();
    e.folds_used = j.at("folds_used").get<int>();
    return e;
}

json to_json(const Verdict& v) {
    json trace = json::array();
    for (const auto& [p, w] : v.trace) {
        trace.push_back(json::array({p.a, p.b, w}));
    }
    json out{{"predicted", v.predicted},
             {"evaluations", v.evaluations},
             {"trace", std::move(trace)}};
    if (v.votes) out["votes"] = *v.votes;
    if (v.tie_fallback) out["tie_fallback"] = true;
    return out;
}

void write_verdicts_jsonl(const std::string& path, std::span<const Verdict> verdicts,
                          std::span<const int> labels) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        json line = to_json(verdicts[i]);
        if (i < labels.size()) line["label"] = labels[i];
        out << line.dump() << '\n';
    }
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path.string());
    out << text;
}

std::string model_filename(ClassPair p) {
    return "model_" + std::to_string(p.a) + "_" + std::to_string(p.b) + ".json";
}

}  // namespace

void save_ensemble_bundle(const std::string& dir, const TrainedEnsemble& ensemble,
                          const json& manifest_extra) {
    fs::create_directories(dir);
    json manifest = manifest_extra;
    manifest["n_classes"] = ensemble.n_classes;
    manifest["class_names"] = ensemble.class_names;
    json files = json::array();
    for (const TrainedPair& tp : ensemble.pairs) {
        const std::string name = model_filename(tp.pair);
        json entry = to_json(tp.model);
        entry["gen_error"] = to_json(tp.gen_error);
        write_text(fs::path(dir) / name, entry.dump(2) + "\n");
        files.push_back(name);
    }
    manifest["models"] = std::move(files);
    write_text(fs::path(dir) / "manifest.json", manifest.dump(2) + "\n");

    std::string csv = "pair_a,pair_b,kind,value\n";
    for (const TrainedPair& tp : ensemble.pairs) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%d,%d,%s,%.12g\n", tp.gen_error.pair.a,
                      tp.gen_error.pair.b, estimator_kind_name(tp.gen_error.kind),
                      tp.gen_error.value);
        csv += buf;
    }
    write_text(fs::path(dir) / "gen_errors.csv", csv);
}

TrainedEnsemble load_ensemble_bundle(const std::string& dir) {
    std::ifstream in(fs::path(dir) / "manifest.json");
    if (!in) throw DataError("cannot open bundle manifest in " + dir);
    json manifest = json::parse(in);

    TrainedEnsemble ensemble;
    ensemble.n_classes = manifest.at("n_classes").get<int>();
    ensemble.class_names = manifest.at("class_names").get<std::vector<std::string>>();
    for (const auto& name : manifest.at("models")) {
        std::ifstream min(fs::path(dir) / name.get<std::string>());
        if (!min) throw DataError("missing model file in bundle: " + name.get<std::string>());
        json mj = json::parse(min);
        TrainedPair tp;
        tp.model = model_from_json(mj);
        tp.gen_error = estimate_from_json(mj.at("gen_error"));
        tp.pair = ClassPair(tp.model.classes.first, tp.model.classes.second);
        ensemble.pairs.push_back(std::move(tp));
    }
    std::sort(ensemble.pairs.begin(), ensemble.pairs.end(),
              [](const TrainedPair& a, const TrainedPair& b) { return a.pair < b.pair; });
    return ensemble;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::uint64_t config_hash(const json& config) {
    return fnv1a64(config.dump());  // object keys are sorted by nlohmann
}

}  // namespace ovo
