#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <limits>

#include "doctest.h"
#include "ovo/serialize.hpp"
#include "testutil.hpp"

using namespace ovo;

TEST_CASE("kernel spec round-trip") {
    KernelSpec poly = KernelSpec::polynomial(4);
    KernelSpec rbf = KernelSpec::rbf(0.05);
    CHECK(kernel_from_json(to_json(poly)) == poly);
    CHECK(kernel_from_json(to_json(rbf)) == rbf);
    CHECK_THROWS_AS(kernel_from_json(json{{"kind", "sigmoid"}}), ConfigError);
}

TEST_CASE("binary model json round-trip preserves decision values bit-exactly") {
    Dataset d = ovotest::make_blobs({{0.0, 0.0}, {1.3, 1.1}}, 18, 0.9, 3);
    TwoClassView v = pair_subset(d, 0, 1);
    BinaryModel m = train(v, KernelSpec::rbf(0.37), {});
    BinaryModel back = model_from_json(to_json(m));
    CHECK(back.sv_count == m.sv_count);
    CHECK(back.classes == m.classes);
    CHECK(back.margin == m.margin);
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x{4.0 * rng.unit() - 2.0, 4.0 * rng.unit() - 2.0};
        double a = decide(m, x);
        double b = decide(back, x);
        REQUIRE(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("scaling and fold plan round-trips") {
    Dataset d = ovotest::make_blobs({{0, 0}, {5, 5}}, 9, 1.0, 7);
    ScalingParams p = fit_scaling(d, ovotest::iota_rows(d.size()));
    ScalingParams p2 = scaling_from_json(to_json(p));
    CHECK(p2.col_min == p.col_min);
    CHECK(p2.col_max == p.col_max);

    FoldPlan plan = stratified_kfold(d, 3, 11);
    FoldPlan plan2 = foldplan_from_json(to_json(plan));
    CHECK(plan2.k == plan.k);
    CHECK(plan2.seed == plan.seed);
    CHECK(plan2.assignment == plan.assignment);
}

TEST_CASE("degenerate infinite margin survives the json round-trip") {
    BinaryModel m;
    m.margin = std::numeric_limits<double>::infinity();
    m.classes = {0, 1};
    m.kernel = KernelSpec::rbf(1.0);
    BinaryModel back = model_from_json(to_json(m));
    CHECK(std::isinf(back.margin));
    CHECK(back.margin > 0);
}

TEST_CASE("gen error estimate round-trip") {
    GenErrorEstimate e;
    e.value = 0.125;
    e.kind = EstimatorKind::MarginBound;
    e.pair = ClassPair(2, 5);
    e.folds_used = 4;
    GenErrorEstimate back = estimate_from_json(to_json(e));
    CHECK(back.value == e.value);
    CHECK(back.kind == e.kind);
    CHECK(back.pair == e.pair);
    CHECK(back.folds_used == e.folds_used);
}

TEST_CASE("ensemble bundle save/load preserves every decision value") {
    Dataset d = ovotest::make_blobs({{0, 0}, {3, 0}, {0, 3}}, 10, 0.6, 13);
    EnsembleTrainOptions opts;
    opts.kernel = KernelSpec::polynomial(2);
    opts.seed = 3;
    TrainedEnsemble ensemble = train_pairwise_serial(d, opts);

    auto dir = std::filesystem::temp_directory_path() / "ovo_bundle_test";
    std::filesystem::remove_all(dir);
    save_ensemble_bundle(dir.string(), ensemble, json{{"config_hash", 123}});
    TrainedEnsemble back = load_ensemble_bundle(dir.string());

    REQUIRE(back.pairs.size() == ensemble.pairs.size());
    CHECK(back.n_classes == ensemble.n_classes);
    CHECK(back.class_names == ensemble.class_names);
    Rng rng(17);
    for (std::size_t i = 0; i < ensemble.pairs.size(); ++i) {
        CHECK(back.pairs[i].pair == ensemble.pairs[i].pair);
        CHECK(back.pairs[i].gen_error.value == ensemble.pairs[i].gen_error.value);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<double> x{6.0 * rng.unit() - 1.0, 6.0 * rng.unit() - 1.0};
            REQUIRE(std::abs(decide(back.pairs[i].model, x) -
                             decide(ensemble.pairs[i].model, x)) <= 1e-12);
        }
    }
    CHECK(std::filesystem::exists(dir / "gen_errors.csv"));
    CHECK(std::filesystem::exists(dir / "manifest.json"));
}

TEST_CASE("verdict trace exports as json lines") {
    Verdict v;
    v.predicted = 2;
    v.evaluations = 3;
    v.trace = {{ClassPair(0, 1), 1}, {ClassPair(1, 2), 2}, {ClassPair(0, 2), 2}};
    v.votes = std::vector<int>{0, 1, 2};
    Verdict plain;
    plain.predicted = 0;
    plain.evaluations = 1;
    plain.trace = {{ClassPair(0, 1), 0}};

    auto path = std::filesystem::temp_directory_path() / "ovo_verdicts.jsonl";
    std::vector<Verdict> verdicts{v, plain};
    std::vector<int> labels{2, 1};
    write_verdicts_jsonl(path.string(), verdicts, labels);

    std::ifstream in(path);
    std::string line;
    REQUIRE(std::getline(in, line));
    json first = json::parse(line);
    CHECK(first.at("predicted") == 2);
    CHECK(first.at("evaluations") == 3);
    CHECK(first.at("label") == 2);
    CHECK(first.at("trace").size() == 3);
    CHECK(first.at("trace")[0] == json::array({0, 1, 1}));
    CHECK(first.at("votes") == json::array({0, 1, 2}));
    REQUIRE(std::getline(in, line));
    json second = json::parse(line);
    CHECK(second.at("predicted") == 0);
    CHECK_FALSE(second.contains("votes"));
    CHECK_FALSE(std::getline(in, line));
}

TEST_CASE("fnv1a64 known vectors and config hash stability") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);

    json a = {{"x", 1}, {"y", "z"}};
    json b = {{"y", "z"}, {"x", 1}};  // same content, different insertion order
    CHECK(config_hash(a) == config_hash(b));
    json c = {{"x", 2}, {"y", "z"}};
    CHECK(config_hash(a) != config_hash(c));
}
