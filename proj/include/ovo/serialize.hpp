#pragma once

#include <string>

#include "json.hpp"
#include "ovo/combiners.hpp"
#include "ovo/dataset.hpp"
#include "ovo/ensemble.hpp"
#include "ovo/svm.hpp"

namespace ovo {

using json = nlohmann::json;

json to_json(const KernelSpec& k);
KernelSpec kernel_from_json(const json& j);

json to_json(const ScalingParams& p);
ScalingParams scaling_from_json(const json& j);

json to_json(const FoldPlan& p);
FoldPlan foldplan_from_json(const json& j);

json to_json(const BinaryModel& m);
BinaryModel model_from_json(const json& j);

json to_json(const GenErrorEstimate& e);
GenErrorEstimate estimate_from_json(const json& j);

json to_json(const Verdict& v);

// One verdict per line, with its true label when provided.
void write_verdicts_jsonl(const std::string& path, std::span<const Verdict> verdicts,
                          std::span<const int> labels);

// Model bundle directory: manifest.json plus one model file per pair and a
// tidy generalization-error CSV (pair_a, pair_b, kind, value).
void save_ensemble_bundle(const std::string& dir, const TrainedEnsemble& ensemble,
                          const json& manifest_extra);
TrainedEnsemble load_ensemble_bundle(const std::string& dir);

// FNV-1a over a canonical JSON dump; stable across platforms.
std::uint64_t fnv1a64(const std::string& text);
std::uint64_t config_hash(const json& config);

const char* estimator_kind_name(EstimatorKind kind);

}  // namespace ovo
