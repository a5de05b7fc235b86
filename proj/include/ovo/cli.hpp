#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ovo/evaluation.hpp"
#include "ovo/serialize.hpp"

namespace ovo {

// Parsed and validated run configuration (mirrors ExperimentSpec plus I/O).
struct RunConfig {
    std::string dataset;
    ColumnSelector label_column = -1;  // default: last column
    std::vector<KernelSpec> kernels;
    std::vector<CombinerKind> methods;
    int k = 5;
    int inner_k = 5;
    std::uint64_t seed = 42;
    long order_sample_size = 50000;
    double vcf_threshold = 10.0;
    double C = 1.0;
    double tolerance = 1e-3;
    long max_iter = 0;
    double holdout_fraction = 0.5;  // estimators command
    std::string output_dir = "out";

    std::uint64_t hash = 0;  // canonical config hash, set after overrides

    ExperimentSpec experiment_spec() const;
};

// Loads and validates a JSON config; unknown keys are rejected and errors
// name the offending field.
RunConfig parse_config(const json& j);
RunConfig load_config(const std::string& path);

// Exit codes: 0 ok, 1 usage, 2 config error, 3 data error,
// 4 training non-convergence under --strict.
int run_cli(const std::vector<std::string>& args);

}  // namespace ovo
