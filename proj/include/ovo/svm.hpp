#pragma once

#include <cstdint>
#include <span>
#include <utility>

#include "ovo/common.hpp"
#include "ovo/dataset.hpp"

namespace ovo {

// Kernel function description. Exactly the parameters of the active kind
// are meaningful.
struct KernelSpec {
    enum class Kind { Polynomial, Rbf };

    Kind kind = Kind::Rbf;
    int degree = 3;      // polynomial only
    double gamma = 0.1;  // rbf only

    static KernelSpec polynomial(int d) {
        KernelSpec s;
        s.kind = Kind::Polynomial;
        s.degree = d;
        return s;
    }
    static KernelSpec rbf(double g) {
        KernelSpec s;
        s.kind = Kind::Rbf;
        s.gamma = g;
        return s;
    }

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

// polynomial: |x.y + 1|^d     rbf: exp(-gamma * ||x - y||^2)
double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y);

struct TrainConfig {
    double C = 1.0;
    double tolerance = 1e-3;  // KKT violation threshold
    long max_iter = 0;        // 0 = auto (10 * training size)
    std::uint64_t seed = 0;
};

// Trained two-class kernel machine. Only support vectors are stored;
// alphas[i] is the dual coefficient times the binary label, so the decision
// value is sum_i alphas[i] * K(sv_i, x) + bias.
struct BinaryModel {
    Matrix support_vectors;
    std::vector<double> alphas;
    double bias = 0.0;
    KernelSpec kernel;
    double margin = 0.0;  // 1/|w| in feature space
    int sv_count = 0;
    int train_count = 0;
    std::pair<int, int> classes{-1, -1};  // (positive, negative)
    bool converged = true;

    std::size_t dim() const { return support_vectors.cols(); }
};

// SMO with maximal-KKT-violation pair selection. Deterministic given the
// view and config. Non-convergence within the iteration cap yields a
// best-effort model with converged = false.
BinaryModel train(const TwoClassView& view, const KernelSpec& kernel, const TrainConfig& cfg);

// Signed decision value; >= 0 means classes.first wins.
double decide(const BinaryModel& model, std::span<const double> x);

inline int winner(const BinaryModel& model, std::span<const double> x) {
    return decide(model, x) >= 0.0 ? model.classes.first : model.classes.second;
}

}  // namespace ovo
