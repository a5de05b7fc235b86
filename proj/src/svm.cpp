#include "ovo/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ovo/detail/gram_cache.hpp"

namespace ovo {

double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("kernel_eval: dimension mismatch");
    switch (spec.kind) {
        case KernelSpec::Kind::Polynomial: {
            double dot = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
            return std::pow(std::abs(dot + 1.0), spec.degree);
        }
        case KernelSpec::Kind::Rbf: {
            double dist2 = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                double d = x[i] - y[i];
                dist2 += d * d;
            }
            return std::exp(-spec.gamma * dist2);
        }
    }
    throw ConfigError("kernel_eval: unknown kernel kind");
}

BinaryModel train(const TwoClassView& view, const KernelSpec& kernel, const TrainConfig& cfg) {
    const std::size_t m = view.size();
    std::size_t n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < m; ++i) (view.label(i) > 0 ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0) {
        throw DataError("train: a class of the two-class view is empty");
    }

    const double C = cfg.C;
    detail::GramCache gram(view, kernel);

    std::vector<double> alpha(m, 0.0);
    // err[i] = u_i - y_i where u_i = sum_j alpha_j y_j K_ij (no bias term).
    std::vector<double> err(m);
    for (std::size_t i = 0; i < m; ++i) err[i] = -static_cast<double>(view.label(i));

    const long max_iter = cfg.max_iter > 0 ? cfg.max_iter : static_cast<long>(10 * m);
    bool converged = false;

    for (long iter = 0; iter < max_iter; ++iter) {
        // Maximal violating pair: i in I_up with smallest err, j in I_low
        // with largest err. I_up members can raise y*alpha, I_low can lower.
        int i = -1, j = -1;
        double err_i = std::numeric_limits<double>::infinity();
        double err_j = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < m; ++k) {
            const bool pos = view.label(k) > 0;
            const bool in_up = pos ? alpha[k] < C : alpha[k] > 0.0;
            const bool in_low = pos ? alpha[k] > 0.0 : alpha[k] < C;
            if (in_up && err[k] < err_i) {
                err_i = err[k];
                i = static_cast<int>(k);
            }
            if (in_low && err[k] > err_j) {
                err_j = err[k];
                j = static_cast<int>(k);
            }
        }
        if (i < 0 || j < 0 || err_j - err_i <= cfg.tolerance) {
            converged = true;
            break;
        }

        auto row_i = gram.row(i);
        auto row_j = gram.row(j);
        const double yi = view.label(i), yj = view.label(j);

        // Step t raises y_i alpha_i and lowers y_j alpha_j, preserving the
        // equality constraint. eta <= 0 (indefinite kernel) degrades to a
        // full step onto the box boundary.
        double eta = row_i[i] + row_j[j] - 2.0 * row_i[j];
        double t = (err_j - err_i) / std::max(eta, 1e-12);
        t = std::min(t, yi > 0 ? C - alpha[i] : alpha[i]);
        t = std::min(t, yj > 0 ? alpha[j] : C - alpha[j]);

        alpha[i] += yi * t;
        alpha[j] -= yj * t;
        for (std::size_t k = 0; k < m; ++k) {
            err[k] += t * (row_i[k] - row_j[k]);
        }
    }

    // Bias from the KKT interval midpoint: b = -(min_up err + max_low err)/2.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) {
        const bool pos = view.label(k) > 0;
        const bool in_up = pos ? alpha[k] < C : alpha[k] > 0.0;
        const bool in_low = pos ? alpha[k] > 0.0 : alpha[k] < C;
        if (in_up) lo = std::min(lo, err[k]);
        if (in_low) hi = std::max(hi, err[k]);
    }
    double bias = 0.0;
    if (std::isfinite(lo) && std::isfinite(hi)) {
        bias = -(lo + hi) / 2.0;
    } else if (std::isfinite(lo)) {
        bias = -lo;
    } else if (std::isfinite(hi)) {
        bias = -hi;
    }

    BinaryModel model;
    model.kernel = kernel;
    model.bias = bias;
    model.train_count = static_cast<int>(m);
    model.classes = {view.pos_class, view.neg_class};
    model.converged = converged;

    const double sv_cut = 1e-12 * C;
    double w2 = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        if (alpha[k] <= sv_cut) continue;
        double coeff = alpha[k] * view.label(k);
        model.support_vectors.push_row(view.x(k));
        model.alphas.push_back(coeff);
        // u_k = err_k + y_k, and w^2 = sum_k coeff_k u_k over all points
        // (non-SVs contribute zero).
        w2 += coeff * (err[k] + view.label(k));
    }
    model.sv_count = static_cast<int>(model.alphas.size());
    model.margin = w2 > 0.0 ? 1.0 / std::sqrt(w2) : std::numeric_limits<double>::infinity();
    return model;
}

double decide(const BinaryModel& model, std::span<const double> x) {
    if (x.size() != model.dim() && model.sv_count > 0) {
        throw DataError("decide: dimension mismatch");
    }
    double value = model.bias;
    for (int i = 0; i < model.sv_count; ++i) {
        value += model.alphas[i] * kernel_eval(model.kernel, model.support_vectors.row(i), x);
    }
    return value;
}

}  // namespace ovo
