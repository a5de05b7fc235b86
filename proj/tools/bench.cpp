// Benchmark comparing the serial reference implementations against the
// OpenMP kernels: pairwise ensemble training, per-example decision tables,
// and order averaging. Results of both paths are checked for equality.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

#include "ovo/ensemble.hpp"
#include "ovo/evaluation.hpp"
#include "ovo/parallel.hpp"

using namespace ovo;

namespace {

double gauss(Rng& rng) {
    double u1 = rng.unit(), u2 = rng.unit();
    u1 = std::max(u1, 1e-12);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

Dataset make_blobs(int n_classes, int per_class, int dim, double spread, std::uint64_t seed) {
    Dataset data;
    data.n_classes = n_classes;
    Rng rng(seed);
    std::vector<std::vector<double>> centers(n_classes, std::vector<double>(dim));
    for (auto& c : centers) {
        for (double& v : c) v = 10.0 * rng.unit() - 5.0;
    }
    std::vector<double> row(dim);
    for (int c = 0; c < n_classes; ++c) {
        data.class_names.push_back("c" + std::to_string(c));
        for (int i = 0; i < per_class; ++i) {
            for (int d = 0; d < dim; ++d) row[d] = centers[c][d] + spread * gauss(rng);
            data.features.push_row(row);
            data.labels.push_back(c);
        }
    }
    return data;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <typename F>
double timed(F&& f) {
    auto start = std::chrono::steady_clock::now();
    f();
    return seconds_since(start);
}

void report(const char* name, double serial_s, double parallel_s, bool equal) {
    std::printf("%-18s serial %8.3fs   openmp %8.3fs   speedup %5.2fx   equal %s\n", name,
                serial_s, parallel_s, serial_s / std::max(parallel_s, 1e-9),
                equal ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
    bool quick = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) quick = true;
    }
    const int jobs = hardware_jobs();
    std::printf("threads: %d\n", jobs);

    const int n_classes = quick ? 5 : 10;
    const int per_class = quick ? 30 : 120;
    Dataset data = make_blobs(n_classes, per_class, 6, 1.4, 7);

    EnsembleTrainOptions opts;
    opts.kernel = KernelSpec::rbf(0.5);
    opts.inner_k = 5;
    opts.seed = 11;

    TrainedEnsemble serial_ens, parallel_ens;
    double t_train_serial = timed([&] { serial_ens = train_pairwise_serial(data, opts); });
    double t_train_parallel = timed([&] { parallel_ens = train_pairwise(data, opts, jobs); });
    bool train_equal = serial_ens.pairs.size() == parallel_ens.pairs.size();
    for (std::size_t i = 0; train_equal && i < serial_ens.pairs.size(); ++i) {
        train_equal = serial_ens.pairs[i].model.alphas == parallel_ens.pairs[i].model.alphas &&
                      serial_ens.pairs[i].model.bias == parallel_ens.pairs[i].model.bias &&
                      serial_ens.pairs[i].gen_error.value == parallel_ens.pairs[i].gen_error.value;
    }
    report("train_pairwise", t_train_serial, t_train_parallel, train_equal);

    PairwiseEnsemble view = serial_ens.view();
    std::vector<int> rows(data.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);

    std::vector<DecisionTable> tables_serial, tables_parallel;
    double t_tab_serial = timed([&] { tables_serial = decision_tables_serial(view, data, rows); });
    double t_tab_parallel =
        timed([&] { tables_parallel = decision_tables(view, data, rows, jobs); });
    report("decision_tables", t_tab_serial, t_tab_parallel, tables_serial == tables_parallel);

    const long sample = quick ? 2000 : 20000;
    double avg_serial = 0.0, avg_parallel = 0.0;
    double t_ord_serial = timed([&] {
        avg_serial = order_average_serial(data.n_classes, tables_serial, data.labels,
                                          CombinerKind::Ddag, sample, 3);
    });
    double t_ord_parallel = timed([&] {
        avg_parallel = order_average(data.n_classes, tables_serial, data.labels,
                                     CombinerKind::Ddag, sample, 3, jobs);
    });
    report("order_average", t_ord_serial, t_ord_parallel, avg_serial == avg_parallel);

    return (train_equal && tables_serial == tables_parallel && avg_serial == avg_parallel) ? 0 : 1;
}
