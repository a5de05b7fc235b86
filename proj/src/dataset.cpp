#include "ovo/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace ovo {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim surrounding whitespace
        auto begin = cell.find_first_not_of(" \t\r");
        auto end = cell.find_last_not_of(" \t\r");
        cells.push_back(begin == std::string::npos ? "" : cell.substr(begin, end - begin + 1));
    }
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

int resolve_label_column(const ColumnSelector& sel, const std::vector<std::string>& header,
                         int n_cols) {
    if (std::holds_alternative<int>(sel)) {
        int idx = std::get<int>(sel);
        if (idx < 0) idx += n_cols;
        if (idx < 0 || idx >= n_cols) {
            throw DataError("label column index out of range: " +
                            std::to_string(std::get<int>(sel)));
        }
        return idx;
    }
    const std::string& name = std::get<std::string>(sel);
    for (int i = 0; i < n_cols; ++i) {
        if (i < static_cast<int>(header.size()) && header[i] == name) return i;
    }
    throw DataError("label column not found in header: " + name);
}

}  // namespace

std::vector<int> FoldPlan::fold_rows(int fold) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] == fold) out.push_back(static_cast<int>(i));
    }
    return out;
}

std::vector<int> FoldPlan::train_rows(int fold) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] != fold) out.push_back(static_cast<int>(i));
    }
    return out;
}

Dataset load_csv(const std::string& path, const ColumnSelector& label_column) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file: " + path);

    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    if (lines.empty()) throw DataError("empty dataset file: " + path);

    // Header detection: data rows always contain numeric feature cells, so a
    // row whose cells are all non-numeric must be a header.
    std::vector<std::string> first = split_csv_line(lines[0]);
    bool has_header = true;
    for (const auto& cell : first) {
        double ignored;
        if (parse_double(cell, ignored)) {
            has_header = false;
            break;
        }
    }
    std::vector<std::string> header = has_header ? first : std::vector<std::string>{};
    const int n_cols = static_cast<int>(first.size());
    const int label_col = resolve_label_column(label_column, header, n_cols);

    Dataset out;
    std::unordered_map<std::string, int> label_ids;
    const std::size_t first_data = has_header ? 1 : 0;
    std::vector<double> feat_buf;
    for (std::size_t r = first_data; r < lines.size(); ++r) {
        std::vector<std::string> cells = split_csv_line(lines[r]);
        if (static_cast<int>(cells.size()) != n_cols) {
            throw DataError("row " + std::to_string(r + 1) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(n_cols));
        }
        feat_buf.clear();
        for (int c = 0; c < n_cols; ++c) {
            if (c == label_col) continue;
            double v;
            if (!parse_double(cells[c], v)) {
                throw DataError("non-numeric cell at row " + std::to_string(r + 1) +
                                ", column " + std::to_string(c + 1) + ": '" + cells[c] + "'");
            }
            feat_buf.push_back(v);
        }
        const std::string& lab = cells[label_col];
        auto [it, inserted] = label_ids.try_emplace(lab, static_cast<int>(out.class_names.size()));
        if (inserted) out.class_names.push_back(lab);
        out.labels.push_back(it->second);
        out.features.push_row(feat_buf);
    }
    out.n_classes = static_cast<int>(out.class_names.size());
    if (out.n_classes < 2) {
        throw DataError("dataset has fewer than 2 distinct labels: " + path);
    }
    return out;
}

void save_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write dataset file: " + path);
    for (std::size_t c = 0; c < data.dim(); ++c) {
        out << 'f' << c << ',';
    }
    out << "label\n";
    char buf[32];
    for (std::size_t r = 0; r < data.size(); ++r) {
        auto row = data.row(r);
        for (double v : row) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << buf << ',';
        }
        out << data.class_names[data.labels[r]] << '\n';
    }
}

ScalingParams fit_scaling(const Dataset& data, std::span<const int> rows) {
    if (rows.empty()) throw DataError("fit_scaling: empty row subset");
    ScalingParams p;
    const std::size_t d = data.dim();
    p.col_min.assign(d, 0.0);
    p.col_max.assign(d, 0.0);
    for (std::size_t c = 0; c < d; ++c) {
        double lo = data.features.at(rows[0], c), hi = lo;
        for (int r : rows) {
            double v = data.features.at(r, c);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        p.col_min[c] = lo;
        p.col_max[c] = hi;
    }
    return p;
}

Dataset apply_scaling(const Dataset& data, const ScalingParams& params) {
    Dataset out = data;
    const std::size_t d = data.dim();
    for (std::size_t r = 0; r < data.size(); ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            double lo = params.col_min[c], hi = params.col_max[c];
            double v = out.features.at(r, c);
            out.features.at(r, c) = (hi > lo) ? 2.0 * (v - lo) / (hi - lo) - 1.0 : 0.0;
        }
    }
    return out;
}

std::vector<int> stratified_assignment(std::span<const int> labels, int n_classes, int k,
                                       std::uint64_t seed) {
    if (k < 2) throw DataError("fold count must be at least 2");
    if (static_cast<std::size_t>(k) > labels.size()) {
        throw DataError("fold count exceeds number of examples");
    }
    std::vector<std::vector<int>> by_class(n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        by_class[labels[i]].push_back(static_cast<int>(i));
    }
    std::vector<int> assignment(labels.size(), -1);
    // Rotating start fold keeps global fold sizes within one of each other
    // even though classes are dealt independently.
    int start = 0;
    for (int c = 0; c < n_classes; ++c) {
        auto& rows = by_class[c];
        Rng rng(derive_seed(seed, {0x5f01dULL, static_cast<std::uint64_t>(c)}));
        rng.shuffle(rows);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            assignment[rows[i]] = (start + static_cast<int>(i)) % k;
        }
        start = (start + static_cast<int>(rows.size())) % k;
    }
    return assignment;
}

FoldPlan stratified_kfold(const Dataset& data, int k, std::uint64_t seed) {
    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignment = stratified_assignment(data.labels, data.n_classes, k, seed);
    return plan;
}

TwoClassView TwoClassView::subset(std::span<const int> keep) const {
    TwoClassView v;
    v.data = data;
    v.pos_class = pos_class;
    v.neg_class = neg_class;
    v.rows.reserve(keep.size());
    v.y.reserve(keep.size());
    for (int i : keep) {
        v.rows.push_back(rows[i]);
        v.y.push_back(y[i]);
    }
    return v;
}

TwoClassView pair_subset(const Dataset& data, int class_a, int class_b) {
    if (class_a == class_b) throw DataError("pair_subset: identical classes");
    if (class_a < 0 || class_a >= data.n_classes || class_b < 0 || class_b >= data.n_classes) {
        throw DataError("pair_subset: class index out of range");
    }
    TwoClassView v;
    v.data = &data;
    v.pos_class = class_a;
    v.neg_class = class_b;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.labels[i] == class_a) {
            v.rows.push_back(static_cast<int>(i));
            v.y.push_back(1);
        } else if (data.labels[i] == class_b) {
            v.rows.push_back(static_cast<int>(i));
            v.y.push_back(-1);
        }
    }
    return v;
}

Dataset sub_dataset(const Dataset& data, std::span<const int> rows) {
    Dataset out;
    out.n_classes = data.n_classes;
    out.class_names = data.class_names;
    out.features = Matrix(0, 0);
    for (int r : rows) {
        out.features.push_row(data.row(r));
        out.labels.push_back(data.labels[r]);
    }
    return out;
}

}  // namespace ovo
