#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ovo {

// Bad or missing input data (CSV files, degenerate label sets, ...).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid configuration (schema violations, bad parameter combinations).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unordered pair of class indices, normalized so that a < b.
struct ClassPair {
    int a = 0;
    int b = 0;

    ClassPair() = default;
    ClassPair(int x, int y) : a(x < y ? x : y), b(x < y ? y : x) {}

    friend bool operator==(const ClassPair&, const ClassPair&) = default;
    friend auto operator<=>(const ClassPair&, const ClassPair&) = default;
};

// Dense index of pair (a,b), a < b, among the n(n-1)/2 pairs of n classes.
inline int pair_index(ClassPair p, int n_classes) {
    return p.a * (2 * n_classes - p.a - 1) / 2 + (p.b - p.a - 1);
}

inline int pair_count(int n_classes) { return n_classes * (n_classes - 1) / 2; }

// All pairs of [0, n) in lexicographic order; position == pair_index.
std::vector<ClassPair> all_pairs(int n_classes);

// Minimal row-major matrix of doubles.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }

    void push_row(std::span<const double> values);

    friend bool operator==(const Matrix&, const Matrix&) = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// splitmix64. Portable deterministic stream; every seed-dependent choice in
// the library goes through this so results do not depend on the standard
// library's RNG internals.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() { return splitmix64(state_); }

    // Uniform in [0, n). n must be positive.
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

  private:
    std::uint64_t state_;
};

// Derives an independent seed from a base seed and a salt sequence.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> salts);

}  // namespace ovo
