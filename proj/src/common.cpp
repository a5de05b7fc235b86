#include "ovo/common.hpp"

#include <cassert>

namespace ovo {

std::vector<ClassPair> all_pairs(int n_classes) {
    std::vector<ClassPair> out;
    out.reserve(pair_count(n_classes));
    for (int a = 0; a < n_classes; ++a) {
        for (int b = a + 1; b < n_classes; ++b) {
            out.emplace_back(a, b);
        }
    }
    return out;
}

void Matrix::push_row(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) {
        cols_ = values.size();
    }
    assert(values.size() == cols_);
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> salts) {
    std::uint64_t state = base;
    splitmix64(state);
    for (std::uint64_t s : salts) {
        state ^= s + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
        splitmix64(state);
    }
    return state;
}

}  // namespace ovo
