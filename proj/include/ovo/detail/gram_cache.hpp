#pragma once

#include <list>
#include <unordered_map>
#include <vector>

#include "ovo/dataset.hpp"
#include "ovo/svm.hpp"

namespace ovo::detail {

inline constexpr std::size_t kFullGramLimit = 4096;
inline constexpr std::size_t kRowCacheBytes = 64ull << 20;

// Gram matrix access for the solver: dense when the problem fits, LRU row
// cache above the limit.
class GramCache {
  public:
    GramCache(const TwoClassView& view, const KernelSpec& kernel,
              std::size_t full_limit = kFullGramLimit, std::size_t cache_bytes = kRowCacheBytes)
        : view_(view), kernel_(kernel), m_(view.size()) {
        if (m_ <= full_limit) {
            full_ = Matrix(m_, m_);
            for (std::size_t i = 0; i < m_; ++i) {
                for (std::size_t j = i; j < m_; ++j) {
                    double k = kernel_eval(kernel_, view_.x(i), view_.x(j));
                    full_.at(i, j) = k;
                    full_.at(j, i) = k;
                }
            }
        } else {
            capacity_ = std::max<std::size_t>(2, cache_bytes / (sizeof(double) * m_));
        }
    }

    std::span<const double> row(std::size_t i) {
        if (full_.rows() > 0) return full_.row(i);
        auto it = rows_.find(i);
        if (it != rows_.end()) {
            ++hits_;
            lru_.splice(lru_.begin(), lru_, it->second.second);
            return it->second.first;
        }
        ++misses_;
        if (rows_.size() >= capacity_) {
            std::size_t victim = lru_.back();
            lru_.pop_back();
            rows_.erase(victim);
            ++evictions_;
        }
        std::vector<double> r(m_);
        for (std::size_t j = 0; j < m_; ++j) {
            r[j] = kernel_eval(kernel_, view_.x(i), view_.x(j));
        }
        lru_.push_front(i);
        auto [pos, inserted] = rows_.emplace(i, std::make_pair(std::move(r), lru_.begin()));
        return pos->second.first;
    }

    bool dense() const { return full_.rows() > 0; }
    std::size_t capacity() const { return capacity_; }
    long hits() const { return hits_; }
    long misses() const { return misses_; }
    long evictions() const { return evictions_; }

  private:
    const TwoClassView& view_;
    const KernelSpec& kernel_;
    std::size_t m_;
    Matrix full_;
    std::size_t capacity_ = 0;
    long hits_ = 0;
    long misses_ = 0;
    long evictions_ = 0;
    std::list<std::size_t> lru_;
    std::unordered_map<std::size_t, std::pair<std::vector<double>, std::list<std::size_t>::iterator>>
        rows_;
};

}  // namespace ovo::detail
