#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ovo/common.hpp"

namespace ovo {

// Complete weighted graph over a set of class indices. Weights are
// non-negative and symmetric; the optional dummy node (used for odd
// candidate sets) connects to every real node with weight 0 and is not
// listed in `nodes`.
struct MatchingProblem {
    std::vector<int> nodes;  // strictly increasing class indices
    Matrix weights;          // by node position, symmetric, zero diagonal
    bool has_dummy = false;

    static MatchingProblem complete(std::span<const int> nodes,
                                    const std::function<double(int, int)>& weight);

    std::size_t real_count() const { return nodes.size(); }
    std::size_t position_count() const { return nodes.size() + (has_dummy ? 1 : 0); }
};

// A perfect matching: disjoint pairs covering every node, plus a bye node
// when the problem carries a dummy. pairs are sorted, each pair sorted.
struct PairingResult {
    std::vector<ClassPair> pairs;
    std::optional<int> bye;
    double total_weight = 0.0;
};

// Exact minimum-weight perfect matching (primal-dual blossom). Among
// equal-weight optima (total weights within 1e-9) returns the
// lexicographically smallest pair set.
PairingResult min_weight_perfect_matching(const MatchingProblem& p);

// Exhaustive oracle with identical tie semantics. Limited to 12 real nodes.
PairingResult brute_force_matching(const MatchingProblem& p);

// Adds the zero-weight dummy node to a problem with an odd node count; the
// dummy's partner in a solution becomes the bye.
MatchingProblem pad_odd(const MatchingProblem& p);

// When enabled, the solver dumps final duals and blossom counts to stderr.
void set_matching_debug(bool enabled);

}  // namespace ovo
