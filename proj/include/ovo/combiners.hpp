#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ovo/ensemble.hpp"

namespace ovo {

// Per-example memo of pair winners. Cleared (or rebuilt) per test example;
// never shared across examples.
class DecisionCache {
  public:
    explicit DecisionCache(int n_classes) : winner_(pair_count(n_classes), -1) {}

    std::optional<int> lookup(ClassPair p, int n_classes) const {
        int w = winner_[pair_index(p, n_classes)];
        return w >= 0 ? std::optional<int>(w) : std::nullopt;
    }
    void store(ClassPair p, int n_classes, int winner) {
        winner_[pair_index(p, n_classes)] = winner;
    }

  private:
    std::vector<int> winner_;
};

// Outcome of one combiner run on one example.
struct Verdict {
    int predicted = -1;
    int evaluations = 0;  // distinct binary decisions computed (cache hits excluded)
    std::vector<std::pair<ClassPair, int>> trace;  // applied (pair, winner), in order
    std::optional<std::vector<int>> votes;         // Max Wins / VCF only
    bool tie_fallback = false;  // WE exhausted a restricted candidate list
    std::int64_t elapsed_ns = 0;                   // filled by predict()
};

// Class-sequence policy for the order-sensitive DAG methods.
struct OrderPolicy {
    enum class Kind { SeededRandom, Explicit };

    Kind kind = Kind::SeededRandom;
    std::uint64_t seed = 0;
    std::vector<int> explicit_order;

    static OrderPolicy random(std::uint64_t seed) {
        OrderPolicy p;
        p.seed = seed;
        return p;
    }
    static OrderPolicy sequence(std::vector<int> order) {
        OrderPolicy p;
        p.kind = Kind::Explicit;
        p.explicit_order = std::move(order);
        return p;
    }

    // Concrete class sequence for an n-class problem.
    std::vector<int> realize(int n_classes) const;
};

// Every pair votes; argmax wins, vote ties broken by a uniform draw under
// seed. Always n(n-1)/2 evaluations.
Verdict max_wins(const PairwiseEnsemble& e, std::span<const double> x, std::uint64_t seed);

// Eliminates the loser of (first, last) of the candidate sequence until one
// class remains. Exactly n-1 evaluations.
Verdict ddag(const PairwiseEnsemble& e, std::span<const double> x, const OrderPolicy& order);

// Round-based tournament: adjacent pairs play, winners advance in order,
// an odd trailing class byes. Exactly n-1 evaluations.
Verdict adag(const PairwiseEnsemble& e, std::span<const double> x, const OrderPolicy& order);

// ADAG with each round's pairing chosen by minimum-weight perfect matching
// on generalization errors; the full-class top matching is reused from the
// ensemble across examples.
Verdict radag(const PairwiseEnsemble& e, std::span<const double> x);

// Walks classifiers ascending by generalization error, skipping any that
// touch a discarded class. Exactly n-1 evaluations.
Verdict se(const PairwiseEnsemble& e, std::span<const double> x);

// Walks the same list but skips a classifier only when both of its classes
// are discarded; between n-1 and n(n-1)/2 evaluations.
Verdict we(const PairwiseEnsemble& e, std::span<const double> x);

// WE restricted to a candidate subset, evaluating through an external cache
// (the VCF second phase). Candidate classes must be distinct and valid.
Verdict we(const PairwiseEnsemble& e, std::span<const double> x, std::span<const int> candidates,
           DecisionCache& cache);

// Full vote, then the filter dp_i = (s_top - s_i)*100/s_top <= threshold
// picks the candidate set; singleton decides directly, otherwise WE resolves
// over cached decisions. Always n(n-1)/2 evaluations.
Verdict vcf(const PairwiseEnsemble& e, std::span<const double> x, double threshold,
            std::uint64_t seed);

double vote_deficit_percent(int s_top, int s_i);

enum class CombinerKind { MaxWins, Ddag, Adag, Radag, Se, We, Vcf };

const char* combiner_name(CombinerKind kind);
std::optional<CombinerKind> combiner_from_name(const std::string& name);

struct PredictParams {
    std::uint64_t seed = 0;           // vote tie-breaks and seeded orders
    std::optional<OrderPolicy> order; // ddag/adag; defaults to random(seed)
    double vcf_threshold = 10.0;
};

// Uniform dispatch; fills Verdict::elapsed_ns from a monotonic clock.
// A one-class ensemble yields class 0 with an empty trace.
Verdict predict(const PairwiseEnsemble& e, std::span<const double> x, CombinerKind method,
                const PredictParams& params);

}  // namespace ovo
