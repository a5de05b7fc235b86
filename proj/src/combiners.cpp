#include "ovo/combiners.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace ovo {

std::vector<int> OrderPolicy::realize(int n_classes) const {
    if (kind == Kind::Explicit) {
        if (static_cast<int>(explicit_order.size()) != n_classes) {
            throw ConfigError("OrderPolicy: explicit order length does not match class count");
        }
        std::vector<bool> seen(n_classes, false);
        for (int c : explicit_order) {
            if (c < 0 || c >= n_classes || seen[c]) {
                throw ConfigError("OrderPolicy: explicit order is not a permutation");
            }
            seen[c] = true;
        }
        return explicit_order;
    }
    std::vector<int> order(n_classes);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);
    return order;
}

namespace {

// Per-call bookkeeping: applies classifiers through the cache, counting
// fresh evaluations and recording the trace.
struct Session {
    const PairwiseEnsemble& e;
    std::span<const double> x;
    DecisionCache& cache;
    Verdict& verdict;

    int apply(ClassPair p) {
        int w;
        if (auto cached = cache.lookup(p, e.n_classes())) {
            w = *cached;
        } else {
            w = e.decide_winner(p, x);
            cache.store(p, e.n_classes(), w);
            ++verdict.evaluations;
        }
        verdict.trace.emplace_back(p, w);
        return w;
    }
};

std::vector<int> run_vote(Session& s) {
    std::vector<int> votes(s.e.n_classes(), 0);
    for (ClassPair p : all_pairs(s.e.n_classes())) {
        ++votes[s.apply(p)];
    }
    return votes;
}

// The WE walk: treats every class outside `candidates` as already
// discarded. Shared verbatim by we() and the VCF second phase.
int weak_elimination(Session& s, std::span<const int> candidates) {
    const int n = s.e.n_classes();
    std::vector<bool> discarded(n, true);
    int alive = 0;
    for (int c : candidates) {
        if (c < 0 || c >= n || !discarded[c]) {
            throw ConfigError("we: invalid candidate set");
        }
        discarded[c] = false;
        ++alive;
    }
    for (ClassPair p : s.e.sorted_pairs()) {
        if (alive <= 1) break;
        if (discarded[p.a] && discarded[p.b]) continue;
        const int w = s.apply(p);
        const int loser = (w == p.a) ? p.b : p.a;
        if (!discarded[loser]) {
            discarded[loser] = true;
            --alive;
        }
    }
    if (alive > 1) {
        // Unreachable from a full candidate set; a restricted set falls back
        // to the highest win count seen in the trace.
        s.verdict.tie_fallback = true;
        std::vector<int> wins(n, 0);
        for (const auto& [p, w] : s.verdict.trace) ++wins[w];
        int best = -1;
        for (int c = 0; c < n; ++c) {
            if (!discarded[c] && (best < 0 || wins[c] > wins[best])) best = c;
        }
        return best;
    }
    for (int c = 0; c < n; ++c) {
        if (!discarded[c]) return c;
    }
    throw DataError("we: no candidate survived");
}

}  // namespace

Verdict max_wins(const PairwiseEnsemble& e, std::span<const double> x, std::uint64_t seed) {
    Verdict v;
    DecisionCache cache(e.n_classes());
    Session s{e, x, cache, v};
    std::vector<int> votes = run_vote(s);

    const int top = *std::max_element(votes.begin(), votes.end());
    std::vector<int> winners;
    for (int c = 0; c < e.n_classes(); ++c) {
        if (votes[c] == top) winners.push_back(c);
    }
    if (winners.size() == 1) {
        v.predicted = winners.front();
    } else {
        Rng rng(seed);
        v.predicted = winners[rng.below(winners.size())];
    }
    v.votes = std::move(votes);
    return v;
}

Verdict ddag(const PairwiseEnsemble& e, std::span<const double> x, const OrderPolicy& order) {
    Verdict v;
    DecisionCache cache(e.n_classes());
    Session s{e, x, cache, v};
    std::deque<int> candidates;
    for (int c : order.realize(e.n_classes())) candidates.push_back(c);
    while (candidates.size() > 1) {
        const int first = candidates.front();
        const int last = candidates.back();
        const int w = s.apply(ClassPair(first, last));
        if (w == first) {
            candidates.pop_back();
        } else {
            candidates.pop_front();
        }
    }
    v.predicted = candidates.front();
    return v;
}

Verdict adag(const PairwiseEnsemble& e, std::span<const double> x, const OrderPolicy& order) {
    Verdict v;
    DecisionCache cache(e.n_classes());
    Session s{e, x, cache, v};
    std::vector<int> current = order.realize(e.n_classes());
    while (current.size() > 1) {
        std::vector<int> next;
        std::size_t i = 0;
        for (; i + 1 < current.size(); i += 2) {
            next.push_back(s.apply(ClassPair(current[i], current[i + 1])));
        }
        if (i < current.size()) next.push_back(current[i]);  // odd trailing class byes
        current = std::move(next);
    }
    v.predicted = current.front();
    return v;
}

Verdict radag(const PairwiseEnsemble& e, std::span<const double> x) {
    Verdict v;
    DecisionCache cache(e.n_classes());
    Session s{e, x, cache, v};
    std::vector<int> candidates(e.n_classes());
    std::iota(candidates.begin(), candidates.end(), 0);

    bool top_level = true;
    while (candidates.size() > 1) {
        PairingResult level;
        if (top_level) {
            level = e.top_matching();
        } else {
            MatchingProblem problem = MatchingProblem::complete(
                candidates, [&](int a, int b) { return e.gen_error(ClassPair(a, b)); });
            if (candidates.size() % 2 != 0) problem = pad_odd(problem);
            level = min_weight_perfect_matching(problem);
        }
        top_level = false;

        std::vector<int> winners;
        for (ClassPair p : level.pairs) {
            winners.push_back(s.apply(p));
        }
        if (level.bye) winners.push_back(*level.bye);
        std::sort(winners.begin(), winners.end());
        candidates = std::move(winners);
    }
    v.predicted = candidates.front();
    return v;
}

Verdict se(const PairwiseEnsemble& e, std::span<const double> x) {
    Verdict v;
    DecisionCache cache(e.n_classes());
    Session s{e, x, cache, v};
    std::vector<bool> discarded(e.n_classes(), false);
    int alive = e.n_classes();
    for (ClassPair p : e.sorted_pairs()) {
        if (alive <= 1) break;
        if (discarded[p.a] || discarded[p.b]) continue;
        const int w = s.apply(p);
        const int loser = (w == p.a) ? p.b : p.a;
        discarded[loser] = true;
        --alive;
    }
    for (int c = 0; c < e.n_classes(); ++c) {
        if (!discarded[c]) {
            v.predicted = c;
            break;
        }
    }
    return v;
}

Verdict we(const PairwiseEnsemble& e, std::span<const double> x) {
    Verdict v;
    DecisionCache cache(e.n_classes());
    Session s{e, x, cache, v};
    std::vector<int> everyone(e.n_classes());
    std::iota(everyone.begin(), everyone.end(), 0);
    v.predicted = weak_elimination(s, everyone);
    return v;
}

Verdict we(const PairwiseEnsemble& e, std::span<const double> x, std::span<const int> candidates,
           DecisionCache& cache) {
    Verdict v;
    Session s{e, x, cache, v};
    v.predicted = weak_elimination(s, candidates);
    return v;
}

double vote_deficit_percent(int s_top, int s_i) {
    return static_cast<double>(s_top - s_i) * 100.0 / static_cast<double>(s_top);
}

Verdict vcf(const PairwiseEnsemble& e, std::span<const double> x, double threshold,
            std::uint64_t seed) {
    Verdict v;
    DecisionCache cache(e.n_classes());
    Session s{e, x, cache, v};
    std::vector<int> votes = run_vote(s);

    const int top = *std::max_element(votes.begin(), votes.end());
    std::vector<int> candidates;
    for (int c = 0; c < e.n_classes(); ++c) {
        if (vote_deficit_percent(top, votes[c]) <= threshold) candidates.push_back(c);
    }
    if (candidates.size() == 1) {
        v.predicted = candidates.front();
    } else {
        // Every pair is already cached, so this phase adds no evaluations.
        v.predicted = weak_elimination(s, candidates);
    }
    (void)seed;
    v.votes = std::move(votes);
    return v;
}

const char* combiner_name(CombinerKind kind) {
    switch (kind) {
        case CombinerKind::MaxWins: return "max_wins";
        case CombinerKind::Ddag: return "ddag";
        case CombinerKind::Adag: return "adag";
        case CombinerKind::Radag: return "radag";
        case CombinerKind::Se: return "se";
        case CombinerKind::We: return "we";
        case CombinerKind::Vcf: return "vcf";
    }
    return "?";
}

std::optional<CombinerKind> combiner_from_name(const std::string& name) {
    for (CombinerKind k : {CombinerKind::MaxWins, CombinerKind::Ddag, CombinerKind::Adag,
                           CombinerKind::Radag, CombinerKind::Se, CombinerKind::We,
                           CombinerKind::Vcf}) {
        if (name == combiner_name(k)) return k;
    }
    return std::nullopt;
}

Verdict predict(const PairwiseEnsemble& e, std::span<const double> x, CombinerKind method,
                const PredictParams& params) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    if (e.n_classes() <= 1) {
        v.predicted = 0;
    } else {
        switch (method) {
            case CombinerKind::MaxWins:
                v = max_wins(e, x, params.seed);
                break;
            case CombinerKind::Ddag:
                v = ddag(e, x, params.order ? *params.order : OrderPolicy::random(params.seed));
                break;
            case CombinerKind::Adag:
                v = adag(e, x, params.order ? *params.order : OrderPolicy::random(params.seed));
                break;
            case CombinerKind::Radag:
                v = radag(e, x);
                break;
            case CombinerKind::Se:
                v = se(e, x);
                break;
            case CombinerKind::We:
                v = we(e, x);
                break;
            case CombinerKind::Vcf:
                v = vcf(e, x, params.vcf_threshold, params.seed);
                break;
        }
    }
    v.elapsed_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    return v;
}

}  // namespace ovo
