#include "ovo/matching.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <limits>

namespace ovo {

namespace {

constexpr double kTieTolerance = 1e-9;

std::atomic<bool> g_matching_debug{false};

// ---------------------------------------------------------------------------
// Maximum-weight matching on general graphs (primal-dual with blossoms),
// a port of van Rantwijk's reference implementation. Run with integer-valued
// weights: every intermediate quantity is then a small dyadic rational and
// double arithmetic stays exact, so no epsilon comparisons are needed.
// Always in max-cardinality mode, which on a complete even graph yields a
// perfect matching.
// ---------------------------------------------------------------------------
class MaxWeightMatcher {
  public:
    MaxWeightMatcher(int nvertex, std::vector<std::array<int, 2>> edge_ends,
                     std::vector<double> edge_weight)
        : nv_(nvertex), ends_(std::move(edge_ends)), wt_(std::move(edge_weight)) {
        ne_ = static_cast<int>(ends_.size());
        maxweight_ = 0.0;
        for (double w : wt_) maxweight_ = std::max(maxweight_, w);

        endpoint_.resize(2 * ne_);
        for (int p = 0; p < 2 * ne_; ++p) endpoint_[p] = ends_[p / 2][p % 2];
        neighbend_.assign(nv_, {});
        for (int k = 0; k < ne_; ++k) {
            neighbend_[ends_[k][0]].push_back(2 * k + 1);
            neighbend_[ends_[k][1]].push_back(2 * k);
        }

        mate_.assign(nv_, -1);
        label_.assign(2 * nv_, 0);
        labelend_.assign(2 * nv_, -1);
        inblossom_.resize(nv_);
        for (int v = 0; v < nv_; ++v) inblossom_[v] = v;
        blossomparent_.assign(2 * nv_, -1);
        blossomchilds_.assign(2 * nv_, {});
        blossombase_.resize(2 * nv_);
        for (int v = 0; v < nv_; ++v) blossombase_[v] = v;
        for (int b = nv_; b < 2 * nv_; ++b) blossombase_[b] = -1;
        blossomendps_.assign(2 * nv_, {});
        bestedge_.assign(2 * nv_, -1);
        blossombestedges_.assign(2 * nv_, {});
        for (int b = 2 * nv_ - 1; b >= nv_; --b) unusedblossoms_.push_back(b);
        dualvar_.assign(2 * nv_, 0.0);
        for (int v = 0; v < nv_; ++v) dualvar_[v] = maxweight_;
        allowedge_.assign(ne_, false);
    }

    // mate by vertex (or -1 for unmatched).
    std::vector<int> solve() {
        for (int stage = 0; stage < nv_; ++stage) {
            std::fill(label_.begin(), label_.end(), 0);
            std::fill(bestedge_.begin(), bestedge_.end(), -1);
            for (int b = nv_; b < 2 * nv_; ++b) blossombestedges_[b].clear();
            std::fill(allowedge_.begin(), allowedge_.end(), false);
            queue_.clear();

            for (int v = 0; v < nv_; ++v) {
                if (mate_[v] == -1 && label_[inblossom_[v]] == 0) assign_label(v, 1, -1);
            }

            bool augmented = false;
            while (true) {
                while (!queue_.empty() && !augmented) {
                    int v = queue_.back();
                    queue_.pop_back();
                    for (int p : neighbend_[v]) {
                        int k = p / 2;
                        int w = endpoint_[p];
                        if (inblossom_[v] == inblossom_[w]) continue;
                        if (!allowedge_[k]) {
                            double kslack = slack(k);
                            if (kslack <= 0.0) {
                                allowedge_[k] = true;
                            } else if (label_[inblossom_[w]] == 1) {
                                int b = inblossom_[v];
                                if (bestedge_[b] == -1 || kslack < slack(bestedge_[b])) {
                                    bestedge_[b] = k;
                                }
                            } else if (label_[w] == 0) {
                                if (bestedge_[w] == -1 || kslack < slack(bestedge_[w])) {
                                    bestedge_[w] = k;
                                }
                            }
                        }
                        if (allowedge_[k]) {
                            if (label_[inblossom_[w]] == 0) {
                                assign_label(w, 2, p ^ 1);
                            } else if (label_[inblossom_[w]] == 1) {
                                int base = scan_blossom(v, w);
                                if (base >= 0) {
                                    add_blossom(base, k);
                                } else {
                                    augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if (label_[w] == 0) {
                                label_[w] = 2;
                                labelend_[w] = p ^ 1;
                            }
                        }
                    }
                }
                if (augmented) break;

                int deltatype = -1;
                double delta = 0.0;
                int deltaedge = -1, deltablossom = -1;
                for (int v = 0; v < nv_; ++v) {
                    if (label_[inblossom_[v]] == 0 && bestedge_[v] != -1) {
                        double d = slack(bestedge_[v]);
                        if (deltatype == -1 || d < delta) {
                            delta = d;
                            deltatype = 2;
                            deltaedge = bestedge_[v];
                        }
                    }
                }
                for (int b = 0; b < 2 * nv_; ++b) {
                    if (blossomparent_[b] == -1 && label_[b] == 1 && bestedge_[b] != -1) {
                        double d = slack(bestedge_[b]) / 2.0;
                        if (deltatype == -1 || d < delta) {
                            delta = d;
                            deltatype = 3;
                            deltaedge = bestedge_[b];
                        }
                    }
                }
                for (int b = nv_; b < 2 * nv_; ++b) {
                    if (blossombase_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == 2 &&
                        (deltatype == -1 || dualvar_[b] < delta)) {
                        delta = dualvar_[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if (deltatype == -1) {
                    // Max-cardinality optimum reached; final update keeps
                    // duals feasible.
                    deltatype = 1;
                    double dmin = dualvar_[0];
                    for (int v = 1; v < nv_; ++v) dmin = std::min(dmin, dualvar_[v]);
                    delta = std::max(0.0, dmin);
                }

                for (int v = 0; v < nv_; ++v) {
                    if (label_[inblossom_[v]] == 1) {
                        dualvar_[v] -= delta;
                    } else if (label_[inblossom_[v]] == 2) {
                        dualvar_[v] += delta;
                    }
                }
                for (int b = nv_; b < 2 * nv_; ++b) {
                    if (blossombase_[b] >= 0 && blossomparent_[b] == -1) {
                        if (label_[b] == 1) {
                            dualvar_[b] += delta;
                        } else if (label_[b] == 2) {
                            dualvar_[b] -= delta;
                        }
                    }
                }

                if (deltatype == 1) break;
                if (deltatype == 2) {
                    allowedge_[deltaedge] = true;
                    int i = ends_[deltaedge][0];
                    if (label_[inblossom_[i]] == 0) i = ends_[deltaedge][1];
                    queue_.push_back(i);
                } else if (deltatype == 3) {
                    allowedge_[deltaedge] = true;
                    queue_.push_back(ends_[deltaedge][0]);
                } else if (deltatype == 4) {
                    expand_blossom(deltablossom, false);
                }
            }

            if (!augmented) break;

            for (int b = nv_; b < 2 * nv_; ++b) {
                if (blossomparent_[b] == -1 && blossombase_[b] >= 0 && label_[b] == 1 &&
                    dualvar_[b] == 0.0) {
                    expand_blossom(b, true);
                }
            }
        }

        std::vector<int> result(nv_, -1);
        for (int v = 0; v < nv_; ++v) {
            if (mate_[v] >= 0) result[v] = endpoint_[mate_[v]];
        }
        if (g_matching_debug.load()) {
            int blossoms = 0;
            for (int b = nv_; b < 2 * nv_; ++b) {
                if (blossombase_[b] >= 0) ++blossoms;
            }
            std::fprintf(stderr, "[matching] n=%d live_blossoms=%d duals:", nv_, blossoms);
            for (int v = 0; v < nv_; ++v) std::fprintf(stderr, " %g", dualvar_[v]);
            std::fprintf(stderr, "\n[matching] mate:");
            for (int v = 0; v < nv_; ++v) std::fprintf(stderr, " %d", result[v]);
            std::fprintf(stderr, "\n");
        }
        return result;
    }

  private:
    double slack(int k) const {
        return dualvar_[ends_[k][0]] + dualvar_[ends_[k][1]] - 2.0 * wt_[k];
    }

    void blossom_leaves(int b, std::vector<int>& out) const {
        if (b < nv_) {
            out.push_back(b);
        } else {
            for (int t : blossomchilds_[b]) blossom_leaves(t, out);
        }
    }

    void assign_label(int w, int t, int p) {
        int b = inblossom_[w];
        label_[w] = label_[b] = t;
        labelend_[w] = labelend_[b] = p;
        bestedge_[w] = bestedge_[b] = -1;
        if (t == 1) {
            std::vector<int> leaves;
            blossom_leaves(b, leaves);
            queue_.insert(queue_.end(), leaves.begin(), leaves.end());
        } else if (t == 2) {
            int base = blossombase_[b];
            assign_label(endpoint_[mate_[base]], 1, mate_[base] ^ 1);
        }
    }

    // Trace back from v and w to find a common ancestor (new blossom base)
    // or -1 when the paths hit different roots (augmenting path found).
    int scan_blossom(int v, int w) {
        std::vector<int> path;
        int base = -1;
        while (v != -1 || w != -1) {
            int b = inblossom_[v];
            if (label_[b] & 4) {
                base = blossombase_[b];
                break;
            }
            path.push_back(b);
            label_[b] = 5;
            if (labelend_[b] == -1) {
                v = -1;
            } else {
                v = endpoint_[labelend_[b]];
                b = inblossom_[v];
                v = endpoint_[labelend_[b]];
            }
            if (w != -1) std::swap(v, w);
        }
        for (int b : path) label_[b] = 1;
        return base;
    }

    void add_blossom(int base, int k) {
        int v = ends_[k][0], w = ends_[k][1];
        int bb = inblossom_[base];
        int bv = inblossom_[v];
        int bw = inblossom_[w];
        int b = unusedblossoms_.back();
        unusedblossoms_.pop_back();
        blossombase_[b] = base;
        blossomparent_[b] = -1;
        blossomparent_[bb] = b;

        std::vector<int> path;
        std::vector<int> endps;
        while (bv != bb) {
            blossomparent_[bv] = b;
            path.push_back(bv);
            endps.push_back(labelend_[bv]);
            v = endpoint_[labelend_[bv]];
            bv = inblossom_[v];
        }
        path.push_back(bb);
        std::reverse(path.begin(), path.end());
        std::reverse(endps.begin(), endps.end());
        endps.push_back(2 * k);
        while (bw != bb) {
            blossomparent_[bw] = b;
            path.push_back(bw);
            endps.push_back(labelend_[bw] ^ 1);
            w = endpoint_[labelend_[bw]];
            bw = inblossom_[w];
        }
        blossomchilds_[b] = path;
        blossomendps_[b] = endps;
        label_[b] = 1;
        labelend_[b] = labelend_[bb];
        dualvar_[b] = 0.0;

        std::vector<int> leaves;
        blossom_leaves(b, leaves);
        for (int leaf : leaves) {
            if (label_[inblossom_[leaf]] == 2) queue_.push_back(leaf);
            inblossom_[leaf] = b;
        }

        std::vector<int> bestedgeto(2 * nv_, -1);
        for (int child : path) {
            std::vector<std::vector<int>> nblists;
            if (blossombestedges_[child].empty()) {
                std::vector<int> child_leaves;
                blossom_leaves(child, child_leaves);
                for (int leaf : child_leaves) {
                    std::vector<int> lst;
                    lst.reserve(neighbend_[leaf].size());
                    for (int p : neighbend_[leaf]) lst.push_back(p / 2);
                    nblists.push_back(std::move(lst));
                }
            } else {
                nblists.push_back(blossombestedges_[child]);
            }
            for (const auto& nblist : nblists) {
                for (int e : nblist) {
                    int i = ends_[e][0], j = ends_[e][1];
                    if (inblossom_[j] == b) std::swap(i, j);
                    int bj = inblossom_[j];
                    if (bj != b && label_[bj] == 1 &&
                        (bestedgeto[bj] == -1 || slack(e) < slack(bestedgeto[bj]))) {
                        bestedgeto[bj] = e;
                    }
                }
            }
            blossombestedges_[child].clear();
            bestedge_[child] = -1;
        }
        blossombestedges_[b].clear();
        for (int e : bestedgeto) {
            if (e != -1) blossombestedges_[b].push_back(e);
        }
        bestedge_[b] = -1;
        for (int e : blossombestedges_[b]) {
            if (bestedge_[b] == -1 || slack(e) < slack(bestedge_[b])) bestedge_[b] = e;
        }
    }

    void expand_blossom(int b, bool endstage) {
        for (int s : blossomchilds_[b]) {
            blossomparent_[s] = -1;
            if (s < nv_) {
                inblossom_[s] = s;
            } else if (endstage && dualvar_[s] == 0.0) {
                expand_blossom(s, endstage);
            } else {
                std::vector<int> leaves;
                blossom_leaves(s, leaves);
                for (int leaf : leaves) inblossom_[leaf] = s;
            }
        }
        if (!endstage && label_[b] == 2) {
            int entrychild = inblossom_[endpoint_[labelend_[b] ^ 1]];
            int j = static_cast<int>(std::find(blossomchilds_[b].begin(), blossomchilds_[b].end(),
                                               entrychild) -
                                     blossomchilds_[b].begin());
            int jstep, endptrick;
            if (j & 1) {
                j -= static_cast<int>(blossomchilds_[b].size());
                jstep = 1;
                endptrick = 0;
            } else {
                jstep = -1;
                endptrick = 1;
            }
            int p = labelend_[b];
            const int nchild = static_cast<int>(blossomchilds_[b].size());
            auto child_at = [&](int idx) {
                return blossomchilds_[b][(idx % nchild + nchild) % nchild];
            };
            auto endp_at = [&](int idx) {
                return blossomendps_[b][(idx % nchild + nchild) % nchild];
            };
            while (j != 0) {
                label_[endpoint_[p ^ 1]] = 0;
                label_[endpoint_[endp_at(j - endptrick) ^ endptrick ^ 1]] = 0;
                assign_label(endpoint_[p ^ 1], 2, p);
                allowedge_[endp_at(j - endptrick) / 2] = true;
                j += jstep;
                p = endp_at(j - endptrick) ^ endptrick;
                allowedge_[p / 2] = true;
                j += jstep;
            }
            int bv = child_at(j);
            label_[endpoint_[p ^ 1]] = label_[bv] = 2;
            labelend_[endpoint_[p ^ 1]] = labelend_[bv] = p;
            bestedge_[bv] = -1;
            j += jstep;
            while (child_at(j) != entrychild) {
                bv = child_at(j);
                if (label_[bv] == 1) {
                    j += jstep;
                    continue;
                }
                std::vector<int> leaves;
                blossom_leaves(bv, leaves);
                int labeled = -1;
                for (int leaf : leaves) {
                    if (label_[leaf] != 0) {
                        labeled = leaf;
                        break;
                    }
                }
                if (labeled >= 0) {
                    label_[labeled] = 0;
                    label_[endpoint_[mate_[blossombase_[bv]]]] = 0;
                    assign_label(labeled, 2, labelend_[labeled]);
                }
                j += jstep;
            }
        }
        label_[b] = -1;
        labelend_[b] = -1;
        blossomchilds_[b].clear();
        blossomendps_[b].clear();
        blossombase_[b] = -1;
        blossombestedges_[b].clear();
        bestedge_[b] = -1;
        unusedblossoms_.push_back(b);
    }

    void augment_blossom(int b, int v) {
        int t = v;
        while (blossomparent_[t] != b) t = blossomparent_[t];
        if (t >= nv_) augment_blossom(t, v);

        const int nchild = static_cast<int>(blossomchilds_[b].size());
        auto child_at = [&](int idx) {
            return blossomchilds_[b][(idx % nchild + nchild) % nchild];
        };
        auto endp_at = [&](int idx) {
            return blossomendps_[b][(idx % nchild + nchild) % nchild];
        };
        int i = static_cast<int>(std::find(blossomchilds_[b].begin(), blossomchilds_[b].end(), t) -
                                 blossomchilds_[b].begin());
        int j = i;
        int jstep, endptrick;
        if (i & 1) {
            j -= nchild;
            jstep = 1;
            endptrick = 0;
        } else {
            jstep = -1;
            endptrick = 1;
        }
        while (j != 0) {
            j += jstep;
            t = child_at(j);
            int p = endp_at(j - endptrick) ^ endptrick;
            if (t >= nv_) augment_blossom(t, endpoint_[p]);
            j += jstep;
            t = child_at(j);
            if (t >= nv_) augment_blossom(t, endpoint_[p ^ 1]);
            mate_[endpoint_[p]] = p ^ 1;
            mate_[endpoint_[p ^ 1]] = p;
        }
        std::rotate(blossomchilds_[b].begin(), blossomchilds_[b].begin() + i,
                    blossomchilds_[b].end());
        std::rotate(blossomendps_[b].begin(), blossomendps_[b].begin() + i,
                    blossomendps_[b].end());
        blossombase_[b] = blossombase_[blossomchilds_[b][0]];
        assert(blossombase_[b] == v);
    }

    void augment_matching(int k) {
        for (int side = 0; side < 2; ++side) {
            int s = ends_[k][side];
            int p = 2 * k + 1 - side;
            while (true) {
                int bs = inblossom_[s];
                if (bs >= nv_) augment_blossom(bs, s);
                mate_[s] = p;
                if (labelend_[bs] == -1) break;
                int t = endpoint_[labelend_[bs]];
                int bt = inblossom_[t];
                s = endpoint_[labelend_[bt]];
                int j = endpoint_[labelend_[bt] ^ 1];
                if (bt >= nv_) augment_blossom(bt, j);
                mate_[j] = labelend_[bt];
                p = labelend_[bt] ^ 1;
            }
        }
    }

    int nv_ = 0;
    int ne_ = 0;
    std::vector<std::array<int, 2>> ends_;
    std::vector<double> wt_;
    double maxweight_ = 0.0;

    std::vector<int> endpoint_;
    std::vector<std::vector<int>> neighbend_;
    std::vector<int> mate_;
    std::vector<int> label_;
    std::vector<int> labelend_;
    std::vector<int> inblossom_;
    std::vector<int> blossomparent_;
    std::vector<std::vector<int>> blossomchilds_;
    std::vector<int> blossombase_;
    std::vector<std::vector<int>> blossomendps_;
    std::vector<int> bestedge_;
    std::vector<std::vector<int>> blossombestedges_;
    std::vector<int> unusedblossoms_;
    std::vector<double> dualvar_;
    std::vector<bool> allowedge_;
    std::vector<int> queue_;
};

// Minimum-weight perfect matching over positions [0, m). Weights indexed
// positionally; returns mate-by-position. Weights are snapped to an integer
// grid (relative resolution 2^-38) so the blossom arithmetic is exact.
std::vector<int> solve_positions(int m, const std::function<double(int, int)>& weight) {
    double wmax = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) wmax = std::max(wmax, weight(i, j));
    }
    const double scale = wmax > 0.0 ? static_cast<double>(1LL << 38) / wmax : 1.0;

    std::vector<std::array<int, 2>> ends;
    std::vector<double> wts;
    ends.reserve(m * (m - 1) / 2);
    wts.reserve(m * (m - 1) / 2);
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            ends.push_back({i, j});
            // Negated: maximum-weight max-cardinality == minimum-weight
            // perfect on a complete even graph. x4 keeps the repeated
            // halvings in the dual updates on the dyadic grid.
            wts.push_back(-4.0 * std::round(weight(i, j) * scale));
        }
    }
    MaxWeightMatcher matcher(m, std::move(ends), std::move(wts));
    std::vector<int> mate = matcher.solve();
    for (int v = 0; v < m; ++v) {
        if (mate[v] < 0) throw DataError("matching: no perfect matching found");
    }
    return mate;
}

double position_weight(const MatchingProblem& p, int i, int j) {
    const int n = static_cast<int>(p.real_count());
    if (i == j) return 0.0;
    if (i >= n || j >= n) return 0.0;  // dummy edges are free
    return p.weights.at(i, j);
}

// Sum in sorted-pair order so solver and oracle agree bit-for-bit.
double total_of(const MatchingProblem& p, const std::vector<std::pair<int, int>>& pos_pairs) {
    double total = 0.0;
    for (auto [i, j] : pos_pairs) total += position_weight(p, i, j);
    return total;
}

PairingResult finalize(const MatchingProblem& p, std::vector<std::pair<int, int>> pos_pairs) {
    std::sort(pos_pairs.begin(), pos_pairs.end());
    const int n = static_cast<int>(p.real_count());
    PairingResult result;
    for (auto [i, j] : pos_pairs) {
        if (j >= n) {
            result.bye = p.nodes[i];
        } else {
            result.pairs.emplace_back(p.nodes[i], p.nodes[j]);
            result.total_weight += p.weights.at(i, j);
        }
    }
    std::sort(result.pairs.begin(), result.pairs.end());
    return result;
}

void validate(const MatchingProblem& p) {
    const std::size_t n = p.real_count();
    if (p.weights.rows() != n || p.weights.cols() != n) {
        throw DataError("matching: weight matrix does not cover all node pairs");
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double w = p.weights.at(i, j);
            if (!(w >= 0.0)) throw DataError("matching: negative or NaN weight");
            if (w != p.weights.at(j, i)) throw DataError("matching: asymmetric weights");
        }
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (p.nodes[i] <= p.nodes[i - 1]) {
            throw DataError("matching: nodes must be strictly increasing");
        }
    }
}

}  // namespace

MatchingProblem MatchingProblem::complete(std::span<const int> nodes,
                                          const std::function<double(int, int)>& weight) {
    MatchingProblem p;
    p.nodes.assign(nodes.begin(), nodes.end());
    std::sort(p.nodes.begin(), p.nodes.end());
    const std::size_t n = p.nodes.size();
    p.weights = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double w = weight(p.nodes[i], p.nodes[j]);
            p.weights.at(i, j) = w;
            p.weights.at(j, i) = w;
        }
    }
    validate(p);
    return p;
}

MatchingProblem pad_odd(const MatchingProblem& p) {
    if (p.has_dummy) throw DataError("pad_odd: problem already padded");
    if (p.real_count() % 2 == 0) throw DataError("pad_odd: node count is even");
    MatchingProblem out = p;
    out.has_dummy = true;
    return out;
}

void set_matching_debug(bool enabled) { g_matching_debug.store(enabled); }

PairingResult min_weight_perfect_matching(const MatchingProblem& p) {
    validate(p);
    const int m = static_cast<int>(p.position_count());
    if (m < 2) throw DataError("matching: need at least 2 nodes");
    if (m % 2 != 0) throw DataError("matching: odd node count (pad_odd first)");

    auto poswt = [&](int i, int j) { return position_weight(p, i, j); };

    std::vector<int> mate = solve_positions(m, poswt);
    std::vector<std::pair<int, int>> opt;
    for (int v = 0; v < m; ++v) {
        if (mate[v] > v) opt.emplace_back(v, mate[v]);
    }
    std::sort(opt.begin(), opt.end());
    const double best_total = total_of(p, opt);

    // Lexicographic tie rule: fix pairs greedily (smallest unmatched node,
    // partners ascending, dummy last), keeping every prefix extendable to a
    // matching within tolerance of the optimum.
    std::vector<std::pair<int, int>> fixed;
    std::vector<int> remaining(m);
    for (int i = 0; i < m; ++i) remaining[i] = i;
    double fixed_cost = 0.0;

    while (!remaining.empty()) {
        const int u = remaining.front();
        bool placed = false;
        for (std::size_t vi = 1; vi < remaining.size() && !placed; ++vi) {
            const int v = remaining[vi];
            const double edge = poswt(u, v);
            double rest = 0.0;
            if (remaining.size() > 2) {
                std::vector<int> reduced;
                reduced.reserve(remaining.size() - 2);
                for (int r : remaining) {
                    if (r != u && r != v) reduced.push_back(r);
                }
                auto sub_wt = [&](int a, int b) { return poswt(reduced[a], reduced[b]); };
                std::vector<int> sub_mate = solve_positions(static_cast<int>(reduced.size()), sub_wt);
                std::vector<std::pair<int, int>> sub_pairs;
                for (int a = 0; a < static_cast<int>(reduced.size()); ++a) {
                    if (sub_mate[a] > a) sub_pairs.emplace_back(reduced[a], reduced[sub_mate[a]]);
                }
                std::sort(sub_pairs.begin(), sub_pairs.end());
                rest = total_of(p, sub_pairs);
            }
            if (fixed_cost + edge + rest <= best_total + kTieTolerance) {
                fixed.emplace_back(u, v);
                fixed_cost += edge;
                std::vector<int> next;
                next.reserve(remaining.size() - 2);
                for (int r : remaining) {
                    if (r != u && r != v) next.push_back(r);
                }
                remaining = std::move(next);
                placed = true;
            }
        }
        if (!placed) throw DataError("matching: tie-break fixing failed");
    }

    return finalize(p, std::move(fixed));
}

namespace {

// First complete matching found by lexicographic DFS whose total is within
// tolerance of min_total; DFS order makes it the lexicographically smallest.
bool lex_dfs(const MatchingProblem& p, std::vector<int>& remaining, double acc, double budget,
             std::vector<std::pair<int, int>>& chosen) {
    if (remaining.empty()) return true;
    const int u = remaining.front();
    for (std::size_t vi = 1; vi < remaining.size(); ++vi) {
        const int v = remaining[vi];
        const double edge = position_weight(p, u, v);
        if (acc + edge > budget) continue;
        std::vector<int> reduced;
        reduced.reserve(remaining.size() - 2);
        for (int r : remaining) {
            if (r != u && r != v) reduced.push_back(r);
        }
        chosen.emplace_back(u, v);
        if (lex_dfs(p, reduced, acc + edge, budget, chosen)) return true;
        chosen.pop_back();
    }
    return false;
}

double min_total_exhaustive(const MatchingProblem& p, std::vector<int>& remaining, double acc,
                            double best) {
    if (remaining.empty()) return std::min(best, acc);
    const int u = remaining.front();
    for (std::size_t vi = 1; vi < remaining.size(); ++vi) {
        const int v = remaining[vi];
        const double edge = position_weight(p, u, v);
        if (acc + edge >= best) continue;
        std::vector<int> reduced;
        reduced.reserve(remaining.size() - 2);
        for (int r : remaining) {
            if (r != u && r != v) reduced.push_back(r);
        }
        best = min_total_exhaustive(p, reduced, acc + edge, best);
    }
    return best;
}

}  // namespace

PairingResult brute_force_matching(const MatchingProblem& p) {
    validate(p);
    if (p.real_count() > 12) throw DataError("brute_force_matching: more than 12 nodes");
    const int m = static_cast<int>(p.position_count());
    if (m < 2) throw DataError("matching: need at least 2 nodes");
    if (m % 2 != 0) throw DataError("matching: odd node count (pad_odd first)");

    std::vector<int> remaining(m);
    for (int i = 0; i < m; ++i) remaining[i] = i;
    const double min_total =
        min_total_exhaustive(p, remaining, 0.0, std::numeric_limits<double>::infinity());

    std::vector<std::pair<int, int>> chosen;
    bool found = lex_dfs(p, remaining, 0.0, min_total + kTieTolerance, chosen);
    assert(found);
    (void)found;
    return finalize(p, std::move(chosen));
}

}  // namespace ovo
