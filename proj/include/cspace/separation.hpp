#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "cspace/contraction.hpp"
#include "cspace/gauge.hpp"
#include "cspace/graph.hpp"
#include "cspace/thin.hpp"

namespace cspace {

enum class Mode { THIN, QUAD };

inline std::string mode_name(Mode m) { return m == Mode::THIN ? "thin" : "quad"; }
inline Mode parse_mode(const std::string& s) {
    if (s == "thin") return Mode::THIN;
    if (s == "quad") return Mode::QUAD;
    throw std::invalid_argument("mode: want thin or quad, got '" + s + "'");
}

// The thin-long subsegment certifying that a pair is not anti-contracting.
struct SeparationWitness {
    int p = 0, q = 0;
    BallCenter midpoint;
    HalfInt radius{0};
    int x = 0, y = 0;  // the separated pair
};

// Shared caches for separation sweeps: per-triple minimal radii and
// per-(p,q) witness verdicts, reused across pair queries.
class WitnessTable {
  public:
    WitnessTable(const MetricGraph& g, const DistanceMatrix& D, ContractionGauge K, Mode mode)
        : g_(g), D_(D), K_(K), mode_(mode), td_(g, D) {}

    const MetricGraph& graph() const { return g_; }
    const DistanceMatrix& dist() const { return D_; }
    const ContractionGauge& gauge() const { return K_; }
    Mode mode() const { return mode_; }
    ThinDecider& thin_decider() { return td_; }

    // minimal witness radius of the aligned triple, capped; mode-dispatched
    std::optional<HalfInt> triple_r_min(int p, int q, const BallCenter& mid, HalfInt r_max) {
        const int64_t key = triple_key(p, q, mid);
        const int sh = shard(key);
        {
            std::lock_guard<std::mutex> lk(rmin_mx_[sh]);
            auto it = rmin_[sh].find(key);
            if (it != rmin_[sh].end()) {
                auto [searched, found] = it->second;
                if (found >= 0) return found <= r_max.doubled ? std::optional<HalfInt>(HalfInt(found)) : std::nullopt;
                if (searched >= r_max.doubled) return std::nullopt;
            }
        }
        std::optional<HalfInt> res = mode_ == Mode::THIN ? td_.min_thin_radius(p, q, mid, r_max)
                                                         : quad_r_min(p, q, mid, r_max);
        {
            std::lock_guard<std::mutex> lk(rmin_mx_[sh]);
            auto& slot = rmin_[sh][key];
            if (res)
                slot = {r_max.doubled, res->doubled};
            else
                slot = {std::max(slot.first, r_max.doubled), -1};
        }
        return res;
    }

    // does the pair (p,q) itself carry a witness subsegment (any midpoint)?
    bool pair_good(int p, int q) {
        const int len = D_.at(p, q);
        if (len < 1) return false;
        auto r_max = max_radius_for_length(K_, len);
        if (!r_max) return false;
        int a = std::min(p, q), b = std::max(p, q);
        const int64_t key = int64_t(a) * g_.n + b;
        const int sh = shard(key);
        {
            std::lock_guard<std::mutex> lk(good_mx_[sh]);
            auto it = good_[sh].find(key);
            if (it != good_[sh].end()) return it->second;
        }
        bool good = false;
        for (const BallCenter& mid : midpoints_of(g_, D_, p, q))
            if (triple_r_min(p, q, mid, *r_max)) {
                good = true;
                break;
            }
        {
            std::lock_guard<std::mutex> lk(good_mx_[sh]);
            good_[sh].emplace(key, good);
        }
        return good;
    }

    // Lexicographic witness search over aligned triples; first witness wins.
    std::optional<SeparationWitness> is_separated(int x, int y) {
        if (x == y) throw std::invalid_argument("is_separated: x and y must differ");
        std::vector<int> between = interval(D_, x, y);
        const uint16_t* rx = D_.row(x);
        const uint16_t* ry = D_.row(y);
        const int dxy = rx[y];
        for (int p : between) {
            for (int q : between) {
                if (p == q) continue;
                const int len = D_.at(p, q);
                if (int(rx[p]) + len + int(ry[q]) != dxy) continue;
                auto r_max = max_radius_for_length(K_, len);
                if (!r_max) continue;
                for (const BallCenter& mid : midpoints_of(g_, D_, p, q)) {
                    auto r = triple_r_min(p, q, mid, *r_max);
                    if (r) return SeparationWitness{p, q, mid, *r, x, y};
                }
            }
        }
        return std::nullopt;
    }

    // is there a witness at exactly radius r (used by structure audits)?
    bool separated_at_radius(int x, int y, HalfInt r) {
        if (x == y) throw std::invalid_argument("separated_at_radius: x and y must differ");
        auto kr = gauge_eval(K_, r);
        if (!kr) return false;
        std::vector<int> between = interval(D_, x, y);
        const uint16_t* rx = D_.row(x);
        const uint16_t* ry = D_.row(y);
        const int dxy = rx[y];
        for (int p : between)
            for (int q : between) {
                if (p == q) continue;
                const int len = D_.at(p, q);
                if (len < *kr) continue;
                if (int(rx[p]) + len + int(ry[q]) != dxy) continue;
                for (const BallCenter& mid : midpoints_of(g_, D_, p, q)) {
                    auto rm = triple_r_min(p, q, mid, r);
                    if (rm) return true;
                }
            }
        return false;
    }

    // QUAD-mode analogue of min_thin_radius: least r <= r_max such that some
    // concrete geodesic p -> q through the given midpoint is
    // r-quadrangle-contracting.
    std::optional<HalfInt> quad_r_min(int p, int q, const BallCenter& mid, HalfInt r_max) {
        for (int rd = 0; rd <= r_max.doubled; ++rd)
            if (exists_qc_geodesic(p, q, mid, HalfInt(rd))) return HalfInt(rd);
        return std::nullopt;
    }

    bool exists_qc_geodesic(int p, int q, const BallCenter& mid, HalfInt r) {
        const int len = D_.at(p, q);
        std::vector<int> path;
        path.reserve(len + 1);
        path.push_back(p);
        return qc_dfs(path, p, q, mid, r, len);
    }

  private:
    const MetricGraph& g_;
    const DistanceMatrix& D_;
    ContractionGauge K_;
    Mode mode_;
    ThinDecider td_;

    static constexpr int kShards = 64;
    std::unordered_map<int64_t, std::pair<int, int>> rmin_[kShards];  // (searched bound, found or -1)
    std::mutex rmin_mx_[kShards];
    std::unordered_map<int64_t, bool> good_[kShards];
    std::mutex good_mx_[kShards];

    static int shard(int64_t k) { return int(uint64_t(k) % kShards); }

    int64_t triple_key(int p, int q, const BallCenter& mid) const {
        int a = std::min(p, q), b = std::max(p, q);
        int64_t k = int64_t(a) * g_.n + b;
        return k * (g_.n + int64_t(g_.edges.size())) + midpoint_code(g_, mid);
    }

    // subsegment windows of lengths {L0, L0+1} ending at the new vertex must
    // be r-thin; longer subsegments inherit thinness from centered ones
    bool window_ok(const std::vector<int>& path, HalfInt r) {
        const int L0 = qc_min_length(r);
        const int k = int(path.size()) - 1;
        for (int span = L0; span <= L0 + 1; ++span) {
            if (span > k) break;
            const int i = k - span;
            Segment sub{std::vector<int>(path.begin() + i, path.begin() + k + 1)};
            ThinQuery t{path[i], path[k], span, segment_midpoint(sub, 0, span), r};
            if (!td_.is_thin(t)) return false;
        }
        return true;
    }

    bool qc_dfs(std::vector<int>& path, int cur, int q, const BallCenter& mid, HalfInt r, int len) {
        const int k = int(path.size()) - 1;
        if (!window_ok(path, r)) return false;
        if (cur == q && k == len) return true;
        // midpoint position constraints
        if (!mid.is_edge) {
            const int h = len / 2;
            if (k == h && path[k] != mid.u) return false;
        } else {
            const int h = (len - 1) / 2;
            if (k == h && path[k] != mid.u) return false;
            if (k == h + 1 && path[k] != mid.w) return false;
        }
        for (int nb : g_.adj[cur]) {
            if (int(D_.at(p0(path), nb)) != k + 1) continue;
            if (int(D_.at(nb, q)) != len - k - 1) continue;
            path.push_back(nb);
            if (qc_dfs(path, nb, q, mid, r, len)) {
                path.pop_back();
                return true;
            }
            path.pop_back();
        }
        return false;
    }

    static int p0(const std::vector<int>& path) { return path.front(); }
};

inline std::optional<SeparationWitness> is_separated(const MetricGraph& g, const DistanceMatrix& D, int x,
                                                     int y, const ContractionGauge& K, Mode mode) {
    WitnessTable wt(g, D, K, mode);
    return wt.is_separated(x, y);
}

// The set of anti-contracting pairs: all unordered distinct pairs admitting
// no witness. Phase 1 certifies pairs whose geodesics traverse a good
// length-1 witness edge via a dynamic program over the geodesic DAG; phase 2
// exhausts the rest with cached per-(p,q) verdicts.
inline std::vector<Edge> anti_contracting_pairs(WitnessTable& wt, int workers = 1) {
    const MetricGraph& g = wt.graph();
    const DistanceMatrix& D = wt.dist();
    const int n = g.n;
    if (n == 0) return {};

    // good edges: length-1 witnesses (need K(0) <= 1)
    std::vector<char> edge_good(g.edges.size(), 0);
    auto k0 = gauge_eval(wt.gauge(), HalfInt(0));
    if (k0 && *k0 <= 1) {
        parallel_for(int(g.edges.size()), workers, [&](int ei) {
            auto [u, w] = g.edges[ei];
            ThinQuery t{u, w, 1, BallCenter{true, u, w}, HalfInt(0)};
            bool good = wt.thin_decider().is_thin(t);
            if (good && wt.mode() == Mode::QUAD) {
                // quadrangle contraction of the edge also needs its endpoint
                // points to be 0-thin
                ThinQuery tu{u, u, 0, BallCenter{false, u, -1}, HalfInt(0)};
                ThinQuery tw{w, w, 0, BallCenter{false, w, -1}, HalfInt(0)};
                good = wt.thin_decider().is_thin(tu) && wt.thin_decider().is_thin(tw);
            }
            edge_good[ei] = good ? 1 : 0;
        });
    }
    bool any_good_edge = false;
    for (char c : edge_good)
        if (c) {
            any_good_edge = true;
            break;
        }

    // separated[x] bitset over y
    std::vector<Bitset> separated(n);
    for (auto& b : separated) b = Bitset(n);

    if (any_good_edge) {
        parallel_for(n, workers, [&](int x) {
            const uint16_t* rx = D.row(x);
            // BFS order from x
            std::vector<int> order(n);
            for (int i = 0; i < n; ++i) order[i] = i;
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                if (rx[a] != rx[b]) return rx[a] < rx[b];
                return a < b;
            });
            std::vector<char> mark(n, 0);
            for (int v : order) {
                if (v == x) continue;
                char m = 0;
                for (int u : g.adj[v]) {
                    if (int(rx[u]) + 1 != int(rx[v])) continue;  // DAG predecessor
                    if (mark[u]) {
                        m = 1;
                        break;
                    }
                    int ei = g.edge_index(u, v);
                    if (edge_good[ei]) {
                        m = 1;
                        break;
                    }
                }
                mark[v] = m;
                if (m) separated[x].set(v);
            }
        });
    }

    // phase 2: remaining pairs
    std::vector<std::pair<int, int>> rest;
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y)
            if (!separated[x].test(y)) rest.push_back({x, y});

    std::vector<char> rest_separated(rest.size(), 0);
    parallel_for(int(rest.size()), workers, [&](int idx) {
        auto [x, y] = rest[idx];
        const uint16_t* rx = D.row(x);
        const uint16_t* ry = D.row(y);
        const int dxy = rx[y];
        std::vector<int> between = interval(D, x, y);
        for (int p : between) {
            for (int q : between) {
                if (p == q) continue;
                if (int(rx[p]) + int(D.at(p, q)) + int(ry[q]) != dxy) continue;
                if (wt.pair_good(p, q)) {
                    rest_separated[idx] = 1;
                    return;
                }
            }
        }
    });

    // rest was collected in the same (x, y) order
    std::vector<Edge> cone;
    for (size_t ri = 0; ri < rest.size(); ++ri)
        if (!rest_separated[ri]) cone.push_back(rest[ri]);
    return cone;
}

// Base graph plus cone edges between anti-contracting pairs.
struct HatGraph {
    MetricGraph base;
    std::vector<Edge> cone_edges;  // sorted
    Mode mode = Mode::THIN;
    ContractionGauge gauge;
};

inline HatGraph build_hat(const MetricGraph& g, const DistanceMatrix& D, const ContractionGauge& K,
                          Mode mode, int workers = 1) {
    WitnessTable wt(g, D, K, mode);
    HatGraph h;
    h.base = g;
    h.cone_edges = anti_contracting_pairs(wt, workers);
    h.mode = mode;
    h.gauge = K;
    return h;
}

inline std::vector<std::vector<int>> hat_adjacency(const HatGraph& h) {
    std::vector<std::vector<int>> adj = h.base.adj;
    for (auto [u, v] : h.cone_edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return adj;
}

// Path metric of the hat multigraph; cone intervals have no interior
// vertices, so this is exactly d-hat restricted to X.
inline DistanceMatrix hat_distances(const HatGraph& h, int workers = 1) {
    auto adj = hat_adjacency(h);
    DistanceMatrix D(h.base.n);
    parallel_for(h.base.n, workers, [&](int src) { bfs_distances(adj, src, D.d.data() + size_t(src) * h.base.n); });
    return D;
}

inline int vertex_diameter(const DistanceMatrix& D) {
    int best = 0;
    for (int u = 0; u < D.n; ++u)
        for (int v = u + 1; v < D.n; ++v) best = std::max(best, int(D.at(u, v)));
    return best;
}

// Streaming variant for large hats: max eccentricity without storing a matrix.
inline int hat_vertex_diameter(const HatGraph& h, int workers = 1) {
    auto adj = hat_adjacency(h);
    const int n = h.base.n;
    std::vector<int> ecc(n, 0);
    parallel_for(n, workers, [&](int src) {
        std::vector<uint16_t> row(n);
        bfs_distances(adj, src, row.data());
        int e = 0;
        for (int v = 0; v < n; ++v) e = std::max(e, int(row[v]));
        ecc[src] = e;
    });
    int d = 0;
    for (int e : ecc) d = std::max(d, e);
    return d;
}

}  // namespace cspace
