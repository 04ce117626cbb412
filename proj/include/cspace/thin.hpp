#pragma once

#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "cspace/graph.hpp"
#include "cspace/relation.hpp"

namespace cspace {

// A thinness instance: does every geodesic quadrangle whose first side runs
// x' .. p .. q .. y' have a non-first side meeting the closed radius-ball
// around the midpoint? Thinness depends on (p, q, midpoint) only, never on
// the concrete subsegment realizing them.
struct ThinQuery {
    int p = 0, q = 0;
    int length = 0;
    BallCenter midpoint;
    HalfInt radius{0};
};

inline ThinQuery make_thin_query(const MetricGraph& g, const DistanceMatrix& D, int p, int q,
                                 BallCenter mid, HalfInt r) {
    ThinQuery t{p, q, int(D.at(p, q)), mid, r};
    if (!mid.is_edge) {
        if (t.length % 2 != 0)
            throw std::invalid_argument("ThinQuery: odd-length segment needs an edge midpoint");
        if (int(D.at(p, mid.u)) != t.length / 2 || int(D.at(mid.u, q)) != t.length / 2)
            throw std::invalid_argument("ThinQuery: vertex midpoint is not central on a geodesic");
    } else {
        if (t.length % 2 != 1)
            throw std::invalid_argument("ThinQuery: even-length segment needs a vertex midpoint");
        if (!g.has_edge(mid.u, mid.w))
            throw std::invalid_argument("ThinQuery: edge midpoint is not an edge");
        const int h = (t.length - 1) / 2;
        if (int(D.at(p, mid.u)) != h || int(D.at(mid.w, q)) != h)
            throw std::invalid_argument("ThinQuery: edge midpoint is not central on a geodesic");
    }
    if (r.doubled < 0) throw std::invalid_argument("ThinQuery: negative radius");
    return t;
}

// All admissible midpoints of the pair (p,q), in deterministic order: vertex
// midpoints ascending by id, edge midpoints in sorted-edge-list order.
inline std::vector<BallCenter> midpoints_of(const MetricGraph& g, const DistanceMatrix& D, int p, int q) {
    std::vector<BallCenter> out;
    const int len = D.at(p, q);
    if (len == 0) {
        out.push_back(BallCenter{false, p, -1});
        return out;
    }
    if (len % 2 == 0) {
        const int h = len / 2;
        const uint16_t* rp = D.row(p);
        const uint16_t* rq = D.row(q);
        for (int z = 0; z < g.n; ++z)
            if (rp[z] == h && rq[z] == h) out.push_back(BallCenter{false, z, -1});
    } else {
        const int h = (len - 1) / 2;
        const uint16_t* rp = D.row(p);
        const uint16_t* rq = D.row(q);
        for (auto [a, b] : g.edges) {
            if (rp[a] == h && rq[b] == h)
                out.push_back(BallCenter{true, a, b});
            else if (rp[b] == h && rq[a] == h)
                out.push_back(BallCenter{true, b, a});
        }
    }
    return out;
}

inline int midpoint_code(const MetricGraph& g, const BallCenter& c) {
    if (!c.is_edge) return c.u;
    return g.n + g.edge_index(c.u, c.w);
}

// Reference decider, straight from the definition: A = avoid_relation,
// T = A∘A∘A, fail iff some aligned corner pair (x,y) has T(y,x).
inline bool is_thin_reference(const MetricGraph& g, const DistanceMatrix& D, const ThinQuery& t) {
    Ball ball = make_ball(D, t.midpoint, t.radius);
    BoolMatrix A = avoid_relation(g, D, ball);
    BoolMatrix T = relation_triple_compose(A);
    const uint16_t* rp = D.row(t.p);
    const uint16_t* rq = D.row(t.q);
    for (int x = 0; x < g.n; ++x) {
        if (ball.contains(x)) continue;
        for (int y = 0; y < g.n; ++y) {
            if (ball.contains(y)) continue;
            if (int(D.at(x, y)) == int(rp[x]) + t.length + int(rq[y]) && T.test(y, x)) return false;
        }
    }
    return true;
}

// Production decider with shared caches. Exact: every tier is a certificate;
// the final tier is the reference procedure evaluated with bitset folds.
class ThinDecider {
  public:
    ThinDecider(const MetricGraph& g, const DistanceMatrix& D, size_t avoid_cache_bytes = size_t(256) << 20)
        : g_(g), D_(D), avoid_cache_budget_(avoid_cache_bytes) {}

    const MetricGraph& graph() const { return g_; }
    const DistanceMatrix& dist() const { return D_; }

    bool is_thin(const ThinQuery& t) {
        const int64_t key = verdict_key(t);
        {
            std::lock_guard<std::mutex> lk(verdict_mx_[shard(key)]);
            auto it = verdicts_[shard(key)].find(key);
            if (it != verdicts_[shard(key)].end()) return it->second;
        }
        bool v = decide(t);
        {
            std::lock_guard<std::mutex> lk(verdict_mx_[shard(key)]);
            verdicts_[shard(key)].emplace(key, v);
        }
        return v;
    }

    // least r on the half-integer grid in [0, r_max] with is_thin true
    std::optional<HalfInt> min_thin_radius(int p, int q, BallCenter mid, HalfInt r_max) {
        if (r_max.doubled < 0) return std::nullopt;
        int lo = 0, hi = r_max.doubled + 1;
        while (lo < hi) {
            int m = lo + (hi - lo) / 2;
            ThinQuery t{p, q, int(D_.at(p, q)), mid, HalfInt(m)};
            if (is_thin(t))
                hi = m;
            else
                lo = m + 1;
        }
        if (lo > r_max.doubled) return std::nullopt;
        return HalfInt(lo);
    }

  private:
    const MetricGraph& g_;
    const DistanceMatrix& D_;

    static constexpr int kShards = 64;
    std::unordered_map<int64_t, bool> verdicts_[kShards];
    std::mutex verdict_mx_[kShards];

    struct AvoidEntry {
        int64_t key;
        std::shared_ptr<BoolMatrix> A;
        size_t bytes;
    };
    std::list<AvoidEntry> avoid_lru_;
    size_t avoid_bytes_ = 0;
    size_t avoid_cache_budget_;
    std::mutex avoid_mx_;

    static int shard(int64_t key) { return int(uint64_t(key) % kShards); }

    int64_t verdict_key(const ThinQuery& t) const {
        int p = t.p, q = t.q;
        if (p > q) std::swap(p, q);
        int64_t mc = midpoint_code(g_, t.midpoint);
        int64_t k = p;
        k = k * g_.n + q;
        k = k * (g_.n + int64_t(g_.edges.size())) + mc;
        k = k * 4096 + t.radius.doubled;
        return k;
    }

    int64_t ball_key(const ThinQuery& t) const {
        return int64_t(midpoint_code(g_, t.midpoint)) * 4096 + t.radius.doubled;
    }

    std::shared_ptr<BoolMatrix> avoid_matrix(const ThinQuery& t, const Ball& ball) {
        const int64_t key = ball_key(t);
        {
            std::lock_guard<std::mutex> lk(avoid_mx_);
            for (auto it = avoid_lru_.begin(); it != avoid_lru_.end(); ++it)
                if (it->key == key) {
                    avoid_lru_.splice(avoid_lru_.begin(), avoid_lru_, it);
                    return avoid_lru_.front().A;
                }
        }
        auto A = std::make_shared<BoolMatrix>(avoid_relation(g_, D_, ball));
        size_t bytes = A->bits.size() * 8;
        {
            std::lock_guard<std::mutex> lk(avoid_mx_);
            avoid_lru_.push_front({key, A, bytes});
            avoid_bytes_ += bytes;
            while (avoid_bytes_ > avoid_cache_budget_ && avoid_lru_.size() > 1) {
                avoid_bytes_ -= avoid_lru_.back().bytes;
                avoid_lru_.pop_back();
            }
        }
        return A;
    }

    // row of the avoid relation for one source, computed by a single BFS
    void arow(const Ball& ball, int a, Bitset& out) const {
        out.clear();
        if (ball.contains(a)) return;
        std::vector<uint16_t> scratch(g_.n);
        bfs_avoiding(g_, ball, a, scratch.data());
        const uint16_t* base = D_.row(a);
        for (int b = 0; b < g_.n; ++b)
            if (scratch[b] != kUnreachable16 && scratch[b] == base[b]) out.set(b);
    }

    bool decide(const ThinQuery& t) {
        Ball ball = make_ball(D_, t.midpoint, t.radius);
        const uint16_t* rp = D_.row(t.p);
        const uint16_t* rq = D_.row(t.q);
        const int len = t.length;

        // corner candidates: necessary alignment conditions per side
        std::vector<int> Xc, Yc;
        for (int v = 0; v < g_.n; ++v) {
            if (ball.contains(v)) continue;
            if (int(D_.at(v, t.q)) == int(rp[v]) + len) Xc.push_back(v);
            if (int(rp[v]) == len + int(rq[v])) Yc.push_back(v);
        }
        if (Xc.empty() || Yc.empty()) return true;

        // connected components of the graph minus the ball; a failing chain is
        // a path avoiding the ball, so corners must share a component
        std::vector<int> comp(g_.n, -1);
        {
            int c = 0;
            std::vector<int> stack;
            for (int s = 0; s < g_.n; ++s) {
                if (comp[s] != -1 || ball.contains(s)) continue;
                comp[s] = c;
                stack.push_back(s);
                while (!stack.empty()) {
                    int v = stack.back();
                    stack.pop_back();
                    for (int u : g_.adj[v]) {
                        if (comp[u] != -1 || ball.contains(u) || ball.blocks(v, u)) continue;
                        comp[u] = c;
                        stack.push_back(u);
                    }
                }
                ++c;
            }
        }
        {
            std::vector<char> xcomp;
            for (int x : Xc) {
                if (int(xcomp.size()) <= comp[x]) xcomp.resize(comp[x] + 1, 0);
                xcomp[comp[x]] = 1;
            }
            bool shared = false;
            for (int y : Yc)
                if (comp[y] < int(xcomp.size()) && xcomp[comp[y]]) {
                    shared = true;
                    break;
                }
            if (!shared) return true;
        }

        // cheap disproof: 1- and 2-chains between near corners
        auto by_near = [&](std::vector<int>& c, const uint16_t* ref) {
            std::sort(c.begin(), c.end(), [&](int a, int b) {
                if (ref[a] != ref[b]) return ref[a] < ref[b];
                return a < b;
            });
        };
        by_near(Xc, rp);
        by_near(Yc, rq);
        const int cap = 10;
        const int xs = std::min<int>(cap, int(Xc.size()));
        const int ys = std::min<int>(cap, int(Yc.size()));
        std::map<int, Bitset> rows;
        auto row_of = [&](int a) -> const Bitset& {
            auto it = rows.find(a);
            if (it == rows.end()) {
                Bitset b(g_.n);
                arow(ball, a, b);
                it = rows.emplace(a, std::move(b)).first;
            }
            return it->second;
        };
        for (int yi = 0; yi < ys; ++yi) {
            int y = Yc[yi];
            for (int xi = 0; xi < xs; ++xi) {
                int x = Xc[xi];
                if (comp[x] != comp[y]) continue;
                if (int(D_.at(x, y)) != int(rp[x]) + len + int(rq[y])) continue;
                const Bitset& ry = row_of(y);
                if (ry.test(x)) return false;
                const Bitset& rx = row_of(x);
                if (ry.intersects(rx)) return false;
            }
        }

        // exact tier: full avoid relation, 3-step folds per corner
        auto A = avoid_matrix(t, ball);
        const int wpr = A->words_per_row;
        Bitset z1(g_.n), yr(g_.n), yx(g_.n);
        for (int x : Xc) {
            yx.clear();
            bool has_aligned = false;
            for (int y : Yc)
                if (comp[y] == comp[x] && int(D_.at(x, y)) == int(rp[x]) + len + int(rq[y])) {
                    yx.set(y);
                    has_aligned = true;
                }
            if (!has_aligned) continue;
            // z2 candidates are A-row(x); z1 = A∘row; reachable y = A∘z1
            z1.clear();
            const uint64_t* ax = A->row(x);
            for (int wi = 0; wi < wpr; ++wi) {
                uint64_t bits = ax[wi];
                while (bits) {
                    int b = __builtin_ctzll(bits);
                    bits &= bits - 1;
                    const uint64_t* rz = A->row(wi * 64 + b);
                    for (int k = 0; k < wpr; ++k) z1.w[k] |= rz[k];
                }
            }
            yr.clear();
            for (int wi = 0; wi < wpr; ++wi) {
                uint64_t bits = z1.w[wi];
                while (bits) {
                    int b = __builtin_ctzll(bits);
                    bits &= bits - 1;
                    const uint64_t* rz = A->row(wi * 64 + b);
                    for (int k = 0; k < wpr; ++k) yr.w[k] |= rz[k];
                }
            }
            if (yr.intersects(yx)) return false;
        }
        return true;
    }
};

}  // namespace cspace
