#pragma once

#include <optional>
#include <vector>

#include "cspace/graph.hpp"
#include "cspace/thin.hpp"

namespace cspace {

// Closest-point projection data of every vertex onto a segment.
struct ProjectionTable {
    const Segment* seg = nullptr;
    std::vector<int> dist;                  // d(v, seg)
    std::vector<std::vector<int>> nearest;  // pi(v), ascending vertex id
    std::vector<int> lo, hi;                // parameter range of pi(v) along seg
};

inline ProjectionTable projection_table(const MetricGraph& g, const DistanceMatrix& D, const Segment& seg) {
    (void)g;
    ProjectionTable t;
    t.seg = &seg;
    t.dist.assign(D.n, 0);
    t.nearest.assign(D.n, {});
    t.lo.assign(D.n, 0);
    t.hi.assign(D.n, 0);
    for (int v = 0; v < D.n; ++v) {
        int best = INT32_MAX;
        for (int s : seg.v) best = std::min(best, int(D.at(v, s)));
        t.dist[v] = best;
        int lo = INT32_MAX, hi = -1;
        for (int i = 0; i < int(seg.v.size()); ++i)
            if (int(D.at(v, seg.v[i])) == best) {
                t.nearest[v].push_back(seg.v[i]);
                lo = std::min(lo, i);
                hi = std::max(hi, i);
            }
        std::sort(t.nearest[v].begin(), t.nearest[v].end());
        t.lo[v] = lo;
        t.hi[v] = hi;
    }
    return t;
}

struct HalfdistViolation {
    int x, xproj, y, z;
    int dyz, dyx2;  // d(y,z) and d(y,x') for the failed inequality 2*d(y,z) >= d(y,x')
};

// Audit of d(y,[x,x']) >= d(y,x')/2 for closest-point projections.
inline std::vector<HalfdistViolation> projection_halfdist_audit(const MetricGraph& g, const DistanceMatrix& D,
                                                                const Segment& seg,
                                                                const std::vector<int>& sample) {
    ProjectionTable t = projection_table(g, D, seg);
    std::vector<HalfdistViolation> out;
    for (int x : sample) {
        for (int xp : t.nearest[x]) {
            std::vector<int> between = interval(D, x, xp);
            for (int y : seg.v)
                for (int z : between)
                    if (2 * int(D.at(y, z)) < int(D.at(y, xp))) out.push_back({x, xp, y, z, int(D.at(y, z)), int(D.at(y, xp))});
        }
    }
    return out;
}

// Strong contraction: projections of balls disjoint from the segment have
// diameter at most C. The ball of x is open: members at distance <= d(x,seg)-1.
inline bool is_contracting(const MetricGraph& g, const DistanceMatrix& D, const Segment& seg, int C) {
    ProjectionTable t = projection_table(g, D, seg);
    for (int x = 0; x < D.n; ++x) {
        const int radius = t.dist[x] - 1;
        if (radius < 0) continue;
        int lo = INT32_MAX, hi = -1;
        const uint16_t* rx = D.row(x);
        for (int u = 0; u < D.n; ++u)
            if (rx[u] <= radius) {
                lo = std::min(lo, t.lo[u]);
                hi = std::max(hi, t.hi[u]);
            }
        if (hi - lo > C) return false;
    }
    (void)g;
    return true;
}

inline int min_contraction(const MetricGraph& g, const DistanceMatrix& D, const Segment& seg) {
    ProjectionTable t = projection_table(g, D, seg);
    int worst = 0;
    for (int x = 0; x < D.n; ++x) {
        const int radius = t.dist[x] - 1;
        if (radius < 0) continue;
        int lo = INT32_MAX, hi = -1;
        const uint16_t* rx = D.row(x);
        for (int u = 0; u < D.n; ++u)
            if (rx[u] <= radius) {
                lo = std::min(lo, t.lo[u]);
                hi = std::max(hi, t.hi[u]);
            }
        if (hi >= 0) worst = std::max(worst, hi - lo);
    }
    (void)g;
    return worst;
}

// Bounded geodesic image: no geodesic staying >= C away from seg projects to
// a set of diameter > C. A violating geodesic can be replaced by the
// subsegment between extremal-projection vertices, so it suffices to scan
// vertex pairs u,w in U = {v : d(v,seg) >= C} joined by a geodesic inside U.
inline bool has_bgi(const MetricGraph& g, const DistanceMatrix& D, const Segment& seg, int C) {
    ProjectionTable t = projection_table(g, D, seg);
    std::vector<int> U;
    for (int v = 0; v < D.n; ++v)
        if (t.dist[v] >= C) U.push_back(v);
    if (U.empty()) return true;
    std::vector<char> inU(D.n, 0);
    for (int v : U) inU[v] = 1;

    std::vector<uint16_t> du(D.n);
    for (int u : U) {
        if (t.hi[u] - t.lo[u] > C) return false;  // single-point geodesic
        // BFS inside U
        std::fill(du.begin(), du.end(), kUnreachable16);
        std::vector<int> q{u};
        du[u] = 0;
        for (size_t head = 0; head < q.size(); ++head) {
            int v = q[head];
            for (int nb : g.adj[v]) {
                if (!inU[nb] || du[nb] != kUnreachable16) continue;
                du[nb] = uint16_t(du[v] + 1);
                q.push_back(nb);
            }
        }
        for (int w : U) {
            if (w <= u || du[w] != D.at(u, w)) continue;
            int lo = std::min(t.lo[u], t.lo[w]);
            int hi = std::max(t.hi[u], t.hi[w]);
            if (hi - lo > C) return false;
        }
    }
    return true;
}

// Smallest integer length bound of the quadrangle-contraction quantifier:
// subsegments of length >= 3r, including points when r = 0.
inline int qc_min_length(HalfInt r) {
    // least integer L with 2L >= 3 * doubled(r)
    return int((3 * int64_t(r.doubled) + 1) / 2);
}

inline BallCenter segment_midpoint(const Segment& s, int i, int j) {
    const int len = j - i;
    if (len % 2 == 0) return BallCenter{false, s.v[i + len / 2], -1};
    const int h = i + (len - 1) / 2;
    return BallCenter{true, s.v[h], s.v[h + 1]};
}

// Every contiguous subsegment of length >= 3r is r-thin, with that
// subsegment's own midpoint.
inline bool is_quadrangle_contracting(ThinDecider& td, const Segment& seg, HalfInt r) {
    const int L0 = qc_min_length(r);
    const int len = seg.length();
    const auto& D = td.dist();
    const auto& g = td.graph();
    for (int span = L0; span <= std::max(len, 0); ++span) {
        if (span > len) break;
        for (int i = 0; i + span <= len; ++i) {
            int p = seg.v[i], q = seg.v[i + span];
            ThinQuery t = make_thin_query(g, D, p, q, segment_midpoint(seg, i, i + span), r);
            if (!td.is_thin(t)) return false;
        }
    }
    return true;
}

inline bool is_quadrangle_contracting(const MetricGraph& g, const DistanceMatrix& D, const Segment& seg,
                                      HalfInt r) {
    ThinDecider td(g, D);
    return is_quadrangle_contracting(td, seg, r);
}

// least grid radius at which the segment is quadrangle-contracting (always
// exists: a ball swallowing every corner candidate makes everything thin)
inline HalfInt min_quadrangle_radius(ThinDecider& td, const Segment& seg) {
    int diam = 0;
    const auto& D = td.dist();
    for (int u = 0; u < D.n; ++u)
        for (int v = u + 1; v < D.n; ++v) diam = std::max(diam, int(D.at(u, v)));
    int lo = 0, hi = 2 * (diam + 1);
    while (lo < hi) {
        int m = lo + (hi - lo) / 2;
        if (is_quadrangle_contracting(td, seg, HalfInt(m)))
            hi = m;
        else
            lo = m + 1;
    }
    return HalfInt(lo);
}

struct EquivalenceReport {
    HalfInt qc_radius{0};       // r*
    int bgi_constant = 0;       // least C with has_bgi
    int contraction_constant = 0;
    bool implication_holds = false;  // has_bgi(4 r* + 1)
};

// r* = least quadrangle-contraction radius, C_bgi, C_con; asserts the
// explicit direction r-quadrangle-contracting => (4r+1)-bounded geodesic image.
inline EquivalenceReport equivalence_audit(const MetricGraph& g, const DistanceMatrix& D, const Segment& seg) {
    ThinDecider td(g, D);
    EquivalenceReport rep;
    rep.qc_radius = min_quadrangle_radius(td, seg);
    {
        int lo = 0, hi = std::max(seg.length(), 1);
        while (lo < hi) {
            int m = lo + (hi - lo) / 2;
            if (has_bgi(g, D, seg, m))
                hi = m;
            else
                lo = m + 1;
        }
        rep.bgi_constant = lo;
    }
    rep.contraction_constant = min_contraction(g, D, seg);
    const int bound = 2 * rep.qc_radius.doubled + 1;  // 4r+1 on the half grid
    rep.implication_holds = has_bgi(g, D, seg, bound);
    return rep;
}

}  // namespace cspace
