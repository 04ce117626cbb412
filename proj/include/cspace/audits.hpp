#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "cspace/contraction.hpp"
#include "cspace/graph.hpp"
#include "cspace/separation.hpp"
#include "cspace/spaces.hpp"

namespace cspace {

// ---------------------------------------------------------------------------
// four-point condition
// ---------------------------------------------------------------------------

struct SampleSpec {
    uint64_t seed = 0;
    int count = 200000;           // quadruples / triples when sampling
    bool force_exhaustive = false;
    int exhaustive_limit = 60;    // exhaustive when n <= limit
};

struct DeltaReport {
    HalfInt delta{0};
    int x = 0, y = 0, z = 0, w = 0;  // argmax quadruple
    bool exhaustive = true;
    int64_t samples = 0;
    uint64_t seed = 0;
};

inline HalfInt four_point_defect(const DistanceMatrix& D, int x, int y, int z, int w) {
    int s1 = D.at(x, y) + D.at(z, w);
    int s2 = D.at(x, z) + D.at(y, w);
    int s3 = D.at(x, w) + D.at(y, z);
    int hi = std::max({s1, s2, s3});
    int lo = std::min({s1, s2, s3});
    int mid = s1 + s2 + s3 - hi - lo;
    return HalfInt(hi - mid);  // (largest - middle) / 2 on the half grid
}

inline DeltaReport four_point_delta(const DistanceMatrix& D, const SampleSpec& spec) {
    DeltaReport rep;
    rep.seed = spec.seed;
    const int n = D.n;
    if (n < 4) {
        rep.exhaustive = true;
        return rep;
    }
    auto consider = [&](int x, int y, int z, int w) {
        HalfInt d = four_point_defect(D, x, y, z, w);
        if (d > rep.delta) {
            rep.delta = d;
            rep.x = x;
            rep.y = y;
            rep.z = z;
            rep.w = w;
        }
    };
    if (spec.force_exhaustive || n <= spec.exhaustive_limit) {
        rep.exhaustive = true;
        for (int x = 0; x < n; ++x)
            for (int y = x + 1; y < n; ++y)
                for (int z = y + 1; z < n; ++z)
                    for (int w = z + 1; w < n; ++w) consider(x, y, z, w);
        rep.samples = int64_t(n) * (n - 1) * (n - 2) * (n - 3) / 24;
    } else {
        rep.exhaustive = false;
        Rng rng(spec.seed);
        rep.samples = spec.count;
        for (int64_t i = 0; i < spec.count; ++i) {
            int x = rng.index(n), y = rng.index(n), z = rng.index(n), w = rng.index(n);
            consider(x, y, z, w);
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// 1-thin triangles in the hat metric
// ---------------------------------------------------------------------------

struct TriangleViolation {
    int x, y, z;   // triangle corners
    int vertex;    // vertex of side [x,y] too far from the other sides
    int dhat;
};

inline std::vector<TriangleViolation> triangle_one_thin_audit(const MetricGraph& g, const DistanceMatrix& D,
                                                              const DistanceMatrix& hatD,
                                                              const std::vector<std::array<int, 3>>& triples) {
    std::vector<TriangleViolation> out;
    for (auto [x, y, z] : triples) {
        Segment sxy = some_geodesic(g, D, x, y);
        Segment syz = some_geodesic(g, D, y, z);
        Segment szx = some_geodesic(g, D, z, x);
        std::vector<int> other;
        other.insert(other.end(), syz.v.begin(), syz.v.end());
        other.insert(other.end(), szx.v.begin(), szx.v.end());
        for (int v : sxy.v) {
            int best = INT32_MAX;
            for (int u : other) best = std::min(best, int(hatD.at(v, u)));
            if (best > 1) out.push_back({x, y, z, v, best});
        }
    }
    return out;
}

inline std::vector<std::array<int, 3>> sample_triples(int n, const SampleSpec& spec) {
    std::vector<std::array<int, 3>> out;
    Rng rng(spec.seed);
    for (int i = 0; i < spec.count; ++i) out.push_back({rng.index(n), rng.index(n), rng.index(n)});
    return out;
}

// ---------------------------------------------------------------------------
// quasi-geodesic fit of a base geodesic's hat image
// ---------------------------------------------------------------------------

struct QGFit {
    Quarter Q{4};       // least Q >= 1 on the quarter grid
    int arg_s = 0, arg_t = 0;
};

// least k/4 >= 1 with |t-s|/Q - Q <= dhat for all index pairs:
// k*k + 4*dhat*k - 16*span >= 0
inline QGFit qg_fit(const DistanceMatrix& hatD, const Segment& seg) {
    QGFit fit;
    const int len = seg.length();
    for (int s = 0; s <= len; ++s)
        for (int t = s + 1; t <= len; ++t) {
            int span = t - s;
            int dh = hatD.at(seg.v[s], seg.v[t]);
            int lo = 4, hi = 4 * (span + 1);
            while (lo < hi) {
                int m = lo + (hi - lo) / 2;
                if (int64_t(m) * m + 4 * int64_t(dh) * m >= 16 * int64_t(span))
                    hi = m;
                else
                    lo = m + 1;
            }
            if (Quarter(lo) > fit.Q) {
                fit.Q = Quarter(lo);
                fit.arg_s = s;
                fit.arg_t = t;
            }
        }
    return fit;
}

struct BgiFromQReport {
    QGFit fit;
    int bound = 0;  // ceil(27 Q^2)
    bool applicable = true;
    bool pass = false;
};

inline BgiFromQReport bgi_from_q_audit(const MetricGraph& g, const DistanceMatrix& D,
                                       const DistanceMatrix& hatD, const Segment& seg, Quarter q_cap) {
    BgiFromQReport rep;
    rep.fit = qg_fit(hatD, seg);
    if (q_cap.quarters > 0 && rep.fit.Q > q_cap) {
        rep.applicable = false;
        return rep;
    }
    // ceil(27 * (k/4)^2) = ceil(27 k^2 / 16)
    int64_t k = rep.fit.Q.quarters;
    rep.bound = int((27 * k * k + 15) / 16);
    rep.pass = has_bgi(g, D, seg, rep.bound);
    return rep;
}

// ---------------------------------------------------------------------------
// closest-point projections: d and d-hat nearest points are hat-close
// ---------------------------------------------------------------------------

struct ClosestPointViolation {
    int x, p, q;
    int dhat_pq;
};

inline std::vector<ClosestPointViolation> closest_point_audit(const DistanceMatrix& D,
                                                              const DistanceMatrix& hatD, const Segment& seg,
                                                              const ContractionGauge& gauge,
                                                              const std::vector<int>& sample) {
    if (!gauge.dominates_ten_r_plus_one())
        throw std::invalid_argument("closest_point_audit: gauge must satisfy K(r) >= 10r+1");
    std::vector<ClosestPointViolation> out;
    for (int x : sample) {
        int p = -1, q = -1, bp = INT32_MAX, bq = INT32_MAX;
        for (int s : seg.v) {
            if (int(D.at(x, s)) < bp) {
                bp = D.at(x, s);
                p = s;
            }
            if (int(hatD.at(x, s)) < bq) {
                bq = hatD.at(x, s);
                q = s;
            }
        }
        if (int(hatD.at(p, q)) >= 17) out.push_back({x, p, q, int(hatD.at(p, q))});
    }
    return out;
}

// ---------------------------------------------------------------------------
// quadrangle estimates: short hat-sides force base-closeness via the middle
// separator
// ---------------------------------------------------------------------------

struct QuadrangleEstimateReport {
    bool applicable = false;
    HalfInt delta_meas{0};
    HalfInt k{0};
    int d_thresh = 0;
    int64_t checked = 0;
    struct Violation {
        int x, y, xx, yy;
        HalfInt r0;
        int dist;
    };
    std::vector<Violation> violations;
};

inline QuadrangleEstimateReport quadrangle_estimate_audit(const MetricGraph& g, const DistanceMatrix& D,
                                                          const DistanceMatrix& hatD, WitnessTable& wt,
                                                          int R, const SampleSpec& spec) {
    if (!wt.gauge().full() || !wt.gauge().dominates_ten_r_plus_one())
        throw std::invalid_argument("quadrangle_estimate_audit: need a full gauge with K(r) >= 10r+1");
    QuadrangleEstimateReport rep;
    rep.delta_meas = four_point_delta(hatD, spec).delta;
    // k = 2R + 3*delta + 18 on the half grid; D_thresh = 2k+2 rounded up
    rep.k = HalfInt(4 * R + 3 * rep.delta_meas.doubled + 36);
    rep.d_thresh = HalfInt(2 * rep.k.doubled + 4).ceil();

    const int n = g.n;
    std::vector<std::pair<int, int>> far_pairs;
    for (int x = 0; x < n && int(far_pairs.size()) < spec.count; ++x)
        for (int y = x + 1; y < n && int(far_pairs.size()) < spec.count; ++y)
            if (int(hatD.at(x, y)) >= rep.d_thresh) far_pairs.push_back({x, y});
    if (far_pairs.empty()) {
        rep.applicable = false;  // "not applicable at this scale"
        return rep;
    }
    rep.applicable = true;

    Rng rng(spec.seed);
    for (auto [x, y] : far_pairs) {
        Segment base = some_geodesic(g, D, x, y);
        // first vertices at hat-distance >= k from either end
        int xp = -1, yp = -1;
        for (int i = 0; i <= base.length(); ++i)
            if (2 * int(hatD.at(x, base.v[i])) >= rep.k.doubled) {
                xp = base.v[i];
                break;
            }
        for (int i = base.length(); i >= 0; --i)
            if (2 * int(hatD.at(y, base.v[i])) >= rep.k.doubled) {
                yp = base.v[i];
                break;
            }
        if (xp < 0 || yp < 0 || xp == yp) continue;
        auto witness = wt.is_separated(xp, yp);
        if (!witness) {
            rep.violations.push_back({x, y, -1, -1, HalfInt(-1), -1});
            continue;
        }
        HalfInt r0 = witness->radius;

        // sampled near-pairs (x'', y'')
        for (int trial = 0; trial < 8; ++trial) {
            int xx = -1, yy = -1;
            int tries = 0;
            while (tries++ < 64) {
                int cand = rng.index(n);
                if (int(hatD.at(x, cand)) < R) {
                    xx = cand;
                    break;
                }
            }
            tries = 0;
            while (tries++ < 64) {
                int cand = rng.index(n);
                if (int(hatD.at(y, cand)) < R) {
                    yy = cand;
                    break;
                }
            }
            if (xx < 0 || yy < 0) continue;
            Segment other = some_geodesic(g, D, xx, yy);
            int best = INT32_MAX;
            for (int u : base.v)
                for (int v : other.v) best = std::min(best, int(D.at(u, v)));
            ++rep.checked;
            if (2 * best > r0.doubled) rep.violations.push_back({x, y, xx, yy, r0, best});
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// quasi-isometric embedding constants
// ---------------------------------------------------------------------------

struct QIFit {
    Quarter L{4};
    int arg_u = 0, arg_v = 0;
};

// least L >= 1 on the quarter grid with d/L - L <= dhat on Y x Y
inline QIFit qi_embedding_audit(const DistanceMatrix& D, const DistanceMatrix& hatD,
                                const std::vector<int>& Y) {
    if (Y.empty()) throw std::invalid_argument("qi_embedding_audit: empty vertex set");
    QIFit fit;
    for (size_t i = 0; i < Y.size(); ++i)
        for (size_t j = i + 1; j < Y.size(); ++j) {
            int d = D.at(Y[i], Y[j]);
            int dh = hatD.at(Y[i], Y[j]);
            int lo = 4, hi = 4 * (d + 1);
            while (lo < hi) {
                int m = lo + (hi - lo) / 2;
                if (int64_t(m) * m + 4 * int64_t(dh) * m >= 16 * int64_t(d))
                    hi = m;
                else
                    lo = m + 1;
            }
            if (Quarter(lo) > fit.L) {
                fit.L = Quarter(lo);
                fit.arg_u = Y[i];
                fit.arg_v = Y[j];
            }
        }
    return fit;
}

// least L >= 1 on the quarter grid with two-sided QI bounds between metrics
// d1 and d2 restricted to Y: d1/L - L <= d2 <= L*d1 + L
inline Quarter qi_two_sided_fit(const DistanceMatrix& D1, const DistanceMatrix& D2,
                                const std::vector<int>& Y) {
    if (Y.empty()) throw std::invalid_argument("qi_two_sided_fit: empty vertex set");
    int best = 4;
    for (size_t i = 0; i < Y.size(); ++i)
        for (size_t j = i + 1; j < Y.size(); ++j) {
            int a = D1.at(Y[i], Y[j]);
            int b = D2.at(Y[i], Y[j]);
            for (int swap = 0; swap < 2; ++swap) {
                // b <= L*a + L  <=>  k*(a+1) >= 4b with L = k/4
                int64_t num = 4 * int64_t(b);
                int64_t den = a + 1;
                int k = int((num + den - 1) / den);
                best = std::max(best, k);
                std::swap(a, b);
            }
        }
    return Quarter(best);
}

// distance table of a projection composed with a tree metric
inline DistanceMatrix pullback_metric(const DistanceMatrix& treeD, const std::vector<int>& proj, int n) {
    DistanceMatrix D(n);
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) D.at(u, v) = treeD.at(proj[u], proj[v]);
    return D;
}

// ---------------------------------------------------------------------------
// geodesic-image diameter bound (hat diameter of base geodesics)
// ---------------------------------------------------------------------------

struct GeodesicImageReport {
    int delta_haus = 0;  // measured hat-Hausdorff constant between base and hat geodesics
    int64_t checked = 0;
    std::vector<std::array<int, 3>> violations;  // (x, y, excess)
};

inline GeodesicImageReport geodesic_image_audit(const MetricGraph& g, const DistanceMatrix& D,
                                                const HatGraph& hat, const DistanceMatrix& hatD,
                                                const std::vector<std::pair<int, int>>& pairs) {
    GeodesicImageReport rep;
    auto hadj = hat_adjacency(hat);
    MetricGraph hg;
    hg.n = hat.base.n;
    hg.adj = hadj;  // enough for some_geodesic
    std::vector<Segment> base_geos;
    for (auto [x, y] : pairs) {
        Segment base = some_geodesic(g, D, x, y);
        Segment hatgeo = some_geodesic(hg, hatD, x, y);
        int h = hausdorff_distance(hatD, base.v, hatgeo.v);
        rep.delta_haus = std::max(rep.delta_haus, h);
        base_geos.push_back(std::move(base));
    }
    for (size_t i = 0; i < pairs.size(); ++i) {
        auto [x, y] = pairs[i];
        const Segment& base = base_geos[i];
        int diam = 0;
        for (size_t a = 0; a < base.v.size(); ++a)
            for (size_t b = a + 1; b < base.v.size(); ++b)
                diam = std::max(diam, int(hatD.at(base.v[a], base.v[b])));
        ++rep.checked;
        if (diam > int(hatD.at(x, y)) + 2 * rep.delta_haus)
            rep.violations.push_back({x, y, diam - int(hatD.at(x, y)) - 2 * rep.delta_haus});
    }
    return rep;
}

// ---------------------------------------------------------------------------
// diameter scan over a family
// ---------------------------------------------------------------------------

struct DiameterRow {
    std::string family;
    std::string param;
    int vertices = 0;
    int64_t cone_edges = 0;
    int diameter = 0;
};

inline DiameterRow diameter_scan_instance(const SpaceInstance& inst, const ContractionGauge& K, Mode mode,
                                          int workers) {
    DistanceMatrix D = all_pairs_distances(inst.graph, workers);
    HatGraph hat = build_hat(inst.graph, D, K, mode, workers);
    DiameterRow row;
    row.family = inst.family;
    row.param = inst.param;
    row.vertices = inst.graph.n;
    row.cone_edges = int64_t(hat.cone_edges.size());
    row.diameter = hat_vertex_diameter(hat, workers);
    return row;
}

// ---------------------------------------------------------------------------
// coned-off graph vs contraction space on the free-product family
// ---------------------------------------------------------------------------

struct ConeVsHatReport {
    int core_norm_bound = 0;
    int64_t intra_sheet_pairs = 0;
    int64_t intra_sheet_anti = 0;       // expected: equal to intra_sheet_pairs
    int64_t far_tree_pairs = 0;         // tree distance >= K(0)+1 within the core
    int64_t far_tree_separated_r0 = 0;  // expected: equal
    Quarter hat_vs_cone{4};
    Quarter hat_vs_tree{4};
    Quarter cone_vs_tree{4};
};

inline ConeVsHatReport cone_vs_hat_audit(const SpaceInstance& inst, const DistanceMatrix& D,
                                         const ContractionGauge& K, Mode mode, int core_norm_bound,
                                         int workers) {
    if (inst.sheet_of.empty()) throw std::invalid_argument("cone_vs_hat_audit: need sheet structure");
    ConeVsHatReport rep;
    rep.core_norm_bound = core_norm_bound;

    HatGraph hat = build_hat(inst.graph, D, K, mode, workers);
    DistanceMatrix hatD = hat_distances(hat, workers);
    MetricGraph coned = cone_off(inst.graph, sheets_as_peripherals(inst));
    DistanceMatrix coneD = all_pairs_distances(coned, workers);
    auto [tree, proj] = bass_serre_projection(inst);
    DistanceMatrix treeD = all_pairs_distances(tree, workers);
    DistanceMatrix treePull = pullback_metric(treeD, proj, inst.graph.n);

    std::vector<int> core = core_vertices(inst, core_norm_bound);
    std::vector<char> is_cone(size_t(inst.graph.n) * inst.graph.n, 0);
    for (auto [u, v] : hat.cone_edges) {
        is_cone[size_t(u) * inst.graph.n + v] = 1;
        is_cone[size_t(v) * inst.graph.n + u] = 1;
    }

    WitnessTable wt(inst.graph, D, K, mode);
    auto k0 = gauge_eval(K, HalfInt(0));
    const int far = (k0 ? *k0 : 1) + 1;
    for (size_t i = 0; i < core.size(); ++i)
        for (size_t j = i + 1; j < core.size(); ++j) {
            int u = core[i], v = core[j];
            if (inst.sheet_of[u] == inst.sheet_of[v]) {
                ++rep.intra_sheet_pairs;
                if (is_cone[size_t(u) * inst.graph.n + v]) ++rep.intra_sheet_anti;
            }
            if (int(treePull.at(u, v)) >= far) {
                ++rep.far_tree_pairs;
                if (wt.separated_at_radius(u, v, HalfInt(0))) ++rep.far_tree_separated_r0;
            }
        }

    rep.hat_vs_cone = qi_two_sided_fit(hatD, coneD, core);
    rep.hat_vs_tree = qi_two_sided_fit(hatD, treePull, core);
    rep.cone_vs_tree = qi_two_sided_fit(coneD, treePull, core);
    return rep;
}

}  // namespace cspace
