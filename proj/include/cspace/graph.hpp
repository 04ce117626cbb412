#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cspace/core.hpp"

namespace cspace {

using Edge = std::pair<int, int>;  // stored with first < second

constexpr uint16_t kUnreachable16 = 0xFFFF;

// Finite connected undirected unit-edge graph. Vertices are 0..n-1.
struct MetricGraph {
    int n = 0;
    std::vector<Edge> edges;                 // sorted, deduplicated
    std::vector<std::vector<int>> adj;       // neighbor lists, ascending
    std::vector<std::string> labels;         // empty or size n

    bool has_labels() const { return !labels.empty(); }

    int degree(int v) const { return int(adj[v].size()); }

    bool has_edge(int u, int v) const {
        if (u == v) return false;
        const auto& a = adj[u];
        return std::binary_search(a.begin(), a.end(), v);
    }

    // index into the sorted edge list, used as a stable midpoint code
    int edge_index(int u, int v) const {
        if (u > v) std::swap(u, v);
        auto it = std::lower_bound(edges.begin(), edges.end(), Edge{u, v});
        if (it == edges.end() || *it != Edge{u, v})
            throw std::invalid_argument("edge_index: not an edge: " + std::to_string(u) + "," + std::to_string(v));
        return int(it - edges.begin());
    }
};

inline MetricGraph make_graph(int n, std::vector<Edge> edge_list,
                              std::vector<std::string> labels = {}) {
    if (n < 0) throw std::invalid_argument("make_graph: negative vertex count");
    if (!labels.empty() && int(labels.size()) != n)
        throw std::invalid_argument("make_graph: label count differs from vertex count");
    for (auto& e : edge_list) {
        if (e.first == e.second)
            throw std::invalid_argument("make_graph: self-loop at vertex " + std::to_string(e.first));
        if (e.first < 0 || e.second < 0 || e.first >= n || e.second >= n)
            throw std::invalid_argument("make_graph: edge endpoint out of range");
        if (e.first > e.second) std::swap(e.first, e.second);
    }
    std::sort(edge_list.begin(), edge_list.end());
    edge_list.erase(std::unique(edge_list.begin(), edge_list.end()), edge_list.end());

    MetricGraph g;
    g.n = n;
    g.edges = std::move(edge_list);
    g.labels = std::move(labels);
    g.adj.assign(n, {});
    for (auto [u, v] : g.edges) {
        g.adj[u].push_back(v);
        g.adj[v].push_back(u);
    }
    for (auto& a : g.adj) std::sort(a.begin(), a.end());

    // connectivity check, naming a witness pair on failure
    if (n > 0) {
        std::vector<char> seen(n, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int reached = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int u : g.adj[v])
                if (!seen[u]) {
                    seen[u] = 1;
                    ++reached;
                    stack.push_back(u);
                }
        }
        if (reached != n) {
            int missing = 0;
            while (seen[missing]) ++missing;
            throw std::invalid_argument("make_graph: graph is disconnected; no path from vertex 0 to vertex " +
                                        std::to_string(missing));
        }
    }
    return g;
}

// Exact all-pairs shortest-path table in edge units.
struct DistanceMatrix {
    int n = 0;
    std::vector<uint16_t> d;

    DistanceMatrix() = default;
    explicit DistanceMatrix(int dim) : n(dim), d(size_t(dim) * dim, 0) {}

    uint16_t at(int u, int v) const { return d[size_t(u) * n + v]; }
    uint16_t& at(int u, int v) { return d[size_t(u) * n + v]; }
    const uint16_t* row(int u) const { return d.data() + size_t(u) * n; }
};

inline void bfs_distances(const std::vector<std::vector<int>>& adj, int src, uint16_t* out) {
    const int n = int(adj.size());
    std::fill(out, out + n, kUnreachable16);
    std::vector<int> q;
    q.reserve(n);
    q.push_back(src);
    out[src] = 0;
    for (size_t head = 0; head < q.size(); ++head) {
        int v = q[head];
        uint16_t dv = out[v];
        for (int u : adj[v])
            if (out[u] == kUnreachable16) {
                out[u] = uint16_t(dv + 1);
                q.push_back(u);
            }
    }
}

inline DistanceMatrix all_pairs_distances(const MetricGraph& g, int workers = 1) {
    DistanceMatrix D(g.n);
    parallel_for(g.n, workers, [&](int src) { bfs_distances(g.adj, src, D.d.data() + size_t(src) * g.n); });
    for (int u = 0; u < g.n; ++u)
        for (int v = 0; v < g.n; ++v)
            if (D.at(u, v) == kUnreachable16)
                throw std::invalid_argument("all_pairs_distances: no path between vertex " + std::to_string(u) +
                                            " and vertex " + std::to_string(v));
    return D;
}

// {z : d(x,z) + d(z,y) = d(x,y)}
inline std::vector<int> interval(const DistanceMatrix& D, int x, int y) {
    std::vector<int> out;
    const uint16_t* rx = D.row(x);
    const uint16_t* ry = D.row(y);
    const int dxy = rx[y];
    for (int z = 0; z < D.n; ++z)
        if (rx[z] + ry[z] == dxy) out.push_back(z);
    return out;
}

// Vertex sequence realizing a geodesic.
struct Segment {
    std::vector<int> v;

    int length() const { return int(v.size()) - 1; }
    int first() const { return v.front(); }
    int last() const { return v.back(); }

    Segment sub(int i, int j) const {  // inclusive index range
        if (i > j || i < 0 || j >= int(v.size()))
            throw std::invalid_argument("Segment::sub: bad index range");
        return Segment{std::vector<int>(v.begin() + i, v.begin() + j + 1)};
    }
};

inline void validate_segment(const MetricGraph& g, const DistanceMatrix& D, const Segment& s) {
    if (s.v.empty()) throw std::invalid_argument("Segment: empty vertex sequence");
    for (size_t i = 0; i + 1 < s.v.size(); ++i)
        if (!g.has_edge(s.v[i], s.v[i + 1]))
            throw std::invalid_argument("Segment: consecutive pair is not an edge");
    if (int(D.at(s.first(), s.last())) != s.length())
        throw std::invalid_argument("Segment: sequence is not a geodesic");
}

// Deterministic geodesic: lowest-vertex-id successor choice.
inline Segment some_geodesic(const MetricGraph& g, const DistanceMatrix& D, int x, int y) {
    Segment s;
    s.v.push_back(x);
    int cur = x;
    while (cur != y) {
        const int dcy = D.at(cur, y);
        int nxt = -1;
        for (int u : g.adj[cur])
            if (D.at(u, y) + 1 == dcy) {
                nxt = u;
                break;  // adjacency is ascending, first hit is lowest id
            }
        s.v.push_back(nxt);
        cur = nxt;
    }
    return s;
}

// Shortest-path distance in the induced subgraph on V minus forbidden.
inline std::optional<int> avoidance_distance(const MetricGraph& g, const std::vector<int>& forbidden,
                                             int a, int b) {
    std::vector<char> block(g.n, 0);
    for (int v : forbidden) block[v] = 1;
    if (block[a] || block[b]) return std::nullopt;
    if (a == b) return 0;
    std::vector<uint16_t> dist(g.n, kUnreachable16);
    std::vector<int> q{a};
    dist[a] = 0;
    for (size_t head = 0; head < q.size(); ++head) {
        int v = q[head];
        for (int u : g.adj[v]) {
            if (block[u] || dist[u] != kUnreachable16) continue;
            dist[u] = uint16_t(dist[v] + 1);
            if (u == b) return int(dist[u]);
            q.push_back(u);
        }
    }
    return std::nullopt;
}

inline int hausdorff_distance(const DistanceMatrix& D, const std::vector<int>& S, const std::vector<int>& T) {
    if (S.empty() || T.empty()) throw std::invalid_argument("hausdorff_distance: empty vertex set");
    int h = 0;
    for (int s : S) {
        int best = INT32_MAX;
        for (int t : T) best = std::min(best, int(D.at(s, t)));
        h = std::max(h, best);
    }
    for (int t : T) {
        int best = INT32_MAX;
        for (int s : S) best = std::min(best, int(D.at(t, s)));
        h = std::max(h, best);
    }
    return h;
}

struct EmbeddingViolation {
    int u, v;        // vertices of sub
    int d_sub, d_ambient;
};

// Lists all pairs of sub whose distance differs in ambient under vertex_map.
inline std::vector<EmbeddingViolation> validate_convex_embedding(const MetricGraph& sub,
                                                                 const MetricGraph& ambient,
                                                                 const std::vector<int>& vertex_map) {
    if (int(vertex_map.size()) != sub.n)
        throw std::invalid_argument("validate_convex_embedding: map size differs from sub vertex count");
    std::vector<char> used(ambient.n, 0);
    for (int img : vertex_map) {
        if (img < 0 || img >= ambient.n)
            throw std::invalid_argument("validate_convex_embedding: map image out of range");
        if (used[img]) throw std::invalid_argument("validate_convex_embedding: map is not injective");
        used[img] = 1;
    }
    for (auto [u, v] : sub.edges)
        if (!ambient.has_edge(vertex_map[u], vertex_map[v]))
            throw std::invalid_argument("validate_convex_embedding: map does not preserve edge " +
                                        std::to_string(u) + "," + std::to_string(v));

    DistanceMatrix Dsub = all_pairs_distances(sub);
    std::vector<EmbeddingViolation> out;
    std::vector<uint16_t> arow(ambient.n);
    for (int u = 0; u < sub.n; ++u) {
        bfs_distances(ambient.adj, vertex_map[u], arow.data());
        for (int v = u + 1; v < sub.n; ++v)
            if (arow[vertex_map[v]] != Dsub.at(u, v))
                out.push_back({u, v, int(Dsub.at(u, v)), int(arow[vertex_map[v]])});
    }
    return out;
}

// Midpoint convention: even-length segment -> central vertex, odd-length ->
// central edge, ordered with u on the p side.
struct BallCenter {
    bool is_edge = false;
    int u = -1;  // vertex, or p-side edge endpoint
    int w = -1;  // q-side edge endpoint when is_edge

    friend bool operator==(const BallCenter& a, const BallCenter& b) {
        return a.is_edge == b.is_edge && a.u == b.u && a.w == b.w;
    }
    friend bool operator<(const BallCenter& a, const BallCenter& b) {
        if (a.is_edge != b.is_edge) return !a.is_edge;
        if (a.u != b.u) return a.u < b.u;
        return a.w < b.w;
    }
};

// Closed r-ball around a vertex or an edge midpoint. An edge-centered ball
// always contains the interior midpoint of its center edge, so paths that
// traverse that edge meet the ball at every radius; member vertices capture
// the rest exactly on the half-integer grid.
struct Ball {
    BallCenter center;
    HalfInt radius{0};
    Bitset members;
    bool blocks_center_edge = false;

    bool contains(int v) const { return members.test(v); }
    bool blocks(int a, int b) const {
        return blocks_center_edge &&
               ((a == center.u && b == center.w) || (a == center.w && b == center.u));
    }
};

inline Ball make_ball(const DistanceMatrix& D, BallCenter c, HalfInt r) {
    if (r.doubled < 0) throw std::invalid_argument("make_ball: negative radius");
    Ball b;
    b.center = c;
    b.radius = r;
    b.members = Bitset(D.n);
    if (!c.is_edge) {
        // d(v, center) <= r with integer distances
        const uint16_t* row = D.row(c.u);
        const int cap = r.floor();
        for (int v = 0; v < D.n; ++v)
            if (row[v] <= cap) b.members.set(v);
    } else {
        // min(d(v,u), d(v,w)) + 1/2 <= r
        const uint16_t* ru = D.row(c.u);
        const uint16_t* rw = D.row(c.w);
        for (int v = 0; v < D.n; ++v) {
            int m2 = 2 * std::min(int(ru[v]), int(rw[v])) + 1;
            if (m2 <= r.doubled) b.members.set(v);
        }
        b.blocks_center_edge = true;
    }
    return b;
}

inline std::vector<int> ball_member_list(const Ball& b) {
    std::vector<int> out;
    b.members.for_each([&](int v) { out.push_back(v); });
    return out;
}

}  // namespace cspace
