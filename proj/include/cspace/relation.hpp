#pragma once

#include <vector>

#include "cspace/core.hpp"
#include "cspace/graph.hpp"

namespace cspace {

// Symmetric boolean relation on vertices, bitset rows.
struct BoolMatrix {
    int n = 0;
    int words_per_row = 0;
    std::vector<uint64_t> bits;

    BoolMatrix() = default;
    explicit BoolMatrix(int dim) : n(dim), words_per_row((dim + 63) / 64), bits(size_t(dim) * words_per_row, 0) {}

    uint64_t* row(int i) { return bits.data() + size_t(i) * words_per_row; }
    const uint64_t* row(int i) const { return bits.data() + size_t(i) * words_per_row; }

    void set(int i, int j) { row(i)[j >> 6] |= (uint64_t{1} << (j & 63)); }
    bool test(int i, int j) const { return (row(i)[j >> 6] >> (j & 63)) & 1; }
};

// Boolean composition: C(i,k) = OR_j A(i,j) & B(j,k).
inline BoolMatrix compose(const BoolMatrix& A, const BoolMatrix& B) {
    BoolMatrix C(A.n);
    for (int i = 0; i < A.n; ++i) {
        const uint64_t* ai = A.row(i);
        uint64_t* ci = C.row(i);
        for (int jw = 0; jw < A.words_per_row; ++jw) {
            uint64_t x = ai[jw];
            while (x) {
                int b = __builtin_ctzll(x);
                x &= x - 1;
                const uint64_t* bj = B.row(jw * 64 + b);
                for (int k = 0; k < A.words_per_row; ++k) ci[k] |= bj[k];
            }
        }
    }
    return C;
}

inline BoolMatrix relation_triple_compose(const BoolMatrix& A) { return compose(compose(A, A), A); }

// BFS in the graph minus the ball: distances with members removed and the
// center edge (if any) untraversable.
inline void bfs_avoiding(const MetricGraph& g, const Ball& ball, int src, uint16_t* out) {
    const int n = g.n;
    std::fill(out, out + n, kUnreachable16);
    if (ball.contains(src)) return;
    std::vector<int> q;
    q.reserve(n);
    q.push_back(src);
    out[src] = 0;
    for (size_t head = 0; head < q.size(); ++head) {
        int v = q[head];
        uint16_t dv = out[v];
        for (int u : g.adj[v]) {
            if (out[u] != kUnreachable16 || ball.contains(u) || ball.blocks(v, u)) continue;
            out[u] = uint16_t(dv + 1);
            q.push_back(u);
        }
    }
}

// A(a,b) true iff a,b lie outside the ball and some geodesic of g from a to b
// avoids it entirely; A(a,a) true iff a is outside the ball.
inline BoolMatrix avoid_relation(const MetricGraph& g, const DistanceMatrix& D, const Ball& ball,
                                 int workers = 1) {
    BoolMatrix A(g.n);
    parallel_for(g.n, workers, [&](int a) {
        if (ball.contains(a)) return;
        std::vector<uint16_t> scratch(g.n);
        bfs_avoiding(g, ball, a, scratch.data());
        const uint16_t* base = D.row(a);
        for (int b = 0; b < g.n; ++b)
            if (scratch[b] != kUnreachable16 && scratch[b] == base[b]) A.set(a, b);
    });
    return A;
}

}  // namespace cspace
