#pragma once

#include <cctype>
#include <cstdlib>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "cspace/graph.hpp"

namespace cspace {

// A built-in example space: graph plus optional Cayley structure.
struct SpaceInstance {
    MetricGraph graph;
    std::string family;
    std::string param;
    std::vector<int> sheet_of;                               // vertex -> sheet id, empty if none
    std::vector<std::pair<std::string, Segment>> segments;   // designated segments, named
    std::vector<std::vector<int>> peripherals;
    std::vector<int> norms;  // word norms for Cayley families; not serialized

    const Segment* find_segment(const std::string& name) const {
        for (const auto& [n, s] : segments)
            if (n == name) return &s;
        return nullptr;
    }
};

inline SpaceInstance make_path(int n) {
    if (n < 2) throw std::invalid_argument("make_path: need n >= 2");
    std::vector<Edge> e;
    for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
    SpaceInstance s;
    s.graph = make_graph(n, e);
    s.family = "path";
    s.param = std::to_string(n);
    return s;
}

inline SpaceInstance make_cycle(int n) {
    if (n < 2) throw std::invalid_argument("make_cycle: need n >= 2");
    std::vector<Edge> e;
    for (int i = 0; i < n; ++i) e.push_back({i, (i + 1) % n});
    SpaceInstance s;
    s.graph = make_graph(n, e);
    s.family = "cycle";
    s.param = std::to_string(n);
    return s;
}

inline SpaceInstance make_grid(int w, int h) {
    if (w < 2 || h < 2) throw std::invalid_argument("make_grid: need w,h >= 2");
    auto id = [&](int r, int c) { return r * w + c; };
    std::vector<Edge> e;
    std::vector<std::string> labels(size_t(w) * h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            labels[id(r, c)] = "(" + std::to_string(r) + "," + std::to_string(c) + ")";
            if (c + 1 < w) e.push_back({id(r, c), id(r, c + 1)});
            if (r + 1 < h) e.push_back({id(r, c), id(r + 1, c)});
        }
    SpaceInstance s;
    s.graph = make_graph(w * h, e, labels);
    s.family = "grid";
    s.param = std::to_string(w) + "x" + std::to_string(h);
    return s;
}

// ---------------------------------------------------------------------------
// Free group ball: radius-R ball of the 2k-regular tree, reduced words.
// ---------------------------------------------------------------------------

inline SpaceInstance make_free_group_ball(int rank, int radius, int vertex_cap = 20000) {
    if (rank < 2) throw std::invalid_argument("make_free_group_ball: need rank >= 2");
    if (rank > 26) throw std::invalid_argument("make_free_group_ball: rank too large");
    if (radius < 1) throw std::invalid_argument("make_free_group_ball: need radius >= 1");

    std::vector<std::string> words{""};
    std::vector<Edge> edges;
    std::unordered_map<std::string, int> id{{"", 0}};
    // generators: 'a'.. lowercase, inverse uppercase
    std::vector<char> gens;
    for (int i = 0; i < rank; ++i) {
        gens.push_back(char('a' + i));
        gens.push_back(char('A' + i));
    }
    auto inverse_of = [](char c) { return char(std::isupper(c) ? std::tolower(c) : std::toupper(c)); };

    for (size_t head = 0; head < words.size(); ++head) {
        std::string w = words[head];
        if (int(w.size()) == radius) continue;
        for (char gch : gens) {
            if (!w.empty() && w.back() == inverse_of(gch)) continue;
            std::string nw = w + gch;
            auto it = id.find(nw);
            int nid;
            if (it == id.end()) {
                nid = int(words.size());
                if (nid >= vertex_cap)
                    throw std::invalid_argument("make_free_group_ball: vertex cap exceeded");
                id.emplace(nw, nid);
                words.push_back(nw);
            } else {
                nid = it->second;
            }
            edges.push_back({int(head), nid});
        }
    }
    std::vector<std::string> labels = words;
    labels[0] = "e";
    SpaceInstance s;
    s.graph = make_graph(int(words.size()), edges, labels);
    s.family = "fgb";
    s.param = std::to_string(rank) + ":" + std::to_string(radius);
    s.norms.resize(words.size());
    for (size_t i = 0; i < words.size(); ++i) s.norms[i] = int(words[i].size());
    return s;
}

// ---------------------------------------------------------------------------
// Z * Z^2 with generating set {a, b, c}: normal forms alternate a-syllables
// and (b,c)-syllables; word length is the sum of syllable lengths.
// ---------------------------------------------------------------------------

namespace zfp {

struct Syllable {
    bool is_a = false;
    int k = 0;  // a-exponent when is_a
    int m = 0, n = 0;  // b,c exponents otherwise
};

using Word = std::vector<Syllable>;

inline int word_norm(const Word& w) {
    int s = 0;
    for (const auto& syl : w) s += syl.is_a ? std::abs(syl.k) : std::abs(syl.m) + std::abs(syl.n);
    return s;
}

inline Word multiply(const Word& w, char gen) {
    Word r = w;
    auto drop_if_trivial = [&]() {
        if (!r.empty()) {
            const Syllable& s = r.back();
            if (s.is_a ? s.k == 0 : (s.m == 0 && s.n == 0)) r.pop_back();
        }
    };
    switch (gen) {
        case 'a':
        case 'A': {
            int d = gen == 'a' ? 1 : -1;
            if (!r.empty() && r.back().is_a)
                r.back().k += d;
            else
                r.push_back(Syllable{true, d, 0, 0});
            break;
        }
        case 'b':
        case 'B': {
            int d = gen == 'b' ? 1 : -1;
            if (!r.empty() && !r.back().is_a)
                r.back().m += d;
            else
                r.push_back(Syllable{false, 0, d, 0});
            break;
        }
        case 'c':
        case 'C': {
            int d = gen == 'c' ? 1 : -1;
            if (!r.empty() && !r.back().is_a)
                r.back().n += d;
            else
                r.push_back(Syllable{false, 0, 0, d});
            break;
        }
        default:
            throw std::logic_error("zfp::multiply: unknown generator");
    }
    drop_if_trivial();
    return r;
}

inline std::string word_label(const Word& w) {
    if (w.empty()) return "e";
    std::string s;
    for (size_t i = 0; i < w.size(); ++i) {
        if (i) s += ".";
        const Syllable& syl = w[i];
        if (syl.is_a) {
            s += "a^" + std::to_string(syl.k);
        } else {
            if (syl.m != 0) s += "b^" + std::to_string(syl.m);
            if (syl.n != 0) {
                if (syl.m != 0) s += " ";
                s += "c^" + std::to_string(syl.n);
            }
        }
    }
    return s;
}

// sheet representative: the word with a trailing (b,c)-syllable dropped
inline Word sheet_rep(const Word& w) {
    if (!w.empty() && !w.back().is_a) return Word(w.begin(), w.end() - 1);
    return w;
}

constexpr char kGenerators[6] = {'a', 'A', 'b', 'B', 'c', 'C'};

}  // namespace zfp

struct ZfpBuild {
    std::vector<zfp::Word> words;
    std::unordered_map<std::string, int> id_of_label;
    std::vector<Edge> edges;
};

inline void zfp_finish(SpaceInstance& s, ZfpBuild& b) {
    std::vector<std::string> labels(b.words.size());
    s.norms.resize(b.words.size());
    for (size_t i = 0; i < b.words.size(); ++i) {
        labels[i] = zfp::word_label(b.words[i]);
        s.norms[i] = zfp::word_norm(b.words[i]);
    }
    s.graph = make_graph(int(b.words.size()), b.edges, labels);

    // sheet partition by <b,c>-cosets, ids in order of first appearance
    s.sheet_of.assign(b.words.size(), -1);
    std::unordered_map<std::string, int> sheet_ids;
    for (size_t i = 0; i < b.words.size(); ++i) {
        std::string rep = zfp::word_label(zfp::sheet_rep(b.words[i]));
        auto it = sheet_ids.find(rep);
        if (it == sheet_ids.end()) it = sheet_ids.emplace(rep, int(sheet_ids.size())).first;
        s.sheet_of[i] = it->second;
    }
}

inline SpaceInstance make_free_product_ball(int radius, int vertex_cap = 20000) {
    if (radius < 1) throw std::invalid_argument("make_free_product_ball: need radius >= 1");
    ZfpBuild b;
    b.words.push_back({});
    b.id_of_label.emplace("e", 0);
    for (size_t head = 0; head < b.words.size(); ++head) {
        zfp::Word w = b.words[head];
        for (char g : zfp::kGenerators) {
            zfp::Word nw = zfp::multiply(w, g);
            if (zfp::word_norm(nw) > radius) continue;
            std::string lbl = zfp::word_label(nw);
            auto it = b.id_of_label.find(lbl);
            int nid;
            if (it == b.id_of_label.end()) {
                nid = int(b.words.size());
                if (nid >= vertex_cap)
                    throw std::invalid_argument("make_free_product_ball: vertex cap exceeded");
                b.id_of_label.emplace(lbl, nid);
                b.words.push_back(nw);
            } else {
                nid = it->second;
            }
            b.edges.push_back({int(head), nid});
        }
    }

    SpaceInstance s;
    s.family = "zfp";
    s.param = std::to_string(radius);
    zfp_finish(s, b);

    // designated a-axis: a^-R .. e .. a^R
    Segment axis;
    for (int k = -radius; k <= radius; ++k) {
        zfp::Word w;
        if (k != 0) w.push_back(zfp::Syllable{true, k, 0, 0});
        axis.v.push_back(b.id_of_label.at(zfp::word_label(w)));
    }
    s.segments.push_back({"a-axis", axis});
    return s;
}

// prefix words of b^{5^1} a b^{5^2} a ...; shortest complete-'a' prefix with
// length >= budget
inline std::vector<zfp::Word> special_geodesic_words(int budget) {
    if (budget < 1) throw std::invalid_argument("special geodesic: need budget >= 1");
    std::vector<zfp::Word> prefixes{{}};
    zfp::Word cur;
    int len = 0;
    int64_t run = 5;
    while (true) {
        for (int64_t i = 0; i < run; ++i) {
            cur = zfp::multiply(cur, 'b');
            prefixes.push_back(cur);
            ++len;
        }
        cur = zfp::multiply(cur, 'a');
        prefixes.push_back(cur);
        ++len;
        if (len >= budget) return prefixes;
        run *= 5;
        if (run > 1'000'000) throw std::invalid_argument("special geodesic: budget too large");
    }
}

inline Segment make_special_geodesic(const SpaceInstance& inst, int budget) {
    if (inst.sheet_of.empty())
        throw std::invalid_argument("make_special_geodesic: instance has no sheet structure");
    std::unordered_map<std::string, int> id;
    for (int v = 0; v < inst.graph.n; ++v) id.emplace(inst.graph.labels[v], v);
    Segment s;
    for (const zfp::Word& w : special_geodesic_words(budget)) {
        auto it = id.find(zfp::word_label(w));
        if (it == id.end())
            throw std::invalid_argument("make_special_geodesic: budget exceeds ball radius");
        s.v.push_back(it->second);
    }
    return s;
}

// Tube instance: induced subgraph on the rho-neighborhood of the special
// geodesic, for scales where the full ball is out of reach.
inline SpaceInstance make_zfp_tube(int budget, int rho, int vertex_cap = 20000) {
    if (rho < 1) throw std::invalid_argument("make_zfp_tube: need rho >= 1");
    auto seg_words = special_geodesic_words(budget);

    ZfpBuild b;
    std::vector<int> depth;
    for (const auto& w : seg_words) {
        std::string lbl = zfp::word_label(w);
        if (b.id_of_label.count(lbl)) continue;
        b.id_of_label.emplace(lbl, int(b.words.size()));
        b.words.push_back(w);
        depth.push_back(0);
    }
    const int seg_count = int(b.words.size());
    for (size_t head = 0; head < b.words.size(); ++head) {
        if (depth[head] == rho) continue;
        zfp::Word w = b.words[head];
        for (char g : zfp::kGenerators) {
            zfp::Word nw = zfp::multiply(w, g);
            std::string lbl = zfp::word_label(nw);
            auto it = b.id_of_label.find(lbl);
            if (it == b.id_of_label.end()) {
                if (int(b.words.size()) >= vertex_cap)
                    throw std::invalid_argument("make_zfp_tube: vertex cap exceeded");
                b.id_of_label.emplace(lbl, int(b.words.size()));
                b.words.push_back(nw);
                depth.push_back(depth[head] + 1);
            }
        }
    }
    // induced edges over the whole vertex set
    for (size_t i = 0; i < b.words.size(); ++i)
        for (char g : zfp::kGenerators) {
            auto it = b.id_of_label.find(zfp::word_label(zfp::multiply(b.words[i], g)));
            if (it != b.id_of_label.end() && it->second > int(i)) b.edges.push_back({int(i), it->second});
        }

    SpaceInstance s;
    s.family = "zfp-tube";
    s.param = std::to_string(budget) + ":" + std::to_string(rho);
    zfp_finish(s, b);
    Segment seg;
    for (int i = 0; i < seg_count; ++i) seg.v.push_back(i);
    s.segments.push_back({"special", seg});
    return s;
}

// Quotient by sheets; for these free-product spaces the quotient is a tree.
inline std::pair<MetricGraph, std::vector<int>> bass_serre_projection(const SpaceInstance& inst) {
    if (inst.sheet_of.empty())
        throw std::invalid_argument("bass_serre_projection: instance has no sheet structure");
    int nsheets = 0;
    for (int s : inst.sheet_of) nsheets = std::max(nsheets, s + 1);
    std::vector<Edge> tedges;
    for (auto [u, v] : inst.graph.edges) {
        int su = inst.sheet_of[u], sv = inst.sheet_of[v];
        if (su != sv) tedges.push_back({std::min(su, sv), std::max(su, sv)});
    }
    std::sort(tedges.begin(), tedges.end());
    tedges.erase(std::unique(tedges.begin(), tedges.end()), tedges.end());
    MetricGraph tree = make_graph(nsheets, tedges);
    if (int(tree.edges.size()) != nsheets - 1)
        throw std::logic_error("bass_serre_projection: sheet quotient is not a tree");
    return {tree, inst.sheet_of};
}

// Peripheral system: vertex subsets of size >= 2, stored sorted.
inline std::vector<std::vector<int>> sheets_as_peripherals(const SpaceInstance& inst) {
    if (inst.sheet_of.empty())
        throw std::invalid_argument("sheets_as_peripherals: instance has no sheet structure");
    int nsheets = 0;
    for (int s : inst.sheet_of) nsheets = std::max(nsheets, s + 1);
    std::vector<std::vector<int>> sheets(nsheets);
    for (int v = 0; v < inst.graph.n; ++v) sheets[inst.sheet_of[v]].push_back(v);
    std::vector<std::vector<int>> out;
    for (auto& s : sheets)
        if (s.size() >= 2) out.push_back(std::move(s));
    return out;
}

inline void validate_peripherals(const MetricGraph& g, const std::vector<std::vector<int>>& peripherals) {
    for (const auto& p : peripherals) {
        if (p.size() < 2) throw std::invalid_argument("peripheral subsets need size >= 2");
        for (size_t i = 0; i < p.size(); ++i) {
            if (p[i] < 0 || p[i] >= g.n) throw std::invalid_argument("peripheral vertex out of range");
            if (i > 0 && p[i] <= p[i - 1]) throw std::invalid_argument("peripheral subsets must be sorted");
        }
    }
}

// Base graph plus a unit-edge clique on each peripheral subset.
inline MetricGraph cone_off(const MetricGraph& g, const std::vector<std::vector<int>>& peripherals) {
    validate_peripherals(g, peripherals);
    std::vector<Edge> e = g.edges;
    for (const auto& p : peripherals)
        for (size_t i = 0; i < p.size(); ++i)
            for (size_t j = i + 1; j < p.size(); ++j) e.push_back({p[i], p[j]});
    return make_graph(g.n, e, g.labels);
}

// core of a Cayley-ball instance: vertices of word norm <= bound
inline std::vector<int> core_vertices(const SpaceInstance& inst, int norm_bound) {
    if (inst.norms.empty()) throw std::invalid_argument("core_vertices: instance has no norm data");
    std::vector<int> out;
    for (int v = 0; v < inst.graph.n; ++v)
        if (inst.norms[v] <= norm_bound) out.push_back(v);
    return out;
}

}  // namespace cspace
