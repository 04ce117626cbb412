#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace cspace {

// Radii live on the half-integer grid; the doubled value is stored exactly.
struct HalfInt {
    int doubled = 0;

    constexpr HalfInt() = default;
    constexpr explicit HalfInt(int d) : doubled(d) {}

    static constexpr HalfInt whole(int k) { return HalfInt(2 * k); }
    static constexpr HalfInt half(int d) { return HalfInt(d); }

    constexpr bool is_integer() const { return (doubled & 1) == 0; }
    constexpr int floor() const { return doubled >= 0 ? doubled / 2 : (doubled - 1) / 2; }
    constexpr int ceil() const { return doubled >= 0 ? (doubled + 1) / 2 : doubled / 2; }

    friend constexpr bool operator==(HalfInt a, HalfInt b) { return a.doubled == b.doubled; }
    friend constexpr bool operator!=(HalfInt a, HalfInt b) { return a.doubled != b.doubled; }
    friend constexpr bool operator<(HalfInt a, HalfInt b) { return a.doubled < b.doubled; }
    friend constexpr bool operator<=(HalfInt a, HalfInt b) { return a.doubled <= b.doubled; }
    friend constexpr bool operator>(HalfInt a, HalfInt b) { return a.doubled > b.doubled; }
    friend constexpr bool operator>=(HalfInt a, HalfInt b) { return a.doubled >= b.doubled; }
    friend constexpr HalfInt operator+(HalfInt a, HalfInt b) { return HalfInt(a.doubled + b.doubled); }
    friend constexpr HalfInt operator-(HalfInt a, HalfInt b) { return HalfInt(a.doubled - b.doubled); }

    double value() const { return doubled / 2.0; }

    std::string str() const {
        if (is_integer()) return std::to_string(doubled / 2);
        return std::to_string(doubled / 2) + (doubled >= 0 ? ".5" : ".5");
    }
};

inline std::string half_str(HalfInt h) {
    // exact decimal, e.g. "3", "2.5", "-0.5"
    int d = h.doubled;
    bool neg = d < 0;
    int ad = neg ? -d : d;
    std::string s = (neg ? "-" : "") + std::to_string(ad / 2);
    if (ad & 1) s += ".5";
    return s;
}

// quarter-grid rationals for quasi-geodesic / QI constant fits
struct Quarter {
    int quarters = 0;
    constexpr Quarter() = default;
    constexpr explicit Quarter(int q) : quarters(q) {}
    double value() const { return quarters / 4.0; }
    friend constexpr bool operator==(Quarter a, Quarter b) { return a.quarters == b.quarters; }
    friend constexpr bool operator<(Quarter a, Quarter b) { return a.quarters < b.quarters; }
    friend constexpr bool operator<=(Quarter a, Quarter b) { return a.quarters <= b.quarters; }
    friend constexpr bool operator>=(Quarter a, Quarter b) { return a.quarters >= b.quarters; }
    std::string str() const {
        int q = quarters;
        std::string s = std::to_string(q / 4);
        switch (((q % 4) + 4) % 4) {
            case 1: s += ".25"; break;
            case 2: s += ".5"; break;
            case 3: s += ".75"; break;
            default: break;
        }
        return s;
    }
};

// Fixed-width dynamic bitset; rows of boolean relation matrices.
struct Bitset {
    int n = 0;
    std::vector<uint64_t> w;

    Bitset() = default;
    explicit Bitset(int bits) : n(bits), w((bits + 63) / 64, 0) {}

    void set(int i) { w[i >> 6] |= (uint64_t{1} << (i & 63)); }
    void reset(int i) { w[i >> 6] &= ~(uint64_t{1} << (i & 63)); }
    bool test(int i) const { return (w[i >> 6] >> (i & 63)) & 1; }
    void clear() { std::fill(w.begin(), w.end(), 0); }

    void or_with(const Bitset& o) {
        for (size_t i = 0; i < w.size(); ++i) w[i] |= o.w[i];
    }
    bool intersects(const Bitset& o) const {
        for (size_t i = 0; i < w.size(); ++i)
            if (w[i] & o.w[i]) return true;
        return false;
    }
    bool any() const {
        for (uint64_t x : w)
            if (x) return true;
        return false;
    }
    int count() const {
        int c = 0;
        for (uint64_t x : w) c += __builtin_popcountll(x);
        return c;
    }
    template <class F>
    void for_each(F&& f) const {
        for (size_t wi = 0; wi < w.size(); ++wi) {
            uint64_t x = w[wi];
            while (x) {
                int b = __builtin_ctzll(x);
                f(int(wi * 64 + b));
                x &= x - 1;
            }
        }
    }
};

// Deterministic RNG: splitmix64 core with explicit rejection sampling so that
// sampled reports do not depend on the standard library's distributions.
struct Rng {
    uint64_t state;
    explicit Rng(uint64_t seed) : state(seed + 0x9E3779B97f4A7C15ULL) {}

    uint64_t next() {
        uint64_t z = (state += 0x9E3779B97f4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, bound)
    uint64_t below(uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
        uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % bound;
    }

    int index(int n) { return int(below(uint64_t(n))); }
};

// Chunked parallel loop; results must be written to index-addressed slots so
// that output is independent of scheduling.
inline void parallel_for(int count, int workers, const std::function<void(int)>& body) {
    if (count <= 0) return;
    workers = std::max(1, std::min(workers, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err = nullptr;
    std::atomic<bool> failed{false};
    std::mutex err_mx;
    auto run = [&]() {
        while (true) {
            int i = next.fetch_add(1);
            if (i >= count || failed.load()) break;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mx);
                if (!failed.exchange(true)) err = std::current_exception();
                break;
            }
        }
    };
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(run);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace cspace
