#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "cspace/core.hpp"

namespace cspace {

// Contraction gauge K: non-decreasing, K(r) >= 4r+1 for all r. Affine gauges
// are full; partial gauges are infinite at and beyond a threshold radius.
struct ContractionGauge {
    bool partial = false;
    HalfInt threshold{0};  // meaningful when partial; K(r) = inf for r >= threshold
    int slope = 10;
    int intercept = 1;

    bool full() const { return !partial; }

    // K(r) >= 10r+1 for all r (hypothesis of the closest-point lemma)
    bool dominates_ten_r_plus_one() const { return slope >= 10 && intercept >= 1; }

    std::string spec_string() const {
        if (!partial) return "affine:" + std::to_string(slope) + ":" + std::to_string(intercept);
        return "partial:" + std::to_string(threshold.doubled) + ":" + std::to_string(slope) + ":" +
               std::to_string(intercept);
    }
};

inline ContractionGauge make_affine_gauge(int slope, int intercept) {
    if (slope < 4 || intercept < 1)
        throw std::invalid_argument("gauge: K(r) >= 4r+1 requires slope >= 4 and intercept >= 1");
    ContractionGauge k;
    k.partial = false;
    k.slope = slope;
    k.intercept = intercept;
    return k;
}

inline ContractionGauge make_partial_gauge(HalfInt threshold, int slope, int intercept) {
    if (slope < 4 || intercept < 1)
        throw std::invalid_argument("gauge: K(r) >= 4r+1 requires slope >= 4 and intercept >= 1");
    if (threshold.doubled < 0) throw std::invalid_argument("gauge: negative threshold");
    ContractionGauge k;
    k.partial = true;
    k.threshold = threshold;
    k.slope = slope;
    k.intercept = intercept;
    return k;
}

inline ContractionGauge default_gauge() { return make_affine_gauge(10, 1); }

// Exact evaluation on the half-integer grid; affine values round up to the
// next integer since witness lengths are integers. nullopt encodes infinity.
inline std::optional<int> gauge_eval(const ContractionGauge& k, HalfInt r) {
    if (r.doubled < 0) throw std::invalid_argument("gauge_eval: negative radius");
    if (k.partial && r >= k.threshold) return std::nullopt;
    // ceil(slope * r + intercept) with r = doubled/2
    int64_t twice = int64_t(k.slope) * r.doubled + 2 * int64_t(k.intercept);
    int64_t val = (twice + 1) / 2;
    if (val > std::numeric_limits<int>::max()) throw std::overflow_error("gauge_eval: overflow");
    return int(val);
}

// Largest grid radius whose gauge value is at most len; nullopt if none.
inline std::optional<HalfInt> max_radius_for_length(const ContractionGauge& k, int len) {
    if (len < k.intercept) return std::nullopt;
    // ceil((slope*rd)/2 + intercept) <= len  <=>  slope*rd <= 2*(len - intercept)
    int64_t rd = (2 * int64_t(len - k.intercept)) / k.slope;
    if (k.partial) rd = std::min(rd, int64_t(k.threshold.doubled) - 1);
    if (rd < 0) return std::nullopt;
    return HalfInt(int(rd));
}

inline ContractionGauge parse_gauge(const std::string& s) {
    auto split = [](const std::string& str) {
        std::vector<std::string> parts;
        size_t start = 0;
        while (true) {
            size_t pos = str.find(':', start);
            if (pos == std::string::npos) {
                parts.push_back(str.substr(start));
                break;
            }
            parts.push_back(str.substr(start, pos - start));
            start = pos + 1;
        }
        return parts;
    };
    auto parts = split(s);
    try {
        if (parts.size() == 3 && parts[0] == "affine")
            return make_affine_gauge(std::stoi(parts[1]), std::stoi(parts[2]));
        if (parts.size() == 4 && parts[0] == "partial")
            return make_partial_gauge(HalfInt(std::stoi(parts[1])), std::stoi(parts[2]), std::stoi(parts[3]));
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("gauge: malformed spec '" + s + "'");
    }
    throw std::invalid_argument("gauge: malformed spec '" + s + "' (want affine:A:B or partial:R0x2:A:B)");
}

}  // namespace cspace
