#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "swaylab/core.hpp"

namespace swaylab {

/// An indicator has no value on this input (e.g. spread of a single point).
struct UndefinedIndicator : std::domain_error {
    using std::domain_error::domain_error;
};

using Front = std::vector<ObjectiveVector>;

/// Points mapped into [0,1]^k (minimization form) together with the bounds
/// that produced them, so later fronts can be mapped the same way.
struct NormalizedFront {
    Front points;
    ObjectiveVector lower;
    ObjectiveVector upper;
};

/// Min-max map with explicit bounds; degenerate objectives go to 0. Values
/// outside the bounds are not clamped.
inline Front normalize(std::span<const ObjectiveVector> front, std::span<const double> lower,
                       std::span<const double> upper) {
    Front out;
    out.reserve(front.size());
    for (const auto& p : front) {
        if (p.size() != lower.size()) throw ContractError("normalize: objective count mismatch");
        ObjectiveVector q(p.size());
        for (std::size_t m = 0; m < p.size(); ++m) {
            const double span = upper[m] - lower[m];
            q[m] = span > 0 ? (p[m] - lower[m]) / span : 0.0;
        }
        out.push_back(std::move(q));
    }
    return out;
}

/// Shared bounds over the union of all fronts, then each front mapped with them.
inline std::vector<NormalizedFront> normalize_fronts(std::span<const Front> fronts) {
    std::size_t k = 0;
    for (const auto& f : fronts)
        if (!f.empty()) {
            k = f.front().size();
            break;
        }
    if (k == 0) throw ContractError("normalize_fronts: need at least one non-empty front");

    ObjectiveVector lo(k, std::numeric_limits<double>::infinity());
    ObjectiveVector hi(k, -std::numeric_limits<double>::infinity());
    for (const auto& f : fronts)
        for (const auto& p : f) {
            if (p.size() != k) throw ContractError("normalize_fronts: objective count mismatch");
            for (std::size_t m = 0; m < k; ++m) {
                lo[m] = std::min(lo[m], p[m]);
                hi[m] = std::max(hi[m], p[m]);
            }
        }
    std::vector<NormalizedFront> out;
    out.reserve(fronts.size());
    for (const auto& f : fronts) out.push_back({normalize(f, lo, hi), lo, hi});
    return out;
}

/// For each objective, the first point holding its minimum.
inline Front extreme_points(std::span<const ObjectiveVector> points) {
    if (points.empty()) return {};
    const std::size_t k = points.front().size();
    Front out;
    for (std::size_t m = 0; m < k; ++m) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < points.size(); ++i)
            if (points[i][m] < points[best][m]) best = i;
        out.push_back(points[best]);
    }
    return out;
}

namespace detail {

inline double euclid(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

/// FASTMAP axis through the front: start from the lexicographically smallest
/// point so the result does not depend on input order.
inline std::pair<std::size_t, std::size_t> front_axis(std::span<const ObjectiveVector> pts) {
    auto furthest_from = [&](std::size_t from) {
        std::size_t best = from;
        double best_d = -1;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double d = euclid(pts[from], pts[i]);
            if (d > best_d || (d == best_d && pts[i] < pts[best])) {
                best_d = d;
                best = i;
            }
        }
        return best;
    };
    const auto anchor = static_cast<std::size_t>(
        std::min_element(pts.begin(), pts.end()) - pts.begin());
    const std::size_t east = furthest_from(anchor);
    const std::size_t west = furthest_from(east);
    return {west, east};
}

}  // namespace detail

/// Deb's spread on a normalized front. Points are ordered along the line
/// joining two far-apart members; d_f and d_l are the gaps from the ends of
/// that ordering to the reference extremes nearest them along the same line.
/// Without reference extremes both gaps are zero.
inline double spread(std::span<const ObjectiveVector> front,
                     std::span<const ObjectiveVector> extremes = {}) {
    const std::size_t n = front.size();
    if (n < 2) throw UndefinedIndicator("spread: needs at least two points");
    const auto [w, e] = detail::front_axis(front);
    const auto& W = front[w];
    const auto& E = front[e];
    const std::size_t k = W.size();
    std::vector<double> axis(k);
    for (std::size_t m = 0; m < k; ++m) axis[m] = E[m] - W[m];
    auto project = [&](std::span<const double> p) {
        double s = 0;
        for (std::size_t m = 0; m < k; ++m) s += axis[m] * (p[m] - W[m]);
        return s;
    };

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> proj(n);
    for (std::size_t i = 0; i < n; ++i) proj[i] = project(front[i]);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return proj[a] != proj[b] ? proj[a] < proj[b] : front[a] < front[b];
    });

    std::vector<double> gaps(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
        gaps[i] = detail::euclid(front[order[i]], front[order[i + 1]]);
    const double mean = std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(n - 1);

    double df = 0, dl = 0;
    if (!extremes.empty()) {
        std::size_t lo = 0, hi = 0;
        for (std::size_t i = 1; i < extremes.size(); ++i) {
            if (project(extremes[i]) < project(extremes[lo])) lo = i;
            if (project(extremes[i]) > project(extremes[hi])) hi = i;
        }
        df = detail::euclid(extremes[lo], front[order.front()]);
        dl = detail::euclid(extremes[hi], front[order.back()]);
    }
    double dev = 0;
    for (double g : gaps) dev += std::abs(g - mean);
    const double denom = df + dl + static_cast<double>(n - 1) * mean;
    if (!(denom > 0)) throw UndefinedIndicator("spread: all points coincide");
    return (df + dl + dev) / denom;
}

namespace detail {

inline bool weakly_dominates(std::span<const double> a, std::span<const double> b, std::size_t k) {
    for (std::size_t m = 0; m < k; ++m)
        if (a[m] > b[m]) return false;
    return true;
}

/// Points not weakly dominated by another (first copy of duplicates kept),
/// looking only at the first k objectives.
inline Front filter_front(const Front& pts, std::size_t k) {
    Front out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool beaten = false;
        for (std::size_t j = 0; j < pts.size() && !beaten; ++j) {
            if (i == j) continue;
            if (weakly_dominates(pts[j], pts[i], k))
                beaten = !weakly_dominates(pts[i], pts[j], k) || j < i;
        }
        if (!beaten) out.push_back(pts[i]);
    }
    return out;
}

/// Exact volume dominated by `pts` (first k coordinates) below `ref`, by
/// slicing along the last coordinate.
inline double hv_recursive(Front pts, std::span<const double> ref, std::size_t k) {
    if (pts.empty()) return 0.0;
    if (k == 1) {
        double best = ref[0];
        for (const auto& p : pts) best = std::min(best, p[0]);
        return ref[0] - best;
    }
    pts = filter_front(pts, k);
    const std::size_t last = k - 1;
    std::sort(pts.begin(), pts.end(), [&](const auto& a, const auto& b) { return a[last] < b[last]; });
    if (k == 2) {
        double vol = 0, prev_x = ref[0];
        for (const auto& p : pts) {  // ascending y means descending x on a filtered front
            vol += (prev_x - p[0]) * (ref[1] - p[1]);
            prev_x = p[0];
        }
        return vol;
    }
    double vol = 0;
    Front slice;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        slice.push_back(pts[i]);
        const double top = i + 1 < pts.size() ? pts[i + 1][last] : ref[last];
        const double depth = top - pts[i][last];
        if (depth > 0) vol += depth * hv_recursive(slice, ref, k - 1);
    }
    return vol;
}

}  // namespace detail

/// Exact hypervolume of a minimization-form front against `reference`.
inline double hypervolume(std::span<const ObjectiveVector> front, std::span<const double> reference) {
    if (reference.empty()) throw ContractError("hypervolume: empty reference point");
    for (const auto& p : front) {
        if (p.size() != reference.size()) throw ContractError("hypervolume: dimension mismatch");
        for (std::size_t m = 0; m < p.size(); ++m)
            if (!(p[m] <= reference[m])) throw ContractError("hypervolume: point beyond reference");
    }
    return detail::hv_recursive(Front(front.begin(), front.end()), reference, reference.size());
}

inline constexpr double kHypervolumeReference = 1.1;

inline double hypervolume_normalized(std::span<const ObjectiveVector> front) {
    if (front.empty()) return 0.0;
    const std::vector<double> ref(front.front().size(), kHypervolumeReference);
    return hypervolume(front, ref);
}

}  // namespace swaylab
