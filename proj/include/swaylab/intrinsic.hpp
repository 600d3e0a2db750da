#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "swaylab/core.hpp"
#include "swaylab/metrics.hpp"

namespace swaylab {

using PointCloud = std::vector<std::vector<double>>;

struct CorrelationCurve {
    std::vector<double> radii;
    std::vector<double> values;
};

/// All unordered pairwise Euclidean distances, sorted ascending.
inline std::vector<double> pairwise_distances(std::span<const std::vector<double>> points) {
    if (points.size() < 2) throw ContractError("pairwise distances: need at least two points");
    std::vector<double> d;
    d.reserve(points.size() * (points.size() - 1) / 2);
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) d.push_back(detail::euclid(points[i], points[j]));
    std::sort(d.begin(), d.end());
    return d;
}

/// Share of pairs strictly closer than r, from pre-sorted pairwise distances.
inline double correlation_from_sorted(std::span<const double> sorted, double r) {
    const auto below = std::lower_bound(sorted.begin(), sorted.end(), r) - sorted.begin();
    return static_cast<double>(below) / static_cast<double>(sorted.size());
}

inline double correlation_integral(std::span<const std::vector<double>> points, double r) {
    if (points.size() < 2) throw ContractError("correlation integral: need at least two points");
    if (!(r > 0)) throw ContractError("correlation integral: radius must be positive");
    std::size_t close = 0, pairs = 0;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j, ++pairs)
            if (detail::euclid(points[i], points[j]) < r) ++close;
    return static_cast<double>(close) / static_cast<double>(pairs);
}

inline std::vector<double> log_radii(double r0, double rmax, std::size_t steps) {
    if (!(r0 > 0) || !(r0 < rmax)) throw ContractError("radii: need 0 < r0 < rmax");
    if (steps < 2) throw ContractError("radii: need at least two steps");
    std::vector<double> r(steps);
    const double a = std::log(r0), b = std::log(rmax);
    for (std::size_t i = 0; i < steps; ++i)
        r[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(steps - 1));
    return r;
}

inline CorrelationCurve correlation_curve(std::span<const std::vector<double>> points,
                                          std::span<const double> radii) {
    const auto d = pairwise_distances(points);
    CorrelationCurve c;
    for (double r : radii) {
        c.radii.push_back(r);
        c.values.push_back(correlation_from_sorted(d, r));
    }
    return c;
}

/// Default radius window, as quantiles of the pairwise-distance distribution.
/// Small radii keep the estimate inside the scaling regime; near the diameter
/// C(r) saturates and the slope collapses.
inline constexpr double kRadiusLowQuantile = 0.005;
inline constexpr double kRadiusHighQuantile = 0.05;
inline constexpr std::size_t kRadiusSteps = 10;

/// Mean slope of ln C(r) against ln r over log-spaced radii, skipping radii
/// where C(r) = 0. Throws UndefinedIndicator when fewer than two radii remain.
inline double intrinsic_dimension(std::span<const std::vector<double>> points,
                                  std::optional<double> r0 = std::nullopt,
                                  std::optional<double> rmax = std::nullopt,
                                  std::size_t steps = kRadiusSteps) {
    const auto d = pairwise_distances(points);
    auto at = [&](double q) { return d[static_cast<std::size_t>(q * static_cast<double>(d.size() - 1))]; };
    const double lo = r0.value_or(at(kRadiusLowQuantile));
    const double hi = rmax.value_or(at(kRadiusHighQuantile));
    if (!(lo > 0) || !(lo < hi)) throw UndefinedIndicator("intrinsic dimension: degenerate radius window");

    std::vector<double> lr, lc;
    for (double r : log_radii(lo, hi, steps)) {
        const double c = correlation_from_sorted(d, r);
        if (c <= 0) continue;
        lr.push_back(std::log(r));
        lc.push_back(std::log(c));
    }
    if (lr.size() < 2) throw UndefinedIndicator("intrinsic dimension: C(r) is zero on the window");
    double sum = 0;
    for (std::size_t i = 1; i < lr.size(); ++i) sum += (lc[i] - lc[i - 1]) / (lr[i] - lr[i - 1]);
    return std::max(0.0, sum / static_cast<double>(lr.size() - 1));
}

}  // namespace swaylab
