#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "swaylab/core.hpp"

namespace swaylab::stats {

inline double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw ContractError("quantile: empty sample");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline double median(std::span<const double> v) { return quantile({v.begin(), v.end()}, 0.5); }

inline double iqr(std::span<const double> v) {
    std::vector<double> c(v.begin(), v.end());
    return quantile(c, 0.75) - quantile(c, 0.25);
}

/// Vargha-Delaney A: probability that a draw from x exceeds one from y, ties
/// counted half.
inline double a12(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || y.empty()) throw ContractError("a12: empty sample");
    double more = 0, same = 0;
    for (double a : x)
        for (double b : y) {
            if (a > b) more += 1;
            else if (a == b) same += 1;
        }
    return (more + 0.5 * same) / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

inline constexpr double kSmallEffect = 0.6;
inline constexpr std::size_t kDefaultResamples = 1000;

/// Bootstrap test on the difference of medians. Under the null both samples
/// are shifted onto the pooled median and resampled separately; the
/// difference is significant when the shifted replicates reach the observed
/// gap less than (1 - confidence) of the time.
inline bool bootstrap_different(std::span<const double> x, std::span<const double> y,
                                double confidence = 0.95, std::size_t resamples = kDefaultResamples,
                                std::uint64_t seed = 1) {
    if (x.size() < 2 || y.size() < 2) throw ContractError("bootstrap: need at least two samples each");
    if (!(confidence > 0 && confidence < 1)) throw ContractError("bootstrap: confidence outside (0,1)");
    const double mx = median(x), my = median(y);
    const double observed = std::abs(mx - my);
    if (observed == 0) return false;

    std::vector<double> pooled(x.begin(), x.end());
    pooled.insert(pooled.end(), y.begin(), y.end());
    const double centre = median(pooled);
    std::vector<double> xs, ys;
    for (double v : x) xs.push_back(v - mx + centre);
    for (double v : y) ys.push_back(v - my + centre);

    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> px(0, xs.size() - 1), py(0, ys.size() - 1);
    std::vector<double> bx(xs.size()), by(ys.size());
    std::size_t reached = 0;
    for (std::size_t b = 0; b < resamples; ++b) {
        for (auto& v : bx) v = xs[px(rng)];
        for (auto& v : by) v = ys[py(rng)];
        // Tolerance keeps float noise from the recentring out of the count.
        if (std::abs(median(bx) - median(by)) >= observed * (1 - 1e-12)) ++reached;
    }
    return static_cast<double>(reached) / static_cast<double>(resamples) < 1 - confidence;
}

enum class Direction { lower_better, higher_better };

struct Treatment {
    std::string name;
    std::vector<double> samples;
};

struct RankRow {
    int rank = 1;
    std::string name;
    double median = 0;
    double iqr = 0;
    bool close_to_top = false;
};

/// Rows ordered best first; ranks start at 1 and are contiguous.
using RankTable = std::vector<RankRow>;

struct ScottKnottOptions {
    double confidence = 0.95;
    std::size_t resamples = kDefaultResamples;
    std::uint64_t seed = 1;
    double small_effect = kSmallEffect;
    double close_fraction = 0.05;  // "reasonably close" to the top median
};

/// True when two groups pass both gates: bootstrap-different and an effect
/// size of at least `small_effect` in either direction.
inline bool distinguishable(std::span<const double> a, std::span<const double> b,
                            const ScottKnottOptions& opt) {
    const double effect = a12(a, b);
    if (std::max(effect, 1 - effect) < opt.small_effect) return false;
    return bootstrap_different(a, b, opt.confidence, opt.resamples, opt.seed);
}

inline RankTable scott_knott(std::vector<Treatment> treatments, Direction direction,
                             const ScottKnottOptions& opt = {}) {
    if (treatments.empty()) throw ContractError("scott_knott: no treatments");
    for (const auto& t : treatments)
        if (t.samples.empty()) throw ContractError("scott_knott: treatment '" + t.name + "' has no samples");

    std::vector<double> med;
    for (const auto& t : treatments) med.push_back(median(t.samples));
    std::vector<std::size_t> order(treatments.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return direction == Direction::lower_better ? med[a] < med[b] : med[a] > med[b];
    });

    auto pooled = [&](std::size_t lo, std::size_t hi) {
        std::vector<double> out;
        for (std::size_t i = lo; i < hi; ++i) {
            const auto& s = treatments[order[i]].samples;
            out.insert(out.end(), s.begin(), s.end());
        }
        return out;
    };

    std::vector<int> group(order.size(), 0);
    int next_group = 0;
    auto divide = [&](std::size_t lo, std::size_t hi, auto& self) -> void {
        if (hi - lo > 1) {
            // Cut maximizing between-group sum of squares of sample-weighted medians.
            double total_n = 0, total = 0;
            for (std::size_t i = lo; i < hi; ++i) {
                const auto n = static_cast<double>(treatments[order[i]].samples.size());
                total_n += n;
                total += n * med[order[i]];
            }
            const double mu = total / total_n;
            double best = -1, left_n = 0, left = 0;
            std::size_t cut = lo;
            for (std::size_t c = lo + 1; c < hi; ++c) {
                const auto n = static_cast<double>(treatments[order[c - 1]].samples.size());
                left_n += n;
                left += n * med[order[c - 1]];
                const double ml = left / left_n;
                const double mr = (total - left) / (total_n - left_n);
                const double ss = left_n * (ml - mu) * (ml - mu) + (total_n - left_n) * (mr - mu) * (mr - mu);
                if (ss > best) {
                    best = ss;
                    cut = c;
                }
            }
            const auto a = pooled(lo, cut), b = pooled(cut, hi);
            if (a.size() >= 2 && b.size() >= 2 && distinguishable(a, b, opt)) {
                self(lo, cut, self);
                self(cut, hi, self);
                return;
            }
        }
        for (std::size_t i = lo; i < hi; ++i) group[i] = next_group;
        ++next_group;
    };
    divide(0, order.size(), divide);

    // Recursion only tests each cut against its whole sibling; neighbouring
    // ranks from different branches may still fail the gates, so merge them.
    for (bool merged = true; merged;) {
        merged = false;
        std::size_t start = 0;
        while (start < group.size()) {
            std::size_t mid = start;
            while (mid < group.size() && group[mid] == group[start]) ++mid;
            if (mid == group.size()) break;
            std::size_t end = mid;
            while (end < group.size() && group[end] == group[mid]) ++end;
            if (!distinguishable(pooled(start, mid), pooled(mid, end), opt)) {
                for (std::size_t i = mid; i < group.size(); ++i) --group[i];
                merged = true;
                break;
            }
            start = mid;
        }
    }

    RankTable table;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& t = treatments[order[i]];
        table.push_back({group[i] + 1, t.name, med[order[i]], iqr(t.samples), false});
    }
    const double top = table.front().median;
    for (auto& row : table)
        row.close_to_top = std::abs(row.median - top) <= opt.close_fraction * std::abs(top);
    return table;
}

}  // namespace swaylab::stats
