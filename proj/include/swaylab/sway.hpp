#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "swaylab/core.hpp"

namespace swaylab {

/// Result of one bi-clustering step. Indices refer to the candidate sequence
/// handed to the split function.
struct SplitResult {
    std::size_t west = 0;
    std::size_t east = 0;
    std::vector<std::size_t> west_items;
    std::vector<std::size_t> east_items;
};

/// Per-bucket splits of a workload-grouped population. Buckets that cannot be
/// split (a single candidate, or all decisions identical) land in `leaves`.
struct DiscreteSplit {
    std::vector<SplitResult> splits;
    std::vector<std::vector<std::size_t>> leaves;
};

enum class SplitStrategy { continuous, monrp_workload };

struct SwayConfig {
    /// Leaf cutoff; defaults to sqrt of the initial population size.
    std::optional<double> epsilon;
    SplitStrategy strategy = SplitStrategy::continuous;
    /// Release count P, required by the workload strategy.
    int releases = 0;
    std::uint64_t seed = 0;
};

struct SwayResult {
    Population survivors;
    std::size_t split_calls = 0;
    std::size_t evaluations = 0;
};

enum class Verdict { west_wins, east_wins, tie };

namespace detail {

inline double normalized_distance(const DecisionSchema& schema, std::span<const double> a,
                                  std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = schema.normalized(i, a[i]) - schema.normalized(i, b[i]);
        s += d * d;
    }
    return std::sqrt(s);
}

inline std::size_t furthest(std::span<const Candidate> pop, std::span<const std::size_t> idx,
                            std::size_t from, const DecisionSchema& schema) {
    std::size_t best = idx.front();
    double best_d = -1.0;
    for (auto i : idx) {
        const double d = normalized_distance(schema, pop[from].decisions, pop[i].decisions);
        if (d > best_d) {  // strict: ties keep the lowest position
            best_d = d;
            best = i;
        }
    }
    return best;
}

/// FASTMAP split over a subset `idx` of `pop`; returned indices are into `pop`.
inline std::optional<SplitResult> split_indices(std::span<const Candidate> pop,
                                                std::span<const std::size_t> idx,
                                                const DecisionSchema& schema, Rng& rng) {
    if (idx.size() < 2) throw ContractError("split: need at least two candidates");
    std::uniform_int_distribution<std::size_t> pick(0, idx.size() - 1);
    const std::size_t anchor = idx[pick(rng)];
    const std::size_t east = furthest(pop, idx, anchor, schema);
    const std::size_t west = furthest(pop, idx, east, schema);

    const std::size_t dims = schema.size();
    std::vector<double> w(dims), axis(dims);
    double axis_len2 = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
        w[d] = schema.normalized(d, pop[west].decisions[d]);
        axis[d] = schema.normalized(d, pop[east].decisions[d]) - w[d];
        axis_len2 += axis[d] * axis[d];
    }
    if (axis_len2 <= 0.0) return std::nullopt;
    const double axis_len = std::sqrt(axis_len2);

    SplitResult out;
    out.west = west;
    out.east = east;
    for (auto i : idx) {
        double dot = 0.0;
        for (std::size_t d = 0; d < dims; ++d)
            dot += axis[d] * (schema.normalized(d, pop[i].decisions[d]) - w[d]);
        const double projected = dot / axis_len;
        (projected < 0.5 * axis_len ? out.west_items : out.east_items).push_back(i);
    }
    return out;
}

}  // namespace detail

/// Projects every candidate onto the line through two far-apart pivots and cuts
/// it at the midpoint. Returns nullopt when all decisions coincide.
inline std::optional<SplitResult> split_continuous(std::span<const Candidate> candidates,
                                                   const DecisionSchema& schema, Rng& rng) {
    std::vector<std::size_t> idx(candidates.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return detail::split_indices(candidates, idx, schema, rng);
}

/// Number of requirements scheduled in the first half of the releases
/// (0 < y_i <= ceil(P/2)); aborted requirements do not count.
inline std::size_t workload(std::span<const double> y, int releases) {
    const double half = std::ceil(releases / 2.0);
    std::size_t n = 0;
    for (double v : y)
        if (v > 0 && v <= half) ++n;
    return n;
}

/// Groups candidates by workload, merges the groups into ceil(sqrt(#groups))
/// quantile bands and returns the bands as index lists (in input order).
inline std::vector<std::vector<std::size_t>> workload_buckets(std::span<const Candidate> candidates,
                                                              int releases) {
    if (candidates.empty()) return {};
    std::vector<std::size_t> wl(candidates.size());
    std::size_t max_wl = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        wl[i] = workload(candidates[i].decisions, releases);
        max_wl = std::max(max_wl, wl[i]);
    }
    std::vector<std::size_t> group_size(max_wl + 1, 0);
    for (auto w : wl) ++group_size[w];
    const auto groups = static_cast<std::size_t>(
        std::count_if(group_size.begin(), group_size.end(), [](auto s) { return s > 0; }));
    const auto bands = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(groups))));

    // A group lands in the band containing the midpoint of its cumulative mass.
    const double n = static_cast<double>(candidates.size());
    std::vector<std::size_t> band_of(max_wl + 1, 0);
    double before = 0.0;
    for (std::size_t w = 0; w <= max_wl; ++w) {
        if (group_size[w] == 0) continue;
        const double mid = before + group_size[w] / 2.0;
        band_of[w] = std::min(bands - 1, static_cast<std::size_t>(mid * bands / n));
        before += group_size[w];
    }
    std::vector<std::vector<std::size_t>> out(bands);
    for (std::size_t i = 0; i < candidates.size(); ++i) out[band_of[wl[i]]].push_back(i);
    std::erase_if(out, [](const auto& b) { return b.empty(); });
    return out;
}

/// Workload grouping followed by a FASTMAP split inside every bucket.
inline DiscreteSplit split_discrete_monrp(std::span<const Candidate> candidates, int releases,
                                          const DecisionSchema& schema, Rng& rng) {
    DiscreteSplit out;
    for (auto& bucket : workload_buckets(candidates, releases)) {
        if (bucket.size() < 2) {
            out.leaves.push_back(std::move(bucket));
            continue;
        }
        if (auto s = detail::split_indices(candidates, bucket, schema, rng))
            out.splits.push_back(std::move(*s));
        else
            out.leaves.push_back(std::move(bucket));
    }
    return out;
}

/// Evaluates both representatives (cached evaluations are free) and compares
/// them with constrained binary domination.
inline Verdict compare_representatives(Candidate& west, Candidate& east, Problem& problem) {
    problem.evaluate(west);
    problem.evaluate(east);
    if (constrained_dominates(west, east)) return Verdict::west_wins;
    if (constrained_dominates(east, west)) return Verdict::east_wins;
    return Verdict::tie;
}

/// Recursive bi-clustering cull: split, evaluate the two pivots, drop the half
/// whose pivot is dominated, recurse on what is left until clusters fall below
/// epsilon. Never creates candidates; only pivots get evaluated.
inline SwayResult sway(Problem& problem, Population candidates, const SwayConfig& config) {
    if (candidates.empty()) throw ContractError("sway: empty candidate list");
    if (config.strategy == SplitStrategy::monrp_workload && config.releases < 1)
        throw ContractError("sway: workload strategy needs releases >= 1");
    const double eps = config.epsilon.value_or(std::sqrt(static_cast<double>(candidates.size())));
    if (eps < 1.0) throw ContractError("sway: epsilon must be >= 1");

    const auto& schema = problem.schema();
    const std::size_t evals_before = problem.evaluations();
    Rng rng(config.seed);
    SwayResult result;
    std::vector<std::size_t> kept;

    auto settle = [&](SplitResult split, auto& self) -> void {
        ++result.split_calls;
        switch (compare_representatives(candidates[split.west], candidates[split.east], problem)) {
            case Verdict::west_wins: self(std::move(split.west_items), self); break;
            case Verdict::east_wins: self(std::move(split.east_items), self); break;
            case Verdict::tie:
                self(std::move(split.west_items), self);
                self(std::move(split.east_items), self);
                break;
        }
    };

    auto recurse = [&](std::vector<std::size_t> idx, auto& self) -> void {
        if (static_cast<double>(idx.size()) < eps || idx.size() < 2) {
            kept.insert(kept.end(), idx.begin(), idx.end());
            return;
        }
        auto split = detail::split_indices(candidates, idx, schema, rng);
        if (!split) {
            kept.insert(kept.end(), idx.begin(), idx.end());
            return;
        }
        settle(std::move(*split), self);
    };

    if (config.strategy == SplitStrategy::monrp_workload) {
        auto root = split_discrete_monrp(candidates, config.releases, schema, rng);
        for (auto& leaf : root.leaves) kept.insert(kept.end(), leaf.begin(), leaf.end());
        for (auto& split : root.splits) {
            const std::size_t size = split.west_items.size() + split.east_items.size();
            if (static_cast<double>(size) < eps) {
                kept.insert(kept.end(), split.west_items.begin(), split.west_items.end());
                kept.insert(kept.end(), split.east_items.begin(), split.east_items.end());
                continue;
            }
            settle(std::move(split), recurse);
        }
    } else {
        std::vector<std::size_t> all(candidates.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        recurse(std::move(all), recurse);
    }

    result.survivors.reserve(kept.size());
    for (auto i : kept) result.survivors.push_back(std::move(candidates[i]));
    result.evaluations = problem.evaluations() - evals_before;
    return result;
}

/// Samples `population` random candidates and runs SWAY over them.
inline SwayResult sway_sampled(Problem& problem, std::size_t population, std::uint64_t seed,
                               SplitStrategy strategy = SplitStrategy::continuous,
                               int releases = 0) {
    auto pop = random_population(problem, population, seed);
    SwayConfig cfg;
    cfg.strategy = strategy;
    cfg.releases = releases;
    cfg.seed = seed ^ 0x5157a1u;
    return sway(problem, std::move(pop), cfg);
}

inline constexpr std::size_t kSway2Population = 100;
inline constexpr std::size_t kSway4Population = 10'000;

}  // namespace swaylab
