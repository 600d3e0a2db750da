#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "swaylab/core.hpp"

namespace swaylab {

struct MoeaConfig {
    std::size_t pop_size = 100;
    std::size_t max_evals = 2000;
    double crossover_prob = 0.9;
    /// Per-variable mutation probability; 1/|dims| when unset.
    std::optional<double> mutation_prob;
    double eta_crossover = 30.0;
    double eta_mutation = 20.0;
    std::uint64_t seed = 0;
    /// Generation-0 seeds. Missing slots are filled by random sampling; extra
    /// seeds beyond pop_size are ignored.
    Population initial_pop;

    void validate() const {
        if (pop_size < 2) throw ContractError("moea: pop_size must be >= 2");
        if (max_evals < pop_size) throw ContractError("moea: max_evals must be >= pop_size");
    }
};

struct MoeaResult {
    Population front;
    Population population;
    std::size_t generations = 0;
};

/// Non-domination bands, best first; each entry indexes the sorted population.
using FrontBands = std::vector<std::vector<std::size_t>>;

/// Deb's fast non-dominated sort under constrained domination.
inline FrontBands fast_nondominated_sort(std::span<const Candidate> pop) {
    for (const auto& c : pop)
        if (!c.evaluated()) throw ContractError("fast_nondominated_sort: unevaluated candidate");
    const std::size_t n = pop.size();
    std::vector<std::vector<std::size_t>> beats(n);
    std::vector<std::size_t> beaten_by(n, 0);
    FrontBands bands;
    std::vector<std::size_t> current;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            if (constrained_dominates(pop[p], pop[q])) {
                beats[p].push_back(q);
                ++beaten_by[q];
            } else if (constrained_dominates(pop[q], pop[p])) {
                beats[q].push_back(p);
                ++beaten_by[p];
            }
        }
    }
    for (std::size_t p = 0; p < n; ++p)
        if (beaten_by[p] == 0) current.push_back(p);
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (auto p : current)
            for (auto q : beats[p])
                if (--beaten_by[q] == 0) next.push_back(q);
        std::sort(next.begin(), next.end());
        bands.push_back(std::move(current));
        current = std::move(next);
    }
    return bands;
}

/// Crowding distance of every member of `band` (indices into `pop`), in band order.
inline std::vector<double> crowding_distance(std::span<const Candidate> pop,
                                             std::span<const std::size_t> band) {
    const std::size_t n = band.size();
    std::vector<double> dist(n, 0.0);
    if (n == 0) return dist;
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (n <= 2) {
        std::fill(dist.begin(), dist.end(), inf);
        return dist;
    }
    const std::size_t k = pop[band[0]].objectives->size();
    std::vector<std::size_t> order(n);
    for (std::size_t m = 0; m < k; ++m) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        auto obj = [&](std::size_t i) -> const ObjectiveVector& { return *pop[band[i]].objectives; };
        // Lexicographic tie-break keeps the result independent of input order.
        std::sort(order.begin(), order.end(), [&](auto a, auto b) {
            if (obj(a)[m] != obj(b)[m]) return obj(a)[m] < obj(b)[m];
            return obj(a) < obj(b);
        });
        const double lo = obj(order.front())[m];
        const double hi = obj(order.back())[m];
        dist[order.front()] = inf;
        dist[order.back()] = inf;
        if (hi <= lo) continue;
        for (std::size_t i = 1; i + 1 < n; ++i)
            dist[order[i]] += (obj(order[i + 1])[m] - obj(order[i - 1])[m]) / (hi - lo);
    }
    return dist;
}

namespace detail {

inline double sbx_betaq(double u, double alpha, double eta) {
    return u <= 1.0 / alpha ? std::pow(u * alpha, 1.0 / (eta + 1.0))
                            : std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
}

}  // namespace detail

/// Produces two children from two parents. Continuous dims use simulated-binary
/// crossover and polynomial mutation; integer dims use uniform crossover and
/// random-reset mutation. Children are clipped into the schema bounds.
inline std::pair<std::vector<double>, std::vector<double>> variation(
    std::span<const double> p1, std::span<const double> p2, const DecisionSchema& schema,
    const MoeaConfig& config, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> c1(p1.begin(), p1.end());
    std::vector<double> c2(p2.begin(), p2.end());
    const std::size_t dims = schema.size();
    const double pm = config.mutation_prob.value_or(1.0 / static_cast<double>(dims));
    const double eta_c = config.eta_crossover;

    if (unit(rng) < config.crossover_prob) {
        for (std::size_t i = 0; i < dims; ++i) {
            const auto& d = schema[i];
            if (d.kind == DimKind::integer) {
                if (unit(rng) < 0.5) std::swap(c1[i], c2[i]);
                continue;
            }
            if (unit(rng) >= 0.5 || std::abs(p1[i] - p2[i]) <= 1e-14) continue;
            const double y1 = std::min(p1[i], p2[i]);
            const double y2 = std::max(p1[i], p2[i]);
            const double u = unit(rng);
            double beta = 1.0 + 2.0 * (y1 - d.low) / (y2 - y1);
            double alpha = 2.0 - std::pow(beta, -(eta_c + 1.0));
            double a = 0.5 * ((y1 + y2) - detail::sbx_betaq(u, alpha, eta_c) * (y2 - y1));
            beta = 1.0 + 2.0 * (d.high - y2) / (y2 - y1);
            alpha = 2.0 - std::pow(beta, -(eta_c + 1.0));
            double b = 0.5 * ((y1 + y2) + detail::sbx_betaq(u, alpha, eta_c) * (y2 - y1));
            a = std::clamp(a, d.low, d.high);
            b = std::clamp(b, d.low, d.high);
            if (unit(rng) < 0.5) std::swap(a, b);
            c1[i] = a;
            c2[i] = b;
        }
    }

    auto mutate = [&](std::vector<double>& x) {
        if (pm <= 0.0) return;
        for (std::size_t i = 0; i < dims; ++i) {
            const auto& d = schema[i];
            if (d.span() <= 0 || unit(rng) >= pm) continue;
            if (d.kind == DimKind::integer) {
                std::uniform_int_distribution<long long> reset(static_cast<long long>(d.low),
                                                               static_cast<long long>(d.high));
                x[i] = static_cast<double>(reset(rng));
                continue;
            }
            const double eta = config.eta_mutation;
            const double delta1 = (x[i] - d.low) / d.span();
            const double delta2 = (d.high - x[i]) / d.span();
            const double u = unit(rng);
            const double power = 1.0 / (eta + 1.0);
            double deltaq;
            if (u < 0.5) {
                const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - delta1, eta + 1.0);
                deltaq = std::pow(val, power) - 1.0;
            } else {
                const double val =
                    2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - delta2, eta + 1.0);
                deltaq = 1.0 - std::pow(val, power);
            }
            x[i] = std::clamp(x[i] + deltaq * d.span(), d.low, d.high);
        }
    };
    mutate(c1);
    mutate(c2);
    schema.repair(c1);
    schema.repair(c2);
    return {std::move(c1), std::move(c2)};
}

namespace detail {

/// Generation 0: seeds first, then random fill; evaluates everything once.
inline Population initial_population(Problem& problem, const MoeaConfig& config, Rng& rng) {
    Population pop;
    pop.reserve(config.pop_size);
    for (const auto& seed : config.initial_pop) {
        if (pop.size() == config.pop_size) break;
        pop.push_back(seed);
    }
    while (pop.size() < config.pop_size)
        pop.emplace_back(random_decisions(problem.schema(), rng));
    for (auto& c : pop) problem.evaluate(c);
    return pop;
}

template <class Better>
Population breed(Problem& problem, std::span<const Candidate> parents, std::size_t count,
                 const MoeaConfig& config, Rng& rng, Better better) {
    std::uniform_int_distribution<std::size_t> pick(0, parents.size() - 1);
    auto tournament = [&]() -> const Candidate& {
        const std::size_t a = pick(rng);
        const std::size_t b = pick(rng);
        return better(b, a) ? parents[b] : parents[a];
    };
    Population out;
    out.reserve(count + 1);
    while (out.size() < count) {
        const auto& p1 = tournament();
        const auto& p2 = tournament();
        auto [x1, x2] = variation(p1.decisions, p2.decisions, problem.schema(), config, rng);
        out.emplace_back(std::move(x1));
        if (out.size() < count) out.emplace_back(std::move(x2));
    }
    for (auto& c : out) problem.evaluate(c);
    return out;
}

class BudgetScope {
public:
    BudgetScope(Problem& problem, std::size_t max_evals)
        : problem_(problem), saved_(problem.budget()) {
        problem_.set_budget(max_evals);
    }
    ~BudgetScope() { problem_.set_budget(saved_); }
    BudgetScope(const BudgetScope&) = delete;
    BudgetScope& operator=(const BudgetScope&) = delete;

private:
    Problem& problem_;
    std::optional<std::size_t> saved_;
};

}  // namespace detail

/// NSGA-II. The evaluation counter (which may already hold evaluations from a
/// seeding stage) never exceeds config.max_evals; a generation only runs when
/// the whole offspring batch fits.
inline MoeaResult nsga2(Problem& problem, const MoeaConfig& config) {
    config.validate();
    detail::BudgetScope scope(problem, config.max_evals);
    Rng rng(config.seed);
    MoeaResult result;
    Population pop = detail::initial_population(problem, config, rng);

    std::vector<std::size_t> rank(pop.size());
    std::vector<double> crowd(pop.size());
    auto annotate = [&](const Population& p) {
        rank.assign(p.size(), 0);
        crowd.assign(p.size(), 0.0);
        const auto bands = fast_nondominated_sort(p);
        for (std::size_t b = 0; b < bands.size(); ++b) {
            const auto d = crowding_distance(p, bands[b]);
            for (std::size_t i = 0; i < bands[b].size(); ++i) {
                rank[bands[b][i]] = b;
                crowd[bands[b][i]] = d[i];
            }
        }
    };
    annotate(pop);

    while (problem.budget_left(config.pop_size)) {
        auto offspring = detail::breed(problem, pop, config.pop_size, config, rng,
                                       [&](std::size_t a, std::size_t b) {
                                           if (rank[a] != rank[b]) return rank[a] < rank[b];
                                           return crowd[a] > crowd[b];
                                       });
        Population merged = std::move(pop);
        merged.insert(merged.end(), std::make_move_iterator(offspring.begin()),
                      std::make_move_iterator(offspring.end()));
        const auto bands = fast_nondominated_sort(merged);
        Population next;
        next.reserve(config.pop_size);
        for (const auto& band : bands) {
            if (next.size() + band.size() <= config.pop_size) {
                for (auto i : band) next.push_back(merged[i]);
                continue;
            }
            const auto d = crowding_distance(merged, band);
            std::vector<std::size_t> order(band.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(),
                             [&](auto a, auto b) { return d[a] > d[b]; });
            for (std::size_t i = 0; next.size() < config.pop_size; ++i)
                next.push_back(merged[band[order[i]]]);
            break;
        }
        pop = std::move(next);
        annotate(pop);
        ++result.generations;
    }

    const auto bands = fast_nondominated_sort(pop);
    for (auto i : bands.front()) result.front.push_back(pop[i]);
    result.population = std::move(pop);
    return result;
}

namespace detail {

/// Pairwise objective distances after min-max scaling over the given set.
inline std::vector<std::vector<double>> scaled_distances(std::span<const Candidate> pop) {
    const std::size_t n = pop.size();
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    if (n == 0) return dist;
    const std::size_t k = pop[0].objectives->size();
    std::vector<double> lo(k, std::numeric_limits<double>::infinity());
    std::vector<double> hi(k, -std::numeric_limits<double>::infinity());
    for (const auto& c : pop)
        for (std::size_t m = 0; m < k; ++m) {
            lo[m] = std::min(lo[m], (*c.objectives)[m]);
            hi[m] = std::max(hi[m], (*c.objectives)[m]);
        }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t m = 0; m < k; ++m) {
                const double range = hi[m] - lo[m];
                if (range <= 0) continue;
                const double d = ((*pop[i].objectives)[m] - (*pop[j].objectives)[m]) / range;
                s += d * d;
            }
            dist[i][j] = dist[j][i] = std::sqrt(s);
        }
    return dist;
}

}  // namespace detail

/// SPEA2 fitness: raw strength-based fitness plus k-th nearest neighbour density.
/// Values below 1 mark non-dominated members.
inline std::vector<double> spea2_fitness(std::span<const Candidate> pop) {
    const std::size_t n = pop.size();
    std::vector<std::size_t> strength(n, 0);
    std::vector<std::vector<char>> dom(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && constrained_dominates(pop[i], pop[j])) {
                dom[i][j] = 1;
                ++strength[i];
            }
    const auto dist = detail::scaled_distances(pop);
    const std::size_t k = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    std::vector<double> fitness(n, 0.0);
    std::vector<double> row;
    for (std::size_t i = 0; i < n; ++i) {
        double raw = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (dom[j][i]) raw += static_cast<double>(strength[j]);
        row.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) row.push_back(dist[i][j]);
        double sigma = 0.0;
        if (!row.empty()) {
            const std::size_t kth = std::min(k, row.size()) - (k > 0 ? 1 : 0);
            std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(kth), row.end());
            sigma = row[kth];
        }
        fitness[i] = raw + 1.0 / (sigma + 2.0);
    }
    return fitness;
}

/// SPEA2 environmental selection: keeps the non-dominated members, fills with
/// the fittest dominated ones, or truncates by iteratively dropping the member
/// with the lexicographically smallest sorted neighbour-distance list.
/// Returns indices into `pop`, ascending.
inline std::vector<std::size_t> spea2_select(std::span<const Candidate> pop,
                                             std::span<const double> fitness,
                                             std::size_t archive_size) {
    const std::size_t n = pop.size();
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < n; ++i)
        if (fitness[i] < 1.0) chosen.push_back(i);

    if (chosen.size() < archive_size) {
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < n; ++i)
            if (fitness[i] >= 1.0) rest.push_back(i);
        std::stable_sort(rest.begin(), rest.end(),
                         [&](auto a, auto b) { return fitness[a] < fitness[b]; });
        for (std::size_t i = 0; i < rest.size() && chosen.size() < archive_size; ++i)
            chosen.push_back(rest[i]);
        std::sort(chosen.begin(), chosen.end());
        return chosen;
    }
    if (chosen.size() == archive_size) return chosen;

    Population front;
    for (auto i : chosen) front.push_back(pop[i]);
    const auto dist = detail::scaled_distances(front);
    const std::size_t m = front.size();
    // neighbours[i]: (distance, j) pairs sorted ascending, kept in sync on removal.
    std::vector<std::vector<std::pair<double, std::size_t>>> neighbours(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j)
            if (j != i) neighbours[i].emplace_back(dist[i][j], j);
        std::sort(neighbours[i].begin(), neighbours[i].end());
    }
    std::vector<char> alive(m, 1);
    std::size_t remaining = m;
    auto less = [&](std::size_t a, std::size_t b) {
        const auto& na = neighbours[a];
        const auto& nb = neighbours[b];
        for (std::size_t t = 0; t < na.size() && t < nb.size(); ++t) {
            if (na[t].first < nb[t].first) return true;
            if (na[t].first > nb[t].first) return false;
        }
        return false;
    };
    while (remaining > archive_size) {
        std::size_t victim = m;
        for (std::size_t i = 0; i < m; ++i) {
            if (!alive[i]) continue;
            if (victim == m || less(i, victim)) victim = i;
        }
        alive[victim] = 0;
        --remaining;
        for (std::size_t i = 0; i < m; ++i) {
            if (!alive[i]) continue;
            std::erase_if(neighbours[i], [&](const auto& p) { return p.second == victim; });
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < m; ++i)
        if (alive[i]) out.push_back(chosen[i]);
    return out;
}

/// SPEA2 with archive size equal to the population size.
inline MoeaResult spea2(Problem& problem, const MoeaConfig& config) {
    config.validate();
    detail::BudgetScope scope(problem, config.max_evals);
    Rng rng(config.seed);
    MoeaResult result;
    Population pop = detail::initial_population(problem, config, rng);
    Population archive;

    for (;;) {
        Population merged = std::move(pop);
        merged.insert(merged.end(), archive.begin(), archive.end());
        const auto fitness = spea2_fitness(merged);
        const auto keep = spea2_select(merged, fitness, config.pop_size);
        Population next;
        std::vector<double> next_fitness;
        for (auto i : keep) {
            next.push_back(merged[i]);
            next_fitness.push_back(fitness[i]);
        }
        archive = std::move(next);
        if (!problem.budget_left(config.pop_size)) break;
        pop = detail::breed(problem, archive, config.pop_size, config, rng,
                            [&](std::size_t a, std::size_t b) {
                                return next_fitness[a] < next_fitness[b];
                            });
        ++result.generations;
    }

    result.front = nondominated(archive);
    result.population = std::move(archive);
    return result;
}

}  // namespace swaylab
