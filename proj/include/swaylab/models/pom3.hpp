#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swaylab/core.hpp"

namespace swaylab::pom3 {

/// Inclusive bounds for each POM3 input. `size_choices` lists the admissible
/// base-requirement counts; the size decision indexes into it.
struct Scenario {
    std::string name;
    std::array<double, 2> culture;
    std::array<double, 2> criticality;
    std::array<double, 2> criticality_modifier;
    std::array<double, 2> initial_known;
    std::array<double, 2> inter_dependency;  // percent
    std::array<double, 2> dynamism;
    std::vector<int> size_choices;
    std::array<double, 2> team_size;
    std::array<double, 2> plan{0, 4};
};

inline Scenario pom3a() {
    return {"pom3a", {0.10, 0.90}, {0.82, 1.26}, {0.02, 0.10}, {0.40, 0.70},
            {0.0, 1.0},  {1.0, 50.0},  {3, 10, 30, 100, 300}, {1.0, 44.0}};
}

inline Scenario pom3b() {
    return {"pom3b", {0.10, 0.90}, {0.82, 1.26}, {0.80, 0.95}, {0.40, 0.70},
            {0.0, 1.0},  {1.0, 50.0},  {3, 10, 30}, {1.0, 44.0}};
}

inline Scenario pom3c() {
    return {"pom3c", {0.50, 0.90}, {0.82, 1.26}, {0.02, 0.08}, {0.20, 0.50},
            {0.0, 50.0}, {40.0, 50.0}, {30, 100, 300}, {20.0, 44.0}};
}

inline std::vector<Scenario> standard_scenarios() { return {pom3a(), pom3b(), pom3c()}; }

inline std::optional<Scenario> scenario_by_name(const std::string& name) {
    for (auto& s : standard_scenarios())
        if (s.name == name) return s;
    return std::nullopt;
}

enum class Plan { cost_ascending = 0, cost_descending, value_ascending, value_descending,
                  cost_per_value_ascending };

/// One decoded decision vector.
struct Inputs {
    double culture = 0.5;
    double criticality = 1.0;
    double criticality_modifier = 0.05;
    double initial_known = 0.5;
    double inter_dependency = 0.5;
    double dynamism = 10.0;
    int size = 30;
    Plan plan = Plan::cost_ascending;
    int team_size = 10;
};

/// Simulation constants not fixed by the model description.
struct Settings {
    int max_sprints = 8;
    double completion_target = 0.9;     // projects stop once this share of all requirements is done
    double cancel_per_sprint = 0.03;     // cancellation chance grows linearly with sprint count
    double hours_per_person = 80.0;      // two-week sprint at 40 h/week; requirement cost is in hours
    int requirements_per_team = 30;
    double discovery_rate = 0.25;        // per-sprint chance a hidden requirement surfaces
    double arrival_fraction = 0.05;      // new requirements per sprint at dynamism 50, as a share of the initial heap
    double change_sigma = 0.3;           // log-scale volatility of cost/value changes
    double senior_fraction = 0.3;
    double senior_rate = 1.6;            // junior rate is 1
    int cost_low = 1, cost_high = 100;
    int value_low = 1, value_high = 100;
};

struct Outcome {
    double completion = 0;  // completed / all requirements
    double idle = 0;        // idle hours / paid hours
    double cost = 0;        // salary- and criticality-weighted hours worked
};

namespace detail {

inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Keyed uniform draw in [0,1): the same (seed, purpose, a, b) always yields the
/// same number, so runs that differ only in their inputs share randomness.
inline double draw(std::uint64_t seed, std::uint64_t purpose, std::uint64_t a, std::uint64_t b = 0) {
    const auto h = mix(mix(mix(seed ^ mix(purpose)) ^ a) ^ (b * 0x632be59bd9b4e019ull));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

enum Purpose : std::uint64_t {
    kChildren = 1, kCost, kValue, kVisible, kSurface, kDependency, kDependencyTarget,
    kCritical, kCancel, kArrivals, kChange, kChangeCost, kChangeValue, kArrivalTeam
};

inline double normal(std::uint64_t seed, std::uint64_t purpose, std::uint64_t a, std::uint64_t b) {
    const double u1 = std::max(draw(seed, purpose, a, 2 * b), 1e-300);
    const double u2 = draw(seed, purpose, a, 2 * b + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

struct Requirement {
    double cost = 0;
    double value = 0;
    double progress = 0;
    int parent = -1;
    int tree = 0;
    int team = 0;
    int surfaces = 0;  // first sprint (0-based) in which it is visible
    bool done = false;
    std::vector<int> deps;
};

inline int uniform_int(double u, int lo, int hi) {
    return lo + std::min(hi - lo, static_cast<int>(u * (hi - lo + 1)));
}

}  // namespace detail

inline Outcome simulate(const Inputs& in, std::uint64_t seed, const Settings& cfg = {}) {
    using namespace detail;
    std::vector<Requirement> reqs;
    const int trees = std::max(1, in.size);

    auto surface_sprint = [&](std::uint64_t id) {
        if (draw(seed, kVisible, id) < in.initial_known) return 0;
        // Geometric waiting time with the per-sprint discovery rate.
        const double u = std::max(draw(seed, kSurface, id), 1e-300);
        return 1 + static_cast<int>(std::floor(std::log(u) / std::log(1.0 - cfg.discovery_rate)));
    };
    auto add = [&](int tree, int parent) {
        const auto id = static_cast<std::uint64_t>(reqs.size());
        Requirement r;
        r.cost = uniform_int(draw(seed, kCost, id), cfg.cost_low, cfg.cost_high);
        r.value = uniform_int(draw(seed, kValue, id), cfg.value_low, cfg.value_high);
        r.parent = parent;
        r.tree = tree;
        r.surfaces = surface_sprint(id);
        reqs.push_back(std::move(r));
        return static_cast<int>(id);
    };
    for (int t = 0; t < trees; ++t) {
        const int root = add(t, -1);
        const int kids = uniform_int(draw(seed, kChildren, static_cast<std::uint64_t>(root)), 0, 2);
        for (int k = 0; k < kids; ++k) {
            const int child = add(t, root);
            const int grandkids = uniform_int(draw(seed, kChildren, static_cast<std::uint64_t>(child)), 0, 1);
            for (int g = 0; g < grandkids; ++g) add(t, child);
        }
    }
    const std::size_t initial = reqs.size();

    // Cross-tree dependencies only point at earlier trees, so the graph stays acyclic.
    for (std::size_t i = 0; i < initial; ++i) {
        if (reqs[i].tree == 0) continue;
        if (draw(seed, kDependency, i) >= in.inter_dependency / 100.0) continue;
        std::size_t first_of_tree = i;
        while (first_of_tree > 0 && reqs[first_of_tree - 1].tree == reqs[i].tree) --first_of_tree;
        const auto target = static_cast<std::size_t>(draw(seed, kDependencyTarget, i) * first_of_tree);
        reqs[i].deps.push_back(static_cast<int>(std::min(target, first_of_tree - 1)));
    }

    const int teams = std::max(1, static_cast<int>(std::ceil(static_cast<double>(initial) /
                                                             cfg.requirements_per_team)));
    for (auto& r : reqs) r.team = r.tree % teams;

    // Critical teams are the ones with the smallest keyed draws.
    std::vector<int> order(static_cast<std::size_t>(teams));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return draw(seed, kCritical, static_cast<std::uint64_t>(a)) <
               draw(seed, kCritical, static_cast<std::uint64_t>(b));
    });
    const auto critical_count = static_cast<std::size_t>(std::ceil(in.criticality_modifier * teams));
    std::vector<char> critical(static_cast<std::size_t>(teams), 0);
    for (std::size_t i = 0; i < critical_count && i < order.size(); ++i)
        critical[static_cast<std::size_t>(order[i])] = 1;

    const double team_hours = in.team_size * cfg.hours_per_person;
    const double rate = (1.0 - cfg.senior_fraction) + cfg.senior_fraction * cfg.senior_rate;
    double paid = 0, idle = 0, cost = 0;
    std::vector<std::vector<int>> available(static_cast<std::size_t>(teams));

    auto ready = [&](const Requirement& r, int sprint) {
        if (r.done || r.surfaces > sprint) return false;
        if (r.parent >= 0 && !reqs[static_cast<std::size_t>(r.parent)].done) return false;
        for (int d : r.deps)
            if (!reqs[static_cast<std::size_t>(d)].done) return false;
        return true;
    };
    auto priority_less = [&](int a, int b) {
        const auto& x = reqs[static_cast<std::size_t>(a)];
        const auto& y = reqs[static_cast<std::size_t>(b)];
        double kx = 0, ky = 0;
        switch (in.plan) {
            case Plan::cost_ascending: kx = x.cost; ky = y.cost; break;
            case Plan::cost_descending: kx = -x.cost; ky = -y.cost; break;
            case Plan::value_ascending: kx = x.value; ky = y.value; break;
            case Plan::value_descending: kx = -x.value; ky = -y.value; break;
            case Plan::cost_per_value_ascending: kx = x.cost / x.value; ky = y.cost / y.value; break;
        }
        return kx != ky ? kx < ky : a < b;
    };

    for (int sprint = 0; sprint < cfg.max_sprints; ++sprint) {
        if (sprint > 0 && draw(seed, kCancel, static_cast<std::uint64_t>(sprint)) <
                              cfg.cancel_per_sprint * sprint)
            break;
        const auto finished = std::count_if(reqs.begin(), reqs.end(), [](const auto& r) { return r.done; });
        if (static_cast<double>(finished) >= cfg.completion_target * static_cast<double>(reqs.size())) break;

        // A team is on the payroll for the sprint while it has known open work.
        std::vector<double> hours(static_cast<std::size_t>(teams), 0.0);
        std::vector<char> on_payroll(static_cast<std::size_t>(teams), 0);
        for (const auto& r : reqs)
            if (!r.done && r.surfaces <= sprint) {
                hours[static_cast<std::size_t>(r.team)] = team_hours;
                on_payroll[static_cast<std::size_t>(r.team)] = 1;
            }

        // Finishing a task can unblock others inside the same sprint, so teams
        // keep pulling from the backlog until nobody can make progress.
        for (bool progressed = true; progressed;) {
            progressed = false;
            for (auto& a : available) a.clear();
            for (std::size_t i = 0; i < reqs.size(); ++i)
                if (ready(reqs[i], sprint))
                    available[static_cast<std::size_t>(reqs[i].team)].push_back(static_cast<int>(i));
            for (int t = 0; t < teams; ++t) {
                auto& left = hours[static_cast<std::size_t>(t)];
                auto& queue = available[static_cast<std::size_t>(t)];
                if (left <= 0 || queue.empty()) continue;
                std::sort(queue.begin(), queue.end(), priority_less);
                const double multiplier = critical[static_cast<std::size_t>(t)] ? in.criticality : 1.0;
                for (int id : queue) {
                    if (left <= 0) break;
                    auto& r = reqs[static_cast<std::size_t>(id)];
                    const double spend = std::min(r.cost * multiplier - r.progress, left);
                    r.progress += spend;
                    left -= spend;
                    progressed = true;
                    if (r.progress >= r.cost * multiplier) r.done = true;
                }
            }
        }

        // Leftover capacity is idle only while the team still has known work
        // that is blocked on something unfinished; otherwise it is released.
        std::vector<char> waiting(static_cast<std::size_t>(teams), 0);
        for (const auto& r : reqs)
            if (!r.done && r.surfaces <= sprint) waiting[static_cast<std::size_t>(r.team)] = 1;
        for (int t = 0; t < teams; ++t) {
            const auto ti = static_cast<std::size_t>(t);
            if (!on_payroll[ti]) continue;
            const double multiplier = critical[ti] ? in.criticality : 1.0;
            const double worked = team_hours - hours[ti];
            const double waited = waiting[ti] ? hours[ti] : 0.0;
            paid += worked + waited;
            idle += waited;
            cost += (worked + waited) * rate * multiplier;
        }

        // Volatility: a culture-sized share of open visible requirements drifts.
        for (std::size_t i = 0; i < reqs.size(); ++i) {
            auto& r = reqs[i];
            if (r.done || r.surfaces > sprint) continue;
            const auto s = static_cast<std::uint64_t>(sprint);
            if (draw(seed, kChange, i, s) >= in.culture) continue;
            r.cost = std::clamp(r.cost * std::exp(cfg.change_sigma * normal(seed, kChangeCost, i, s)),
                                static_cast<double>(cfg.cost_low), static_cast<double>(cfg.cost_high));
            r.value = std::clamp(r.value * std::exp(cfg.change_sigma * normal(seed, kChangeValue, i, s)),
                                 static_cast<double>(cfg.value_low), static_cast<double>(cfg.value_high));
        }

        // Dynamism: new top-level requirements surface for the next sprint.
        const double lambda = in.dynamism / 50.0 * cfg.arrival_fraction * static_cast<double>(initial);
        const double u = draw(seed, kArrivals, static_cast<std::uint64_t>(sprint));
        // Poisson draw by CDF inversion on the keyed uniform.
        int arrivals = 0;
        double p = std::exp(-lambda), cdf = p;
        while (u > cdf && arrivals < 10 * static_cast<int>(lambda + 10)) {
            ++arrivals;
            p *= lambda / arrivals;
            cdf += p;
        }
        for (int k = 0; k < arrivals; ++k) {
            const auto key = (static_cast<std::uint64_t>(sprint) << 32) | static_cast<std::uint64_t>(k);
            Requirement r;
            r.cost = uniform_int(draw(seed, kCost, key, 1), cfg.cost_low, cfg.cost_high);
            r.value = uniform_int(draw(seed, kValue, key, 1), cfg.value_low, cfg.value_high);
            r.tree = trees + static_cast<int>(reqs.size() - initial);
            r.team = uniform_int(draw(seed, kArrivalTeam, key), 0, teams - 1);
            r.surfaces = sprint + 1;
            reqs.push_back(std::move(r));
        }
    }

    Outcome out;
    const auto done = std::count_if(reqs.begin(), reqs.end(), [](const auto& r) { return r.done; });
    out.completion = static_cast<double>(done) / static_cast<double>(reqs.size());
    out.idle = paid > 0 ? idle / paid : 0.0;
    out.cost = cost;
    return out;
}

/// Decision layout: culture, criticality, criticality modifier, initial known,
/// inter-dependency, dynamism, size index, plan, team size.
class Model {
public:
    explicit Model(Scenario scenario, std::uint64_t seed = 1, Settings settings = {})
        : scenario_(std::move(scenario)), seed_(seed), settings_(settings) {
        if (scenario_.size_choices.empty()) throw ContractError("pom3: no size choices");
        auto real = [](const char* n, std::array<double, 2> r) {
            return Dim{n, DimKind::continuous, r[0], r[1]};
        };
        schema_ = DecisionSchema({
            real("culture", scenario_.culture),
            real("criticality", scenario_.criticality),
            real("criticality_modifier", scenario_.criticality_modifier),
            real("initial_known", scenario_.initial_known),
            real("inter_dependency", scenario_.inter_dependency),
            real("dynamism", scenario_.dynamism),
            {"size", DimKind::integer, 0.0, static_cast<double>(scenario_.size_choices.size() - 1)},
            {"plan", DimKind::integer, scenario_.plan[0], scenario_.plan[1]},
            {"team_size", DimKind::integer, std::ceil(scenario_.team_size[0]),
             std::floor(scenario_.team_size[1])},
        });
    }

    const Scenario& scenario() const { return scenario_; }
    const DecisionSchema& schema() const { return schema_; }
    std::uint64_t seed() const { return seed_; }

    Inputs decode(std::span<const double> x) const {
        if (!schema_.contains(x)) throw BoundsError("pom3: decision out of range");
        Inputs in;
        in.culture = x[0];
        in.criticality = x[1];
        in.criticality_modifier = x[2];
        in.initial_known = x[3];
        in.inter_dependency = x[4];
        in.dynamism = x[5];
        in.size = scenario_.size_choices[static_cast<std::size_t>(x[6])];
        in.plan = static_cast<Plan>(static_cast<int>(x[7]));
        in.team_size = static_cast<int>(x[8]);
        return in;
    }

    Outcome evaluate(std::span<const double> x) const { return simulate(decode(x), seed_, settings_); }

private:
    Scenario scenario_;
    std::uint64_t seed_;
    Settings settings_;
    DecisionSchema schema_;
};

/// Objectives (completion, idle, cost): maximize, minimize, minimize.
inline Problem make_problem(Model model) {
    auto shared = std::make_shared<const Model>(std::move(model));
    return Problem(shared->scenario().name, shared->schema(),
                   {Sense::maximize, Sense::minimize, Sense::minimize},
                   [shared](std::span<const double> x) {
                       const auto o = shared->evaluate(x);
                       return ObjectiveVector{o.completion, o.idle, o.cost};
                   });
}

}  // namespace swaylab::pom3
