#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "swaylab/core.hpp"

namespace swaylab::monrp {

/// Shape of a generated instance: requirements-releases-clients-density-budget.
struct Variant {
    int requirements = 50;
    int releases = 4;
    int clients = 5;
    int density_pct = 0;
    int budget_pct = 110;

    std::string name() const;
};

/// The four variants, ordered from least to most constrained.
inline std::vector<Variant> standard_variants() {
    return {{50, 4, 5, 0, 110}, {50, 4, 5, 0, 90}, {50, 4, 5, 4, 110}, {50, 4, 5, 4, 90}};
}

inline std::string Variant::name() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "monrp-%d-%d-%d-%d-%03d", requirements, releases, clients,
                  density_pct, budget_pct);
    return buf;
}

/// Edge (prerequisite, dependent): the dependent may not ship before the prerequisite.
struct Edge {
    int prerequisite = 0;
    int dependent = 0;
    bool operator==(const Edge&) const = default;
};

struct Instance {
    int releases = 0;
    std::vector<double> cost;                 // c_i > 0
    std::vector<double> client_weight;        // t_j >= 0
    std::vector<std::vector<double>> value;   // I_ij, requirements x clients
    std::vector<double> risk;                 // r_i >= 0
    std::vector<Edge> edges;
    std::vector<double> budget;               // BR_k, one per release

    /// When set, aborted requirements (y_i = 0) contribute to f1 with weight
    /// P + 1, exactly as the unrestricted summation reads.
    bool score_aborted = false;

    std::size_t requirements() const { return cost.size(); }
    std::size_t clients() const { return client_weight.size(); }

    void validate() const;
    bool operator==(const Instance&) const = default;
};

inline bool is_acyclic(std::size_t n, std::span<const Edge> edges) {
    std::vector<std::vector<int>> out(n);
    std::vector<int> indeg(n, 0);
    for (const auto& e : edges) {
        out[static_cast<std::size_t>(e.prerequisite)].push_back(e.dependent);
        ++indeg[static_cast<std::size_t>(e.dependent)];
    }
    std::vector<int> ready;
    for (std::size_t i = 0; i < n; ++i)
        if (indeg[i] == 0) ready.push_back(static_cast<int>(i));
    std::size_t seen = 0;
    while (!ready.empty()) {
        const int v = ready.back();
        ready.pop_back();
        ++seen;
        for (int w : out[static_cast<std::size_t>(v)])
            if (--indeg[static_cast<std::size_t>(w)] == 0) ready.push_back(w);
    }
    return seen == n;
}

inline void Instance::validate() const {
    const std::size_t n = cost.size();
    if (releases < 1) throw ContractError("monrp: releases must be >= 1");
    if (n == 0) throw ContractError("monrp: no requirements");
    if (risk.size() != n || value.size() != n)
        throw ContractError("monrp: per-requirement arrays disagree in length");
    for (const auto& row : value)
        if (row.size() != client_weight.size())
            throw ContractError("monrp: value matrix width != client count");
    if (budget.size() != static_cast<std::size_t>(releases))
        throw ContractError("monrp: one budget per release required");
    for (double c : cost)
        if (!(c > 0)) throw ContractError("monrp: costs must be positive");
    for (const auto& e : edges)
        if (e.prerequisite < 0 || e.dependent < 0 || static_cast<std::size_t>(e.prerequisite) >= n ||
            static_cast<std::size_t>(e.dependent) >= n || e.prerequisite == e.dependent)
            throw ContractError("monrp: bad dependency edge");
    if (!is_acyclic(n, edges)) throw ContractError("monrp: dependency graph has a cycle");
}

// Generator distributions. The source formulation leaves them open.
inline constexpr int kCostLow = 1;
inline constexpr int kCostHigh = 20;
inline constexpr double kClientWeightLow = 1.0;
inline constexpr double kClientWeightHigh = 5.0;
inline constexpr int kValueHigh = 10;
inline constexpr double kValueZeroProb = 0.3;
inline constexpr double kRiskHigh = 5.0;

/// Random instance for a variant. round(density% * N) requirements receive one
/// incoming edge from a requirement earlier in a random topological order, so
/// the graph is acyclic by construction. Every release gets the same budget,
/// budget% of the average per-release share of the total cost.
inline Instance generate(const Variant& v, std::uint64_t seed) {
    if (v.requirements < 1 || v.releases < 1 || v.clients < 1 || v.density_pct < 0 ||
        v.density_pct > 100 || v.budget_pct <= 0)
        throw ContractError("monrp: invalid variant " + v.name());
    Rng rng(seed);
    const auto n = static_cast<std::size_t>(v.requirements);
    const auto m = static_cast<std::size_t>(v.clients);
    Instance inst;
    inst.releases = v.releases;

    std::uniform_int_distribution<int> cost(kCostLow, kCostHigh);
    std::uniform_real_distribution<double> weight(kClientWeightLow, kClientWeightHigh);
    std::uniform_int_distribution<int> value(1, kValueHigh);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> risk(0.0, kRiskHigh);

    for (std::size_t i = 0; i < n; ++i) inst.cost.push_back(cost(rng));
    for (std::size_t j = 0; j < m; ++j) inst.client_weight.push_back(weight(rng));
    inst.value.assign(n, std::vector<double>(m, 0.0));
    for (auto& row : inst.value)
        for (auto& x : row) x = unit(rng) < kValueZeroProb ? 0.0 : value(rng);
    for (std::size_t i = 0; i < n; ++i) inst.risk.push_back(risk(rng));

    const auto dependents = static_cast<std::size_t>(
        std::lround(static_cast<double>(n) * v.density_pct / 100.0));
    if (dependents > 0 && n > 1) {
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        // Dependents are drawn from positions >= 1 so a predecessor always exists.
        std::vector<std::size_t> pos(n - 1);
        std::iota(pos.begin(), pos.end(), std::size_t{1});
        std::shuffle(pos.begin(), pos.end(), rng);
        for (std::size_t d = 0; d < dependents && d < pos.size(); ++d) {
            std::uniform_int_distribution<std::size_t> before(0, pos[d] - 1);
            inst.edges.push_back({order[before(rng)], order[pos[d]]});
        }
    }

    const double total = std::accumulate(inst.cost.begin(), inst.cost.end(), 0.0);
    inst.budget.assign(static_cast<std::size_t>(v.releases),
                       v.budget_pct / 100.0 * total / v.releases);
    inst.validate();
    return inst;
}

inline void check_plan(const Instance& inst, std::span<const double> y) {
    if (y.size() != inst.requirements()) throw ContractError("monrp: plan length mismatch");
    for (double v : y)
        if (v < 0 || v > inst.releases || std::floor(v) != v)
            throw ContractError("monrp: release index out of range");
}

/// (f1, f2, f3): weighted value-plus-risk (maximize), cost (minimize),
/// satisfaction (maximize). Release k of P weighs value by P + 1 - k.
inline ObjectiveVector evaluate(const Instance& inst, std::span<const double> y) {
    check_plan(inst, y);
    const double p = inst.releases;
    double f1 = 0.0, f2 = 0.0, f3 = 0.0;
    for (std::size_t j = 0; j < inst.clients(); ++j) {
        double inner = 0.0;
        for (std::size_t i = 0; i < inst.requirements(); ++i)
            if (y[i] > 0 || inst.score_aborted) inner += (p + 1 - y[i]) * inst.value[i][j] + inst.risk[i];
        f1 += inst.client_weight[j] * inner;
    }
    for (std::size_t i = 0; i < inst.requirements(); ++i) {
        if (y[i] == 0) continue;
        f2 += inst.cost[i];
        for (std::size_t j = 0; j < inst.clients(); ++j) f3 += inst.value[i][j];
    }
    return {f1, f2, f3};
}

/// Sum of relative budget overruns per release plus the number of broken
/// precedence edges. Zero iff the plan is feasible.
inline double violation(const Instance& inst, std::span<const double> y) {
    check_plan(inst, y);
    std::vector<double> spent(static_cast<std::size_t>(inst.releases), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] > 0) spent[static_cast<std::size_t>(y[i]) - 1] += inst.cost[i];
    double v = 0.0;
    for (std::size_t k = 0; k < spent.size(); ++k)
        v += std::max(0.0, spent[k] - inst.budget[k]) / inst.budget[k];
    for (const auto& e : inst.edges) {
        const double pre = y[static_cast<std::size_t>(e.prerequisite)];
        const double dep = y[static_cast<std::size_t>(e.dependent)];
        if (dep > 0 && (pre == 0 || pre > dep)) v += 1.0;
    }
    return v;
}

inline Problem make_problem(Instance inst, std::string name = "monrp") {
    inst.validate();
    std::vector<Dim> dims;
    for (std::size_t i = 0; i < inst.requirements(); ++i)
        dims.push_back({"y" + std::to_string(i + 1), DimKind::integer, 0.0,
                        static_cast<double>(inst.releases)});
    auto shared = std::make_shared<const Instance>(std::move(inst));
    return Problem(
        std::move(name), DecisionSchema(std::move(dims)),
        {Sense::maximize, Sense::minimize, Sense::maximize},
        [shared](std::span<const double> y) { return evaluate(*shared, y); },
        [shared](std::span<const double> y) { return violation(*shared, y); });
}

inline void to_json(nlohmann::json& j, const Edge& e) {
    j = nlohmann::json::array({e.prerequisite, e.dependent});
}

inline void from_json(const nlohmann::json& j, Edge& e) {
    e.prerequisite = j.at(0).get<int>();
    e.dependent = j.at(1).get<int>();
}

inline void to_json(nlohmann::json& j, const Instance& inst) {
    j = nlohmann::json{{"releases", inst.releases},     {"costs", inst.cost},
                       {"client_weights", inst.client_weight},
                       {"values", inst.value},          {"risks", inst.risk},
                       {"edges", inst.edges},           {"budgets", inst.budget},
                       {"score_aborted", inst.score_aborted}};
}

inline void from_json(const nlohmann::json& j, Instance& inst) {
    j.at("releases").get_to(inst.releases);
    j.at("costs").get_to(inst.cost);
    j.at("client_weights").get_to(inst.client_weight);
    j.at("values").get_to(inst.value);
    j.at("risks").get_to(inst.risk);
    j.at("edges").get_to(inst.edges);
    j.at("budgets").get_to(inst.budget);
    inst.score_aborted = j.value("score_aborted", false);
    inst.validate();
}

}  // namespace swaylab::monrp
