#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "swaylab/core.hpp"

namespace swaylab::xomo {

// Rating scale for every ordinal attribute: 1=VL 2=L 3=N 4=H 5=VH 6=XH.
enum Attr : std::size_t {
    prec, flex, resl, team, pmat,  // scale factors
    rely, data, cplx, ruse, docu, time, stor, pvol,
    acap, pcap, pcon, apex, plex, ltex, tool, site, sced,
    attr_count
};

inline constexpr std::array<const char*, attr_count> kAttrNames = {
    "prec", "flex", "resl", "team", "pmat", "rely", "data", "cplx", "ruse", "docu", "time",
    "stor", "pvol", "acap", "pcap", "pcon", "apex", "plex", "ltex", "tool", "site", "sced"};

inline std::optional<Attr> attr_from_name(const std::string& s) {
    for (std::size_t i = 0; i < attr_count; ++i)
        if (s == kAttrNames[i]) return static_cast<Attr>(i);
    return std::nullopt;
}

// COCOMO II.2000 post-architecture values, VL..XH. NaN marks an undefined
// rating; lookups clamp to the nearest defined rating.
inline constexpr double na = std::numeric_limits<double>::quiet_NaN();
inline constexpr std::array<std::array<double, 6>, attr_count> kCocomoTable = {{
    {6.20, 4.96, 3.72, 2.48, 1.24, 0.00},  // prec
    {5.07, 4.05, 3.04, 2.03, 1.01, 0.00},  // flex
    {7.07, 5.65, 4.24, 2.83, 1.41, 0.00},  // resl
    {5.48, 4.38, 3.29, 2.19, 1.10, 0.00},  // team
    {7.80, 6.24, 4.68, 3.12, 1.56, 0.00},  // pmat
    {0.82, 0.92, 1.00, 1.10, 1.26, na},    // rely
    {na, 0.90, 1.00, 1.14, 1.28, na},      // data
    {0.73, 0.87, 1.00, 1.17, 1.34, 1.74},  // cplx
    {na, 0.95, 1.00, 1.07, 1.15, 1.24},    // ruse
    {0.81, 0.91, 1.00, 1.11, 1.23, na},    // docu
    {na, na, 1.00, 1.11, 1.29, 1.63},      // time
    {na, na, 1.00, 1.05, 1.17, 1.46},      // stor
    {na, 0.87, 1.00, 1.15, 1.30, na},      // pvol
    {1.42, 1.19, 1.00, 0.85, 0.71, na},    // acap
    {1.34, 1.15, 1.00, 0.88, 0.76, na},    // pcap
    {1.29, 1.12, 1.00, 0.90, 0.81, na},    // pcon
    {1.22, 1.10, 1.00, 0.88, 0.81, na},    // apex
    {1.19, 1.09, 1.00, 0.91, 0.85, na},    // plex
    {1.20, 1.09, 1.00, 0.91, 0.84, na},    // ltex
    {1.17, 1.09, 1.00, 0.90, 0.78, na},    // tool
    {1.22, 1.09, 1.00, 0.93, 0.86, 0.80},  // site
    {1.43, 1.14, 1.00, 1.00, 1.00, na},    // sced
}};

inline constexpr double kEffortA = 2.94;
inline constexpr double kEffortB = 0.91;
inline constexpr double kScheduleC = 3.67;
inline constexpr double kScheduleD = 0.28;
inline constexpr std::array<double, 5> kScedStretch = {0.75, 0.85, 1.00, 1.30, 1.60};

// Defect model: introduction per KSLOC for requirements, design and code
// artifacts at nominal ratings, then removal by three nominal-rated activities
// (automated analysis, peer review, execution testing).
inline constexpr std::array<double, 3> kDefectsPerKsloc = {10.0, 20.0, 30.0};
inline constexpr std::array<std::array<double, 3>, 3> kRemovalFraction = {{
    {0.10, 0.13, 0.20},
    {0.40, 0.40, 0.48},
    {0.40, 0.43, 0.58},
}};
// Ratio of defect introduction between the worst and best rating of each
// driver. Positive: higher rating introduces fewer defects; negative: more.
inline constexpr std::array<double, attr_count> kDefectRange = {
    1.5, 1.1, 1.6, 1.5, 2.5,   // prec flex resl team pmat
    2.0, -1.2, -2.0, -1.2, 1.4, -1.2, -1.2, -1.4,  // rely data cplx ruse docu time stor pvol
    1.75, 1.7, 1.4, 1.4, 1.3, 1.3, 1.5, 1.3, 1.3};  // acap pcap pcon apex plex ltex tool site sced

inline int legal_low(Attr a) {
    for (int r = 1; r <= 6; ++r)
        if (!std::isnan(kCocomoTable[a][static_cast<std::size_t>(r - 1)])) return r;
    return 1;
}

inline int legal_high(Attr a) {
    for (int r = 6; r >= 1; --r)
        if (!std::isnan(kCocomoTable[a][static_cast<std::size_t>(r - 1)])) return r;
    return 6;
}

inline double cocomo_value(Attr a, double rating) {
    const int r = std::clamp(static_cast<int>(std::lround(rating)), legal_low(a), legal_high(a));
    return kCocomoTable[a][static_cast<std::size_t>(r - 1)];
}

struct Condition {
    Attr attr = rely;
    bool at_least = true;  // ">=" when true, "<=" otherwise
    int rating = 3;
};

/// Fires when every condition holds.
struct RiskRule {
    std::string name;
    std::vector<Condition> when;
};

/// Default rule table: each rule pairs a demanding setting with a weak
/// capability that undermines it.
inline std::vector<RiskRule> default_risk_rules() {
    auto ge = [](Attr a, int r) { return Condition{a, true, r}; };
    auto le = [](Attr a, int r) { return Condition{a, false, r}; };
    return {
        {"reliability-vs-analysts", {ge(rely, 4), le(acap, 3)}},
        {"reliability-vs-programmers", {ge(rely, 4), le(pcap, 3)}},
        {"complexity-vs-analysts", {ge(cplx, 5), le(acap, 3)}},
        {"complexity-vs-programmers", {ge(cplx, 5), le(pcap, 3)}},
        {"complexity-vs-tools", {ge(cplx, 5), le(tool, 2)}},
        {"compressed-schedule-vs-complexity", {le(sced, 2), ge(cplx, 4)}},
        {"compressed-schedule-vs-process", {le(sced, 2), le(pmat, 2)}},
        {"timing-vs-programmers", {ge(time, 4), le(pcap, 3)}},
        {"storage-vs-platform-experience", {ge(stor, 4), le(plex, 2)}},
        {"reuse-vs-application-experience", {ge(ruse, 4), le(apex, 2)}},
        {"documentation-vs-schedule", {ge(docu, 4), le(sced, 2)}},
        {"cohesion-vs-language-experience", {le(team, 2), le(ltex, 2)}},
    };
}

inline std::vector<RiskRule> risk_rules_from_json(const nlohmann::json& j) {
    std::vector<RiskRule> rules;
    for (const auto& r : j.at("rules")) {
        RiskRule rule;
        rule.name = r.at("name").get<std::string>();
        for (const auto& c : r.at("when")) {
            const auto attr = attr_from_name(c.at("attr").get<std::string>());
            if (!attr) throw std::invalid_argument("risk rule: unknown attribute " + c.at("attr").dump());
            const auto op = c.at("op").get<std::string>();
            if (op != ">=" && op != "<=") throw std::invalid_argument("risk rule: op must be >= or <=");
            rule.when.push_back({*attr, op == ">=", c.at("rating").get<int>()});
        }
        if (rule.when.empty()) throw std::invalid_argument("risk rule '" + rule.name + "' is empty");
        rules.push_back(std::move(rule));
    }
    if (rules.empty()) throw std::invalid_argument("risk rule table is empty");
    return rules;
}

inline nlohmann::json risk_rules_to_json(std::span<const RiskRule> rules) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rules) {
        nlohmann::json when = nlohmann::json::array();
        for (const auto& c : r.when)
            when.push_back({{"attr", kAttrNames[c.attr]}, {"op", c.at_least ? ">=" : "<="},
                            {"rating", c.rating}});
        out.push_back({{"name", r.name}, {"when", when}});
    }
    return {{"rules", out}};
}

inline std::vector<RiskRule> load_risk_rules(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open risk rule file " + path);
    return risk_rules_from_json(nlohmann::json::parse(in));
}

struct Range {
    double low = 0;
    double high = 0;
};

/// Project description: ranged attributes become decisions, fixed ones stay
/// put, and attributes the scenario does not mention range over their whole
/// legal rating scale.
struct Scenario {
    std::string name;
    std::map<Attr, Range> ranged;
    std::map<Attr, int> fixed;
    Range ksloc{2, 10000};
};

inline Scenario flight() {
    return {"xomo-flight",
            {{rely, {3, 5}}, {data, {2, 3}}, {cplx, {3, 6}}, {time, {3, 4}}, {stor, {3, 4}},
             {acap, {3, 5}}, {apex, {2, 5}}, {pcap, {3, 5}}, {plex, {1, 4}}, {ltex, {1, 4}},
             {pmat, {2, 3}}},
            {{tool, 2}, {sced, 3}},
            {7, 418}};
}

inline Scenario ground() {
    return {"xomo-ground",
            {{rely, {1, 4}}, {data, {2, 3}}, {cplx, {1, 4}}, {time, {3, 4}}, {stor, {3, 4}},
             {acap, {3, 5}}, {apex, {2, 5}}, {pcap, {3, 5}}, {plex, {1, 4}}, {ltex, {1, 4}},
             {pmat, {2, 3}}},
            {{tool, 2}, {sced, 3}},
            {11, 392}};
}

inline Scenario osp() {
    return {"xomo-osp",
            {{prec, {1, 2}}, {flex, {2, 5}}, {resl, {1, 3}}, {team, {2, 3}}, {pmat, {1, 4}},
             {stor, {3, 5}}, {ruse, {2, 4}}, {docu, {2, 4}}, {acap, {2, 3}}, {pcon, {2, 3}},
             {apex, {2, 3}}, {ltex, {2, 4}}, {tool, {2, 3}}, {sced, {1, 3}}, {cplx, {5, 6}}},
            {{data, 3}, {pvol, 2}, {rely, 5}, {pcap, 3}, {plex, 3}, {site, 3}},
            {75, 125}};
}

inline Scenario osp2() {
    return {"xomo-osp2",
            {{prec, {3, 5}}, {pmat, {4, 5}}, {docu, {3, 4}}, {ltex, {2, 5}}, {sced, {2, 4}}},
            {{flex, 3}, {resl, 4}, {team, 3}, {time, 3}, {stor, 3}, {data, 4}, {pvol, 3},
             {ruse, 4}, {rely, 5}, {acap, 4}, {pcap, 3}, {pcon, 3}, {apex, 4}, {plex, 4},
             {tool, 5}, {cplx, 4}, {site, 6}},
            {75, 125}};
}

inline std::vector<Scenario> standard_scenarios() { return {flight(), ground(), osp(), osp2()}; }

/// Full attribute settings of one project.
struct Project {
    std::array<double, attr_count> rating{};
    double ksloc = 0;
};

struct Estimate {
    double risk = 0;
    double effort = 0;   // person-months
    double defects = 0;
    double months = 0;
};

inline double sum_scale_factors(const Project& p) {
    double s = 0;
    for (Attr a : {prec, flex, resl, team, pmat}) s += cocomo_value(a, p.rating[a]);
    return s;
}

inline double effort_multipliers(const Project& p, bool with_sced) {
    double m = 1.0;
    for (std::size_t a = rely; a < attr_count; ++a) {
        if (a == sced && !with_sced) continue;
        m *= cocomo_value(static_cast<Attr>(a), p.rating[a]);
    }
    return m;
}

inline double risk(const Project& p, std::span<const RiskRule> rules) {
    if (rules.empty()) return 0.0;
    std::size_t fired = 0;
    for (const auto& rule : rules) {
        bool all = true;
        for (const auto& c : rule.when) {
            const double r = std::round(p.rating[c.attr]);
            all = all && (c.at_least ? r >= c.rating : r <= c.rating);
        }
        fired += all ? 1 : 0;
    }
    return static_cast<double>(fired) / static_cast<double>(rules.size());
}

inline Estimate estimate(const Project& p, std::span<const RiskRule> rules) {
    Estimate e;
    const double sf = sum_scale_factors(p);
    const double exponent = kEffortB + 0.01 * sf;
    e.effort = kEffortA * std::pow(p.ksloc, exponent) * effort_multipliers(p, true);

    const double nominal_schedule_effort = kEffortA * std::pow(p.ksloc, exponent) * effort_multipliers(p, false);
    const double f = kScheduleD + 0.2 * (exponent - kEffortB);
    const int sced_rating = std::clamp(static_cast<int>(std::lround(p.rating[sced])), 1, 5);
    e.months = kScheduleC * std::pow(nominal_schedule_effort, f) *
               kScedStretch[static_cast<std::size_t>(sced_rating - 1)];

    double introduce = 1.0;
    for (std::size_t a = 0; a < attr_count; ++a) {
        const double range = kDefectRange[a];
        const double level = (std::round(p.rating[a]) - 3.0) / 2.0;  // VL=-1, VH=+1
        const double sign = range >= 0 ? -1.0 : 1.0;
        introduce *= std::pow(std::abs(range), sign * level / 2.0);
    }
    double residual = 0.0;
    for (std::size_t type = 0; type < 3; ++type) {
        double left = kDefectsPerKsloc[type] * p.ksloc * introduce;
        for (const auto& activity : kRemovalFraction) left *= 1.0 - activity[type];
        residual += left;
    }
    e.defects = residual;
    e.risk = risk(p, rules);
    return e;
}

/// Decision layout and evaluator for one scenario.
class Model {
public:
    explicit Model(Scenario scenario, std::vector<RiskRule> rules = default_risk_rules())
        : scenario_(std::move(scenario)), rules_(std::move(rules)) {
        for (std::size_t a = 0; a < attr_count; ++a) {
            const auto attr = static_cast<Attr>(a);
            if (scenario_.fixed.contains(attr)) continue;
            Range r{static_cast<double>(legal_low(attr)), static_cast<double>(legal_high(attr))};
            if (auto it = scenario_.ranged.find(attr); it != scenario_.ranged.end()) r = it->second;
            slots_.push_back(attr);
            dims_.push_back({kAttrNames[a], DimKind::integer, r.low, r.high});
        }
        dims_.push_back({"ksloc", DimKind::continuous, scenario_.ksloc.low, scenario_.ksloc.high});
        schema_ = DecisionSchema(dims_);
    }

    const Scenario& scenario() const { return scenario_; }
    const std::vector<RiskRule>& rules() const { return rules_; }
    const DecisionSchema& schema() const { return schema_; }

    Project project(std::span<const double> x) const {
        if (x.size() != dims_.size()) throw ContractError("xomo: decision length mismatch");
        Project p;
        for (const auto& [attr, value] : scenario_.fixed) p.rating[attr] = value;
        for (std::size_t i = 0; i < slots_.size(); ++i) p.rating[slots_[i]] = x[i];
        p.ksloc = x.back();
        return p;
    }

    Estimate evaluate(std::span<const double> x) const {
        if (!schema_.contains(x)) throw BoundsError("xomo: decision out of range");
        return estimate(project(x), rules_);
    }

private:
    Scenario scenario_;
    std::vector<RiskRule> rules_;
    std::vector<Attr> slots_;
    std::vector<Dim> dims_;
    DecisionSchema schema_;
};

/// Objectives (risk, effort, defects, months), all minimized.
inline Problem make_problem(Model model) {
    auto shared = std::make_shared<const Model>(std::move(model));
    return Problem(shared->scenario().name, shared->schema(),
                   {Sense::minimize, Sense::minimize, Sense::minimize, Sense::minimize},
                   [shared](std::span<const double> x) {
                       const auto e = shared->evaluate(x);
                       return ObjectiveVector{e.risk, e.effort, e.defects, e.months};
                   });
}

inline std::optional<Scenario> scenario_by_name(const std::string& name) {
    for (auto& s : standard_scenarios())
        if (s.name == name) return s;
    return std::nullopt;
}

}  // namespace swaylab::xomo
