#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace swaylab {

using Rng = std::mt19937_64;
using ObjectiveVector = std::vector<double>;

struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

struct BoundsError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct BudgetExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class DimKind { continuous, integer };
enum class Sense { minimize, maximize };

struct Dim {
    std::string name;
    DimKind kind = DimKind::continuous;
    double low = 0.0;
    double high = 1.0;

    double span() const { return high - low; }
};

class DecisionSchema {
public:
    DecisionSchema() = default;

    explicit DecisionSchema(std::vector<Dim> dims) : dims_(std::move(dims)) {
        if (dims_.empty()) throw ContractError("decision schema needs at least one dim");
        for (const auto& d : dims_) {
            if (!(d.low <= d.high)) throw ContractError("dim '" + d.name + "': low > high");
            if (d.kind == DimKind::integer &&
                (std::floor(d.low) != d.low || std::floor(d.high) != d.high))
                throw ContractError("dim '" + d.name + "': integer dim with fractional bounds");
        }
    }

    std::size_t size() const { return dims_.size(); }
    const Dim& operator[](std::size_t i) const { return dims_[i]; }
    const std::vector<Dim>& dims() const { return dims_; }

    bool contains(std::span<const double> x) const {
        if (x.size() != dims_.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!(x[i] >= dims_[i].low && x[i] <= dims_[i].high)) return false;
            if (dims_[i].kind == DimKind::integer && std::floor(x[i]) != x[i]) return false;
        }
        return true;
    }

    /// Clamp into bounds and round integer dims.
    void repair(std::vector<double>& x) const {
        for (std::size_t i = 0; i < x.size(); ++i) {
            const auto& d = dims_[i];
            if (d.kind == DimKind::integer) x[i] = std::round(x[i]);
            x[i] = std::clamp(x[i], d.low, d.high);
        }
    }

    /// Min-max normalization of a decision vector against the schema bounds.
    /// Degenerate dims (low == high) map to 0.
    double normalized(std::size_t i, double v) const {
        const auto& d = dims_[i];
        return d.span() > 0 ? (v - d.low) / d.span() : 0.0;
    }

private:
    std::vector<Dim> dims_;
};

/// A point in decision space plus its (lazily computed) objectives. Objectives
/// are kept in minimization form; see Problem::natural for the reverse mapping.
struct Candidate {
    std::vector<double> decisions;
    std::optional<ObjectiveVector> objectives;
    double violation = 0.0;

    Candidate() = default;
    explicit Candidate(std::vector<double> x) : decisions(std::move(x)) {}

    bool evaluated() const { return objectives.has_value(); }
    bool feasible() const { return violation <= 0.0; }
};

using Population = std::vector<Candidate>;

/// Binary Pareto domination on minimization-form vectors.
inline bool dominates(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ContractError("dominates: objective length mismatch");
    bool strictly = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strictly = true;
    }
    return strictly;
}

/// Domination on vectors in their natural orientation.
inline bool dominates(std::span<const double> a, std::span<const double> b,
                      std::span<const Sense> senses) {
    if (a.size() != b.size() || a.size() != senses.size())
        throw ContractError("dominates: objective length mismatch");
    bool strictly = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = senses[i] == Sense::minimize ? a[i] : -a[i];
        const double y = senses[i] == Sense::minimize ? b[i] : -b[i];
        if (x > y) return false;
        if (x < y) strictly = true;
    }
    return strictly;
}

/// Feasibility first, then smaller violation, then Pareto domination.
inline bool constrained_dominates(const Candidate& a, const Candidate& b) {
    if (!a.evaluated() || !b.evaluated())
        throw ContractError("constrained_dominates: unevaluated candidate");
    const bool fa = a.feasible();
    const bool fb = b.feasible();
    if (fa && !fb) return true;
    if (!fa && fb) return false;
    if (!fa && !fb) return a.violation < b.violation;
    return dominates(*a.objectives, *b.objectives);
}

class Problem {
public:
    using ObjectiveFn = std::function<ObjectiveVector(std::span<const double>)>;
    using ViolationFn = std::function<double(std::span<const double>)>;

    Problem(std::string name, DecisionSchema schema, std::vector<Sense> senses,
            ObjectiveFn objectives, ViolationFn violation = {})
        : name_(std::move(name)),
          schema_(std::move(schema)),
          senses_(std::move(senses)),
          objectives_(std::move(objectives)),
          violation_(std::move(violation)) {
        if (senses_.empty()) throw ContractError("problem needs at least one objective");
        if (!objectives_) throw ContractError("problem needs an objective function");
    }

    Problem(const Problem& other)
        : name_(other.name_),
          schema_(other.schema_),
          senses_(other.senses_),
          objectives_(other.objectives_),
          violation_(other.violation_),
          budget_(other.budget_),
          counter_(other.counter_.load()) {}

    Problem& operator=(const Problem& other) {
        if (this != &other) {
            name_ = other.name_;
            schema_ = other.schema_;
            senses_ = other.senses_;
            objectives_ = other.objectives_;
            violation_ = other.violation_;
            budget_ = other.budget_;
            counter_.store(other.counter_.load());
        }
        return *this;
    }

    const std::string& name() const { return name_; }
    const DecisionSchema& schema() const { return schema_; }
    const std::vector<Sense>& senses() const { return senses_; }
    std::size_t objective_count() const { return senses_.size(); }
    bool constrained() const { return static_cast<bool>(violation_); }

    std::size_t evaluations() const { return counter_.load(); }
    void reset_evaluations() { counter_.store(0); }

    void set_budget(std::optional<std::size_t> max_evals) { budget_ = max_evals; }
    std::optional<std::size_t> budget() const { return budget_; }
    bool budget_left(std::size_t n = 1) const {
        return !budget_ || counter_.load() + n <= *budget_;
    }

    /// Computes (and caches on the candidate) the minimization-form objectives.
    /// The counter moves only when the candidate had no objectives yet.
    const ObjectiveVector& evaluate(Candidate& c) {
        if (c.evaluated()) return *c.objectives;
        if (!schema_.contains(c.decisions))
            throw BoundsError("evaluate: decisions outside schema bounds for " + name_);
        if (budget_) {
            auto cur = counter_.load();
            do {
                if (cur >= *budget_) throw BudgetExhausted("evaluation budget exhausted");
            } while (!counter_.compare_exchange_weak(cur, cur + 1));
        } else {
            counter_.fetch_add(1);
        }
        auto raw = objectives_(c.decisions);
        if (raw.size() != senses_.size())
            throw ContractError("objective function returned wrong arity for " + name_);
        for (std::size_t i = 0; i < raw.size(); ++i)
            if (senses_[i] == Sense::maximize) raw[i] = -raw[i];
        c.violation = violation_ ? violation_(c.decisions) : 0.0;
        c.objectives = std::move(raw);
        return *c.objectives;
    }

    /// Maps minimization-form objectives back to the model's own orientation.
    ObjectiveVector natural(std::span<const double> min_form) const {
        ObjectiveVector out(min_form.begin(), min_form.end());
        for (std::size_t i = 0; i < out.size() && i < senses_.size(); ++i)
            if (senses_[i] == Sense::maximize) out[i] = -out[i];
        return out;
    }

private:
    std::string name_;
    DecisionSchema schema_;
    std::vector<Sense> senses_;
    ObjectiveFn objectives_;
    ViolationFn violation_;
    std::optional<std::size_t> budget_;
    std::atomic<std::size_t> counter_{0};
};

/// One uniform draw per dim: integers inclusive of both bounds, reals on [low, high).
inline std::vector<double> random_decisions(const DecisionSchema& schema, Rng& rng) {
    std::vector<double> x(schema.size());
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const auto& d = schema[i];
        if (d.kind == DimKind::integer) {
            std::uniform_int_distribution<long long> u(static_cast<long long>(d.low),
                                                       static_cast<long long>(d.high));
            x[i] = static_cast<double>(u(rng));
        } else if (d.span() > 0) {
            std::uniform_real_distribution<double> u(d.low, d.high);
            x[i] = u(rng);
        } else {
            x[i] = d.low;
        }
    }
    return x;
}

inline Population random_population(const DecisionSchema& schema, std::size_t n, Rng& rng) {
    if (n == 0) throw ContractError("random_population: n must be positive");
    Population pop;
    pop.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pop.emplace_back(random_decisions(schema, rng));
    return pop;
}

inline Population random_population(const Problem& problem, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    return random_population(problem.schema(), n, rng);
}

/// Non-dominated subset (constrained domination) of the evaluated members.
inline Population nondominated(std::span<const Candidate> pop) {
    Population out;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        if (!pop[i].evaluated()) continue;
        bool beaten = false;
        for (std::size_t j = 0; j < pop.size() && !beaten; ++j)
            beaten = j != i && pop[j].evaluated() && constrained_dominates(pop[j], pop[i]);
        if (!beaten) out.push_back(pop[i]);
    }
    return out;
}

}  // namespace swaylab
