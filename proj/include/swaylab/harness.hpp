#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "swaylab/core.hpp"
#include "swaylab/intrinsic.hpp"
#include "swaylab/metrics.hpp"
#include "swaylab/models/monrp.hpp"
#include "swaylab/models/pom3.hpp"
#include "swaylab/models/xomo.hpp"
#include "swaylab/moea.hpp"
#include "swaylab/stats.hpp"
#include "swaylab/sway.hpp"

namespace swaylab::harness {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& known_optimizers() {
    static const std::vector<std::string> names = {"sway2", "sway4", "nsga2", "spea2", "nsga2-sc", "spea2-sc"};
    return names;
}

inline std::vector<std::string> pom3_scenarios() { return {"pom3a", "pom3b", "pom3c"}; }
inline std::vector<std::string> xomo_scenarios() {
    return {"xomo-flight", "xomo-ground", "xomo-osp", "xomo-osp2"};
}
inline std::vector<std::string> monrp_scenarios() {
    std::vector<std::string> out;
    for (const auto& v : monrp::standard_variants()) out.push_back(v.name());
    return out;
}

inline std::vector<std::string> known_scenarios() {
    auto out = pom3_scenarios();
    for (auto& s : xomo_scenarios()) out.push_back(s);
    for (auto& s : monrp_scenarios()) out.push_back(s);
    return out;
}

struct ExperimentConfig {
    std::vector<std::string> scenarios;
    std::vector<std::string> optimizers;
    int repeats = 20;
    std::size_t budget = 2000;
    std::uint64_t seed = 1;
    std::uint64_t instance_seed = 1;  // MONRP instance generation
    std::uint64_t model_seed = 1;     // POM3 simulation stream
    std::string out = "results";
    std::optional<std::string> risk_rules;
    unsigned threads = 0;  // 0: one per hardware thread

    void validate() const {
        if (scenarios.empty()) throw ConfigError("config: no scenarios");
        if (optimizers.empty()) throw ConfigError("config: no optimizers");
        if (repeats < 1) throw ConfigError("config: repeats must be >= 1");
        const auto all = known_scenarios();
        for (const auto& s : scenarios)
            if (std::find(all.begin(), all.end(), s) == all.end())
                throw ConfigError("config: unknown scenario '" + s + "'");
        for (const auto& o : optimizers)
            if (std::find(known_optimizers().begin(), known_optimizers().end(), o) == known_optimizers().end())
                throw ConfigError("config: unknown optimizer '" + o + "'");
        if (budget < 100) throw ConfigError("config: budget must cover one population of 100");
    }
};

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
    j = nlohmann::json{{"scenarios", c.scenarios}, {"optimizers", c.optimizers},
                       {"repeats", c.repeats},     {"budget", c.budget},
                       {"seed", c.seed},           {"instance_seed", c.instance_seed},
                       {"model_seed", c.model_seed}, {"out", c.out},
                       {"threads", c.threads}};
    if (c.risk_rules) j["risk_rules"] = *c.risk_rules;
}

inline void from_json(const nlohmann::json& j, ExperimentConfig& c) {
    static const std::set<std::string> keys = {"scenarios", "optimizers", "repeats", "budget", "seed",
                                               "instance_seed", "model_seed", "out", "risk_rules", "threads"};
    for (const auto& [k, v] : j.items())
        if (!keys.contains(k)) throw ConfigError("config: unknown key '" + k + "'");
    c.scenarios = j.at("scenarios").get<std::vector<std::string>>();
    c.optimizers = j.at("optimizers").get<std::vector<std::string>>();
    c.repeats = j.value("repeats", c.repeats);
    c.budget = j.value("budget", c.budget);
    c.seed = j.value("seed", c.seed);
    c.instance_seed = j.value("instance_seed", c.instance_seed);
    c.model_seed = j.value("model_seed", c.model_seed);
    c.out = j.value("out", c.out);
    if (j.contains("risk_rules")) c.risk_rules = j.at("risk_rules").get<std::string>();
    c.threads = j.value("threads", c.threads);
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    ExperimentConfig c;
    try {
        c = nlohmann::json::parse(in).get<ExperimentConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    c.validate();
    return c;
}

/// Objective orientation and labels, available without building a model.
struct ScenarioInfo {
    std::vector<Sense> senses;
    std::vector<std::string> objectives;
};

inline ScenarioInfo scenario_info(const std::string& name) {
    if (name.starts_with("pom3")) return {{Sense::maximize, Sense::minimize, Sense::minimize},
                                          {"completion", "idle", "cost"}};
    if (name.starts_with("xomo"))
        return {{Sense::minimize, Sense::minimize, Sense::minimize, Sense::minimize},
                {"risk", "effort", "defects", "months"}};
    if (name.starts_with("monrp")) return {{Sense::maximize, Sense::minimize, Sense::maximize},
                                           {"value", "cost", "satisfaction"}};
    throw ConfigError("unknown scenario '" + name + "'");
}

/// A ready-to-copy problem plus what SWAY needs to pick its split.
struct Scenario {
    std::string name;
    Problem problem;
    SplitStrategy strategy = SplitStrategy::continuous;
    int releases = 0;
    std::optional<monrp::Instance> instance;
};

inline Scenario make_scenario(const std::string& name, const ExperimentConfig& cfg) {
    if (auto s = pom3::scenario_by_name(name))
        return {name, pom3::make_problem(pom3::Model(*s, cfg.model_seed)), SplitStrategy::continuous, 0, {}};
    if (auto s = xomo::scenario_by_name(name)) {
        auto rules = cfg.risk_rules ? xomo::load_risk_rules(*cfg.risk_rules) : xomo::default_risk_rules();
        return {name, xomo::make_problem(xomo::Model(*s, std::move(rules))), SplitStrategy::continuous, 0, {}};
    }
    const auto variants = monrp::standard_variants();
    for (std::size_t i = 0; i < variants.size(); ++i) {
        if (variants[i].name() != name) continue;
        auto inst = monrp::generate(variants[i], cfg.instance_seed * 1000 + i);
        const int releases = inst.releases;
        return {name, monrp::make_problem(inst, name), SplitStrategy::monrp_workload, releases, inst};
    }
    throw ConfigError("unknown scenario '" + name + "'");
}

struct RunRecord {
    std::string scenario;
    std::string optimizer;
    int repeat = 0;
    std::uint64_t seed = 0;
    std::size_t evals = 0;
    std::size_t survivors = 0;  // SWAY stages only: full survivor count
    Front front;                // natural orientation
    Front survivor_objectives;  // every SWAY survivor, natural orientation; SWAY stages only
    double wall_seconds = 0;

    bool operator==(const RunRecord& o) const {
        return scenario == o.scenario && optimizer == o.optimizer && repeat == o.repeat &&
               seed == o.seed && evals == o.evals && survivors == o.survivors && front == o.front &&
               survivor_objectives == o.survivor_objectives;
    }
};

inline constexpr std::size_t kPopulation = 100;

namespace detail {

inline Front natural_front(const Problem& p, std::span<const Candidate> pop) {
    Front out;
    for (const auto& c : pop)
        if (c.evaluated()) out.push_back(p.natural(*c.objectives));
    return out;
}

// Survivors are scored on a separate copy so the run's own counter never sees them.
inline Population evaluated_for_report(const Problem& p, Population pop) {
    Problem scorer = p;
    for (auto& c : pop) scorer.evaluate(c);
    return pop;
}

}  // namespace detail

/// One optimizer on a fresh copy of the scenario's problem.
inline RunRecord run_one(const Scenario& sc, const std::string& optimizer, int repeat,
                         std::uint64_t seed, std::size_t budget) {
    RunRecord rec;
    rec.scenario = sc.name;
    rec.optimizer = optimizer;
    rec.repeat = repeat;
    rec.seed = seed;
    Problem problem = sc.problem;
    problem.reset_evaluations();
    problem.set_budget(std::nullopt);
    const auto start = std::chrono::steady_clock::now();

    Population survivors;
    auto run_sway = [&](std::size_t n) {
        auto r = sway_sampled(problem, n, seed, sc.strategy, sc.releases);
        rec.survivors = r.survivors.size();
        survivors = r.survivors;
        return r;
    };

    const bool sway_only = optimizer == "sway2" || optimizer == "sway4";
    if (sway_only) {
        run_sway(optimizer == "sway2" ? kSway2Population : kSway4Population);
    } else {
        MoeaConfig cfg;
        cfg.pop_size = kPopulation;
        cfg.max_evals = budget;
        cfg.seed = seed;
        const bool charged = optimizer.ends_with("-sc");
        if (charged) {
            // Evaluated survivors go first; unevaluated ones fill the rest.
            auto r = run_sway(kSway4Population);
            std::stable_partition(r.survivors.begin(), r.survivors.end(),
                                  [](const Candidate& c) { return c.evaluated(); });
            if (r.survivors.size() > cfg.pop_size) r.survivors.resize(cfg.pop_size);
            cfg.initial_pop = std::move(r.survivors);
        }
        const bool nsga = optimizer.starts_with("nsga2");
        if (!nsga && !optimizer.starts_with("spea2")) throw ConfigError("unknown optimizer '" + optimizer + "'");
        auto result = nsga ? nsga2(problem, cfg) : spea2(problem, cfg);
        rec.front = detail::natural_front(problem, result.front);
    }
    rec.evals = problem.evaluations();
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!survivors.empty()) {
        const auto scored = detail::evaluated_for_report(problem, std::move(survivors));
        rec.survivor_objectives = detail::natural_front(problem, scored);
        if (sway_only) rec.front = detail::natural_front(problem, nondominated(scored));
    }
    return rec;
}

/// Runs every scenario x optimizer x repeat; repeat i uses seed = base + i.
/// Results come back in that nested order regardless of thread scheduling.
inline std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg,
                                             std::function<void(const RunRecord&)> progress = {}) {
    cfg.validate();
    std::vector<Scenario> scenarios;
    for (const auto& s : cfg.scenarios) scenarios.push_back(make_scenario(s, cfg));

    struct Job {
        std::size_t scenario;
        std::string optimizer;
        int repeat;
    };
    std::vector<Job> jobs;
    for (std::size_t s = 0; s < scenarios.size(); ++s)
        for (const auto& o : cfg.optimizers)
            for (int r = 0; r < cfg.repeats; ++r) jobs.push_back({s, o, r});

    std::vector<RunRecord> out(jobs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex lock;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
            try {
                const auto& j = jobs[i];
                out[i] = run_one(scenarios[j.scenario], j.optimizer, j.repeat,
                                 cfg.seed + static_cast<std::uint64_t>(j.repeat), cfg.budget);
                if (progress) {
                    std::lock_guard g(lock);
                    progress(out[i]);
                }
            } catch (...) {
                std::lock_guard g(lock);
                if (!failure) failure = std::current_exception();
                next.store(jobs.size());
            }
        }
    };
    unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, jobs.size())));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

// ---- persistence ----------------------------------------------------------

inline constexpr std::size_t kMaxObjectives = 4;

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_records_csv(std::ostream& os, std::span<const RunRecord> records) {
    os << "kind,scenario,optimizer,repeat,seed,evals,survivors,point";
    for (std::size_t m = 1; m <= kMaxObjectives; ++m) os << ",f" << m;
    os << '\n';
    auto head = [&](const RunRecord& r, const char* kind) {
        os << kind << ',' << r.scenario << ',' << r.optimizer << ',' << r.repeat << ',' << r.seed << ','
           << r.evals << ',' << r.survivors << ',';
    };
    auto points = [&](const RunRecord& r, const Front& f, const char* kind) {
        for (std::size_t i = 0; i < f.size(); ++i) {
            head(r, kind);
            os << i;
            for (std::size_t m = 0; m < kMaxObjectives; ++m)
                os << ',' << (m < f[i].size() ? format_number(f[i][m]) : "");
            os << '\n';
        }
    };
    for (const auto& r : records) {
        head(r, "record");
        os << std::string(kMaxObjectives, ',') << '\n';
        points(r, r.front, "front");
        points(r, r.survivor_objectives, "survivor");
    }
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline std::vector<RunRecord> read_records_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || !line.starts_with("kind,")) throw ConfigError("records: missing header");
    std::vector<RunRecord> out;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != 8 + kMaxObjectives)
            throw ConfigError("records: malformed line " + std::to_string(lineno));
        try {
            if (cells[0] == "record") {
                RunRecord r;
                r.scenario = cells[1];
                r.optimizer = cells[2];
                r.repeat = std::stoi(cells[3]);
                r.seed = std::stoull(cells[4]);
                r.evals = std::stoull(cells[5]);
                r.survivors = std::stoull(cells[6]);
                out.push_back(std::move(r));
                continue;
            }
            if (out.empty()) throw ConfigError("records: point before its record");
            ObjectiveVector v;
            for (std::size_t m = 0; m < kMaxObjectives; ++m)
                if (!cells[8 + m].empty()) v.push_back(std::stod(cells[8 + m]));
            if (cells[0] == "front") out.back().front.push_back(std::move(v));
            else if (cells[0] == "survivor") out.back().survivor_objectives.push_back(std::move(v));
            else throw ConfigError("records: unknown row kind '" + cells[0] + "'");
        } catch (const std::logic_error&) {
            throw ConfigError("records: bad number on line " + std::to_string(lineno));
        }
    }
    return out;
}

inline void write_timings_csv(std::ostream& os, std::span<const RunRecord> records) {
    os << "scenario,optimizer,repeat,seconds\n";
    for (const auto& r : records)
        os << r.scenario << ',' << r.optimizer << ',' << r.repeat << ',' << format_number(r.wall_seconds) << '\n';
}

/// Writes config.json, records.csv, timings.csv and the MONRP instances used.
inline void persist(const ExperimentConfig& cfg, std::span<const RunRecord> records,
                    const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "instances");
    std::ofstream(dir / "config.json") << nlohmann::json(cfg).dump(2) << '\n';
    {
        std::ofstream os(dir / "records.csv");
        write_records_csv(os, records);
    }
    {
        std::ofstream os(dir / "timings.csv");
        write_timings_csv(os, records);
    }
    for (const auto& name : cfg.scenarios) {
        if (!name.starts_with("monrp")) continue;
        const auto sc = make_scenario(name, cfg);
        std::ofstream(dir / "instances" / (name + ".json")) << nlohmann::json(*sc.instance).dump(1) << '\n';
    }
}

inline std::vector<RunRecord> load_records(const std::filesystem::path& dir) {
    std::ifstream is(dir / "records.csv");
    if (!is) throw ConfigError("cannot open " + (dir / "records.csv").string());
    return read_records_csv(is);
}

// ---- report ---------------------------------------------------------------

struct IndicatorTable {
    std::string scenario;
    std::string indicator;
    stats::Direction direction = stats::Direction::lower_better;
    stats::RankTable table;
};

struct Report {
    std::vector<IndicatorTable> tables;
    std::vector<std::string> warnings;
};

struct IndicatorSamples {
    // scenario -> optimizer -> values (one per repeat that had a defined value)
    std::map<std::string, std::map<std::string, std::vector<double>>> spread, hypervolume, evals;
    std::vector<std::string> warnings;
};

/// Indicator values per record, with normalization shared across every
/// front of a scenario. Never touches a model.
inline IndicatorSamples compute_indicators(std::span<const RunRecord> records) {
    IndicatorSamples out;
    std::map<std::string, std::vector<const RunRecord*>> by_scenario;
    for (const auto& r : records) by_scenario[r.scenario].push_back(&r);

    for (const auto& [name, recs] : by_scenario) {
        const auto info = scenario_info(name);
        auto minimized = [&](const Front& f) {
            Front g = f;
            for (auto& p : g)
                for (std::size_t m = 0; m < p.size() && m < info.senses.size(); ++m)
                    if (info.senses[m] == Sense::maximize) p[m] = -p[m];
            return g;
        };
        std::vector<Front> fronts;
        for (const auto* r : recs) fronts.push_back(minimized(r->front));
        const bool any = std::any_of(fronts.begin(), fronts.end(), [](const auto& f) { return !f.empty(); });
        if (!any) {
            out.warnings.push_back(name + ": no front points; indicators omitted");
            continue;
        }
        const auto normalized = normalize_fronts(fronts);
        Front all;
        for (const auto& nf : normalized) all.insert(all.end(), nf.points.begin(), nf.points.end());
        const auto extremes = extreme_points(all);

        for (std::size_t i = 0; i < recs.size(); ++i) {
            const auto& r = *recs[i];
            const auto& pts = normalized[i].points;
            out.evals[name][r.optimizer].push_back(static_cast<double>(r.evals));
            if (pts.empty()) {
                out.warnings.push_back(name + "/" + r.optimizer + " repeat " + std::to_string(r.repeat) +
                                       ": empty front");
                continue;
            }
            out.hypervolume[name][r.optimizer].push_back(hypervolume_normalized(pts));
            try {
                out.spread[name][r.optimizer].push_back(spread(pts, extremes));
            } catch (const UndefinedIndicator& e) {
                out.warnings.push_back(name + "/" + r.optimizer + " repeat " + std::to_string(r.repeat) +
                                       ": spread undefined (" + e.what() + ")");
            }
        }
    }
    return out;
}

inline Report build_report(std::span<const RunRecord> records, const stats::ScottKnottOptions& opt = {}) {
    auto samples = compute_indicators(records);
    Report rep;
    rep.warnings = std::move(samples.warnings);
    auto add = [&](const std::string& indicator, stats::Direction dir,
                   const std::map<std::string, std::map<std::string, std::vector<double>>>& values) {
        for (const auto& [scenario, per_opt] : values) {
            std::vector<stats::Treatment> ts;
            for (const auto& [optimizer, v] : per_opt) {
                if (v.empty()) {
                    rep.warnings.push_back(scenario + "/" + indicator + "/" + optimizer + ": no samples, omitted");
                    continue;
                }
                ts.push_back({optimizer, v});
            }
            if (ts.empty()) continue;
            rep.tables.push_back({scenario, indicator, dir, stats::scott_knott(std::move(ts), dir, opt)});
        }
    };
    add("spread", stats::Direction::lower_better, samples.spread);
    add("hypervolume", stats::Direction::higher_better, samples.hypervolume);
    add("evaluations", stats::Direction::lower_better, samples.evals);
    std::stable_sort(rep.tables.begin(), rep.tables.end(),
                     [](const auto& a, const auto& b) { return a.scenario < b.scenario; });
    return rep;
}

inline const IndicatorTable* find_table(const Report& rep, const std::string& scenario,
                                        const std::string& indicator) {
    for (const auto& t : rep.tables)
        if (t.scenario == scenario && t.indicator == indicator) return &t;
    return nullptr;
}

inline std::optional<int> rank_of(const IndicatorTable& t, const std::string& optimizer) {
    for (const auto& row : t.table)
        if (row.name == optimizer) return row.rank;
    return std::nullopt;
}

inline std::string render_markdown(const Report& rep) {
    std::ostringstream os;
    os << "# Benchmark report\n\n"
       << "Ranks come from Scott-Knott (bootstrap 95% plus A12 >= 0.6). `*` marks a median within 5% "
          "of the top median. Spread: lower is better. Hypervolume: higher is better (normalized, "
          "reference 1.1).\n";
    std::string current;
    for (const auto& t : rep.tables) {
        if (t.scenario != current) {
            current = t.scenario;
            os << "\n## " << current << "\n";
        }
        os << "\n### " << t.indicator << "\n\n| Rank | Optimizer | Median | IQR | Close |\n|---:|---|---:|---:|:---:|\n";
        for (const auto& row : t.table)
            os << "| " << row.rank << " | " << row.name << " | " << format_number(row.median) << " | "
               << format_number(row.iqr) << " | " << (row.close_to_top ? "*" : "") << " |\n";
    }
    if (!rep.warnings.empty()) {
        os << "\n## Warnings\n\n";
        for (const auto& w : rep.warnings) os << "- " << w << '\n';
    }
    return os.str();
}

inline std::string render_csv(const Report& rep) {
    std::ostringstream os;
    os << "scenario,indicator,rank,optimizer,median,iqr,close\n";
    for (const auto& t : rep.tables)
        for (const auto& row : t.table)
            os << t.scenario << ',' << t.indicator << ',' << row.rank << ',' << row.name << ','
               << format_number(row.median) << ',' << format_number(row.iqr) << ','
               << (row.close_to_top ? 1 : 0) << '\n';
    return os.str();
}

// ---- intrinsic dimension probe --------------------------------------------

struct DimensionProbe {
    std::size_t dims = 0;
    double intrinsic = 0;
};

/// Samples random decisions for a scenario, maps them into the unit cube by
/// the schema bounds and estimates their correlation dimension.
inline DimensionProbe probe_dimension(const std::string& scenario, const ExperimentConfig& cfg,
                                      std::size_t samples = 1000, std::uint64_t seed = 1) {
    const auto sc = make_scenario(scenario, cfg);
    const auto& schema = sc.problem.schema();
    Rng rng(seed);
    PointCloud cloud;
    for (std::size_t i = 0; i < samples; ++i) {
        auto x = random_decisions(schema, rng);
        for (std::size_t d = 0; d < x.size(); ++d) x[d] = schema.normalized(d, x[d]);
        cloud.push_back(std::move(x));
    }
    return {schema.size(), intrinsic_dimension(cloud)};
}

}  // namespace swaylab::harness
