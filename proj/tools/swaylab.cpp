// Command-line front end: run experiments, render reports, probe dimensionality.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "swaylab/swaylab.hpp"

namespace fs = std::filesystem;
using namespace swaylab;

namespace {

void write_report(const fs::path& dir, const std::vector<harness::RunRecord>& records) {
    const auto rep = harness::build_report(records);
    std::ofstream(dir / "report.md") << harness::render_markdown(rep);
    std::ofstream(dir / "report.csv") << harness::render_csv(rep);
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SWAY sampling optimizer lab"};
    app.require_subcommand(1);

    std::string config_path, report_dir, scenario;
    std::optional<int> repeats;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> budget;
    std::optional<std::string> out;
    std::optional<unsigned> threads;
    std::size_t samples = 1000;

    auto* run = app.add_subcommand("run", "execute an experiment config and persist records + report");
    run->add_option("config", config_path, "experiment JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--repeats", repeats, "override repeats");
    run->add_option("--seed", seed, "override base seed");
    run->add_option("--budget", budget, "override evaluation budget");
    run->add_option("--out", out, "override output directory");
    run->add_option("--threads", threads, "worker threads (0 = all cores)");

    auto* report = app.add_subcommand("report", "re-render the report from persisted records");
    report->add_option("dir", report_dir, "run output directory")->required()->check(CLI::ExistingDirectory);

    auto* dim = app.add_subcommand("dim", "correlation dimension of a scenario's decision space");
    dim->add_option("scenario", scenario, "scenario name")->required();
    dim->add_option("--samples", samples, "random decision vectors")->check(CLI::Range(2, 100000));
    dim->add_option("--seed", seed, "sampling seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            auto cfg = harness::load_config(config_path);
            if (repeats) cfg.repeats = *repeats;
            if (seed) cfg.seed = *seed;
            if (budget) cfg.budget = *budget;
            if (out) cfg.out = *out;
            if (threads) cfg.threads = *threads;
            cfg.validate();
            std::size_t done = 0;
            const auto records = harness::run_experiment(cfg, [&](const harness::RunRecord& r) {
                ++done;
                std::fprintf(stderr, "\r%zu runs done (%s/%s #%d)   ", done, r.scenario.c_str(),
                             r.optimizer.c_str(), r.repeat);
            });
            std::fputc('\n', stderr);
            harness::persist(cfg, records, cfg.out);
            write_report(cfg.out, records);
            std::cout << "wrote " << records.size() << " records to " << cfg.out << '\n';
        } else if (*report) {
            write_report(report_dir, harness::load_records(report_dir));
            std::cout << "wrote " << (fs::path(report_dir) / "report.md").string() << '\n';
        } else if (*dim) {
            harness::ExperimentConfig cfg;
            const auto probe = harness::probe_dimension(scenario, cfg, samples, seed.value_or(1));
            std::printf("%s: %zu decision dims, correlation dimension %.3f\n", scenario.c_str(),
                        probe.dims, probe.intrinsic);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
