// sfc-sym: experiment runner and operator tool for symmetry-aware service
// function chains.

#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>

#include <CLI11.hpp>

#include "sfc/errors.hpp"
#include "sfc/harness/experiment.hpp"
#include "sfc/intent/intent.hpp"
#include "sfc/model/repository.hpp"
#include "sfc/path/path_engine.hpp"

namespace {

constexpr int kExitError = 1;

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw sfc::Error("cannot open \"" + path + "\"");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Symmetry-aware SFC controller and data-plane simulator"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run partial/full symmetry experiments");
    std::string repo_path;
    std::string scenario = "both";
    std::size_t reps = 20;
    std::uint64_t seed = 1;
    double sf_delay_us = -1;
    double jitter_us = 10;
    std::string format = "csv";
    std::string out_dir = "results";
    bool full_scale = false;
    bool trace = false;
    bool serial = false;
    double confidence = 0.95;
    std::uint64_t total_bytes = 0;
    std::uint64_t rate_bps = 0;
    std::size_t probes = 100;

    run->add_option("--repo", repo_path, "Repository file")->required()->check(CLI::ExistingFile);
    run->add_option("--scenario", scenario, "both|partial|full")
        ->check(CLI::IsMember({"both", "partial", "full"}));
    auto* reps_opt = run->add_option("--reps", reps, "Repetitions per scenario")
                         ->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "Base RNG seed")->envname("SFC_SYM_SEED");
    run->add_option("--sf-delay-us", sf_delay_us,
                    "Override every SF's processing delay (microseconds)")
        ->check(CLI::NonNegativeNumber);
    run->add_option("--jitter-us", jitter_us,
                    "Max uniform extra SF service time (microseconds); 0 = deterministic")
        ->check(CLI::NonNegativeNumber);
    run->add_option("--format", format, "csv|text")->check(CLI::IsMember({"csv", "text"}));
    run->add_option("--out", out_dir, "Output directory");
    run->add_flag("--paper-scale", full_scale, "1 GiB transfer and 100 repetitions");
    run->add_flag("--trace", trace, "Write per-event traces of the first repetition");
    run->add_flag("--serial", serial, "Run repetitions on one thread");
    run->add_option("--confidence", confidence, "Confidence level")->check(CLI::Range(0.0, 1.0));
    run->add_option("--total-bytes", total_bytes, "Bytes per transfer")->check(CLI::PositiveNumber);
    run->add_option("--rate-bps", rate_bps, "Offered rate")->check(CLI::PositiveNumber);
    run->add_option("--probes", probes, "RTT probes per repetition");

    // validate
    auto* validate = app.add_subcommand("validate", "Check a repository file");
    std::string validate_repo;
    validate->add_option("--repo", validate_repo, "Repository file")->required();

    // intent
    auto* intent_cmd = app.add_subcommand("intent", "Run the intent deployment workflow");
    std::string intent_file;
    std::string blueprint_file;
    std::string intent_repo;
    bool show_rules = false;
    intent_cmd->add_option("--file", intent_file, "Intent file")->required();
    intent_cmd->add_option("--blueprints", blueprint_file, "Blueprint catalog")->required();
    intent_cmd->add_option("--repo", intent_repo, "Repository file")->required();
    intent_cmd->add_flag("--rules", show_rules, "Also execute and print the steering rules");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) {
            auto repo = sfc::model::repository_load_file(validate_repo);
            std::cout << "ok: " << repo.chains.size() << " chains, " << repo.sfs.size()
                      << " SFs, " << repo.flows.size() << " flows\n";
            return 0;
        }

        if (*intent_cmd) {
            auto repo = sfc::model::repository_load_file(intent_repo);
            auto catalog = sfc::intent::load_blueprints_file(blueprint_file);
            auto cmd = sfc::intent::run_intent_pipeline(read_file(intent_file), catalog, repo);
            std::cout << sfc::intent::dump(cmd);
            if (show_rules) {
                auto result = sfc::intent::execute_deployment(cmd, repo);
                for (const auto& [sff, rule] : result.rules)
                    std::cout << sfc::path::dump(rule) << "\n";
            }
            return 0;
        }

        sfc::harness::ExperimentConfig cfg;
        cfg.repository_path = repo_path;
        if (scenario == "partial") cfg.scenarios = {sfc::sim::Scenario::partial};
        else if (scenario == "full") cfg.scenarios = {sfc::sim::Scenario::full};
        if (full_scale) cfg.apply_full_scale();
        if (reps_opt->count() > 0 || !full_scale) cfg.sim.repetitions = reps;
        cfg.sim.rng_seed = seed;
        if (sf_delay_us >= 0)
            cfg.sim.per_sf_processing_delay = static_cast<sfc::model::SimTime>(
                std::llround(sf_delay_us * 1000.0));
        cfg.sim.sf_jitter = static_cast<sfc::model::SimTime>(std::llround(jitter_us * 1000.0));
        if (total_bytes > 0) cfg.sim.traffic.total_bytes = total_bytes;
        if (rate_bps > 0) cfg.sim.traffic.offered_rate_bps = rate_bps;
        cfg.sim.rtt_probes = probes;
        cfg.confidence_level = confidence;
        cfg.format = format == "csv" ? sfc::harness::OutputFormat::csv
                                     : sfc::harness::OutputFormat::text;
        cfg.trace = trace;
        cfg.serial = serial;

        auto report = sfc::harness::run_experiment(cfg);
        sfc::harness::emit_report(report, cfg.format, std::cout);
        auto files = sfc::harness::write_report_files(report, cfg.format, out_dir);
        for (const auto& o : report.orderings)
            std::cerr << "ordering " << o.name << " (" << o.expectation
                      << "): " << sfc::harness::to_string(o.outcome) << " in " << o.held << "/"
                      << o.total << " repetitions\n";
        std::cerr << "wrote " << files.size() << " files to " << out_dir << "\n";
        return sfc::harness::exit_code(report);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}
