#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sfc/errors.hpp"
#include "sfc/harness/experiment.hpp"
#include "sfc/harness/statistics.hpp"
#include "sfc/model/repository.hpp"
#include "test_support.hpp"

using namespace sfc;
using namespace sfc::harness;
using sfc::test::three_sff;

namespace {

// t_{0.975, 9}, from standard tables.
constexpr double kT975Dof9 = 2.2621571627409915;

ExperimentConfig quick_config()
{
    ExperimentConfig cfg;
    cfg.sim.traffic.total_bytes = 128 * 1024;
    cfg.sim.rtt_probes = 5;
    cfg.sim.repetitions = 5;
    return cfg;
}

std::string emit(const Report& r, OutputFormat f)
{
    std::ostringstream os;
    emit_report(r, f, os);
    return os.str();
}

} // namespace

TEST_CASE("confidence interval on fixed data")
{
    std::vector<double> xs{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    double m = 0;
    for (double x : xs) m += x;
    m /= 10;
    double ss = 0;
    for (double x : xs) ss += (x - m) * (x - m);
    const double s = std::sqrt(ss / 9);
    const double half = kT975Dof9 * s / std::sqrt(10.0);

    auto [lo, hi] = compute_confidence_interval(xs, 0.95);
    CHECK(std::abs(lo - (m - half)) / std::abs(m - half) < 1e-9);
    CHECK(std::abs(hi - (m + half)) / std::abs(m + half) < 1e-9);
    CHECK(std::abs(student_t_quantile(0.95, 9) - kT975Dof9) < 1e-9);
}

TEST_CASE("degenerate intervals")
{
    std::vector<double> same(7, 3.25);
    CHECK(compute_confidence_interval(same, 0.95) == std::pair{3.25, 3.25});
    std::vector<double> one{42.0};
    CHECK(compute_confidence_interval(one, 0.99) == std::pair{42.0, 42.0});
    std::vector<double> none;
    CHECK_THROWS_AS(compute_confidence_interval(none, 0.95), Error);
    CHECK_THROWS_AS(compute_confidence_interval(one, 1.0), Error);
    CHECK(stddev(same) == 0.0);
}

TEST_CASE("reference experiment confirms the orderings")
{
    auto cfg = quick_config();
    cfg.sim.sf_jitter = 10'000;
    auto report = run_experiment(cfg, three_sff());
    REQUIRE(report.orderings.size() == 3);
    for (const auto& o : report.orderings) {
        CHECK(o.outcome == Outcome::confirmed);
        CHECK(o.held == o.total);
        CHECK(o.total == 5);
    }
    CHECK(exit_code(report) == 0);
    CHECK(report.deltas.at(std::string(kMetricRtt)) < 0);
    CHECK(report.deltas.at(std::string(kMetricThroughput)) > 0);
}

TEST_CASE("zero delays tie")
{
    auto repo = three_sff();
    for (auto& l : repo.topology.links) {
        l.delay = 0;
        l.capacity_bps = 0;
    }
    auto cfg = quick_config();
    cfg.sim.per_sf_processing_delay = 0;
    auto report = run_experiment(cfg, repo);
    for (const auto& [name, d] : report.deltas) CHECK(d == 0.0);
    for (const auto& o : report.orderings) CHECK(o.outcome == Outcome::tied);
    CHECK(exit_code(report) == 0);
}

TEST_CASE("same seed gives identical output")
{
    auto cfg = quick_config();
    cfg.sim.sf_jitter = 10'000;
    cfg.sim.rng_seed = 77;
    auto a = emit(run_experiment(cfg, three_sff()), OutputFormat::csv);
    auto b = emit(run_experiment(cfg, three_sff()), OutputFormat::csv);
    CHECK(a == b);
    cfg.serial = true;
    CHECK(emit(run_experiment(cfg, three_sff()), OutputFormat::csv) == a);
    cfg.sim.rng_seed = 78;
    CHECK(emit(run_experiment(cfg, three_sff()), OutputFormat::csv) != a);
}

TEST_CASE("CSV has one row per scenario and metric and parses back")
{
    auto cfg = quick_config();
    cfg.sim.sf_jitter = 10'000;
    auto report = run_experiment(cfg, three_sff());
    auto csv = emit(report, OutputFormat::csv);
    auto rows = parse_report_csv(csv);
    REQUIRE(rows.size() == 6);
    std::size_t i = 0;
    for (const auto& sc : report.scenarios)
        for (const auto& m : sc.metrics) {
            const auto& r = rows[i++];
            CHECK(r.scenario == std::string(to_string(sc.scenario)));
            CHECK(r.metric == m.metric);
            // Exact: the writer uses the shortest round-tripping form.
            CHECK(r.mean == m.mean);
            CHECK(r.stddev == m.stddev);
            CHECK(r.ci_lo == m.ci_lo);
            CHECK(r.ci_hi == m.ci_hi);
            CHECK(r.n == m.n);
        }
    CHECK_THROWS(parse_report_csv("scenario,metric\npartial,rtt_ms\n"));
}

TEST_CASE("a report without RTT samples is rejected")
{
    auto cfg = quick_config();
    auto report = run_experiment(cfg, three_sff());
    report.scenarios[0].per_repetition.erase(std::string(kMetricRtt));
    report.scenarios[0].metrics.erase(report.scenarios[0].metrics.begin());
    std::ostringstream os;
    CHECK_THROWS_AS(emit_report(report, OutputFormat::csv, os), Error);
    CHECK(os.str().empty());
}

TEST_CASE("report files")
{
    auto cfg = quick_config();
    cfg.trace = true;
    auto report = run_experiment(cfg, three_sff());
    auto dir = std::filesystem::temp_directory_path() / "sfc_harness_test_out";
    std::filesystem::remove_all(dir);
    auto files = write_report_files(report, OutputFormat::csv, dir);
    for (const char* name : {"report.csv", "orderings.csv", "deltas.csv", "sf_counts.csv",
                             "series_partial.csv", "series_full.csv", "trace_partial.csv"})
        CHECK(std::filesystem::exists(dir / name));
    CHECK(files.size() >= 7);
    std::filesystem::remove_all(dir);
}
