#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sfc/model/types.hpp"
#include "sfc/sim/simulator.hpp"

namespace sfc::harness {

using sim::Scenario;

enum class OutputFormat { csv, text };

struct ExperimentConfig
{
    std::string repository_path;
    std::vector<Scenario> scenarios{Scenario::partial, Scenario::full};
    /// sim.repetitions is the repetition count, sim.rng_seed the base seed.
    sim::SimConfig sim = default_sim_config();
    double confidence_level = 0.95;
    OutputFormat format = OutputFormat::csv;
    bool trace = false;
    /// Run repetitions through the serial reference instead of the parallel kernel.
    bool serial = false;

    static sim::SimConfig default_sim_config();
    /// 1 GiB transfer, 100 repetitions.
    void apply_full_scale();
};

struct MetricSummary
{
    std::string metric;
    double mean = 0.0;
    double stddev = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::size_t n = 0;

    bool operator==(const MetricSummary&) const = default;
};

struct ScenarioReport
{
    Scenario scenario = Scenario::partial;
    /// rtt_ms, completion_s, throughput_mbps, in that order.
    std::vector<MetricSummary> metrics;
    /// One value per repetition, keyed by metric name.
    std::map<std::string, std::vector<double>> per_repetition;
    std::map<std::string, std::uint64_t> sf_packet_counts;
    std::map<std::string, std::uint64_t> sf_reverse_packet_counts;
    std::uint64_t datagrams_delivered = 0;
    std::uint64_t mac_mismatches = 0;
    /// Mean over repetitions, per simulated second.
    std::vector<double> transfer_series;
    std::vector<double> throughput_series;
    std::vector<sim::TraceEvent> trace;

    const MetricSummary& metric(std::string_view name) const;
};

enum class Outcome { confirmed, tied, violated };

std::string_view to_string(Outcome o);

struct OrderingCheck
{
    std::string name;
    std::string expectation;
    Outcome outcome = Outcome::tied;
    /// Repetitions in which the expected strict ordering held.
    std::size_t held = 0;
    std::size_t total = 0;
};

struct Report
{
    std::uint64_t seed = 0;
    std::size_t repetitions = 0;
    double confidence_level = 0.95;
    std::vector<ScenarioReport> scenarios;
    /// partial minus full, per metric; empty unless both scenarios ran.
    std::map<std::string, double> deltas;
    std::vector<OrderingCheck> orderings;

    const ScenarioReport* find(Scenario s) const;
};

inline constexpr std::string_view kMetricRtt = "rtt_ms";
inline constexpr std::string_view kMetricCompletion = "completion_s";
inline constexpr std::string_view kMetricThroughput = "throughput_mbps";

Report run_experiment(const ExperimentConfig& cfg, const model::Repository& repo);
Report run_experiment(const ExperimentConfig& cfg);

/// 0 when no ordering is violated, 2 otherwise.
int exit_code(const Report& report);

/// Writes the summary table. Throws sfc::Error for a report lacking RTT
/// samples or on a sink failure.
void emit_report(const Report& report, OutputFormat format, std::ostream& sink);

/// Writes the summary plus orderings, deltas, SF counts, per-second series
/// and (when recorded) traces into `dir`. Returns the files written.
std::vector<std::filesystem::path> write_report_files(const Report& report, OutputFormat format,
                                                      const std::filesystem::path& dir);

struct CsvRow
{
    std::string scenario;
    std::string metric;
    double mean = 0.0;
    double stddev = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::size_t n = 0;

    bool operator==(const CsvRow&) const = default;
};

/// Reads back the CSV summary emitted by emit_report.
std::vector<CsvRow> parse_report_csv(std::string_view text);

} // namespace sfc::harness
