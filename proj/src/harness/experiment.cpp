#include "sfc/harness/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "sfc/errors.hpp"
#include "sfc/harness/statistics.hpp"
#include "sfc/model/repository.hpp"

namespace sfc::harness {

sim::SimConfig ExperimentConfig::default_sim_config()
{
    sim::SimConfig c;
    c.traffic.total_bytes = 10ull * 1024 * 1024;
    c.traffic.payload_size = 1024;
    c.traffic.offered_rate_bps = 1'000'000'000;
    c.traffic.direction = model::Direction::reverse;
    c.repetitions = 20;
    c.rng_seed = 1;
    c.rtt_probes = 100;
    return c;
}

void ExperimentConfig::apply_full_scale()
{
    sim.traffic.total_bytes = 1024ull * 1024 * 1024;
    sim.repetitions = 100;
}

const MetricSummary& ScenarioReport::metric(std::string_view name) const
{
    auto it = std::find_if(metrics.begin(), metrics.end(),
                           [&](const MetricSummary& m) { return m.metric == name; });
    if (it == metrics.end()) throw Error("report has no metric " + std::string(name));
    return *it;
}

std::string_view to_string(Outcome o)
{
    switch (o) {
    case Outcome::confirmed: return "confirmed";
    case Outcome::tied: return "tied";
    case Outcome::violated: return "violated";
    }
    return "?";
}

const ScenarioReport* Report::find(Scenario s) const
{
    for (const auto& r : scenarios)
        if (r.scenario == s) return &r;
    return nullptr;
}

namespace {

MetricSummary summarize(std::string_view name, const std::vector<double>& values, double level)
{
    MetricSummary s;
    s.metric = std::string(name);
    s.n = values.size();
    s.mean = mean(values);
    s.stddev = stddev(values);
    std::tie(s.ci_lo, s.ci_hi) = compute_confidence_interval(values, level);
    return s;
}

std::vector<double> mean_series(const std::vector<sim::Metrics>& runs,
                                std::vector<std::uint64_t> sim::Metrics::*series)
{
    std::size_t len = 0;
    for (const auto& m : runs) len = std::max(len, (m.*series).size());
    std::vector<double> out(len, 0.0);
    for (const auto& m : runs)
        for (std::size_t i = 0; i < (m.*series).size(); ++i)
            out[i] += static_cast<double>((m.*series)[i]);
    for (auto& v : out) v /= static_cast<double>(runs.size());
    return out;
}

ScenarioReport summarize_scenario(Scenario scenario, const std::vector<sim::Metrics>& runs,
                                  double level)
{
    ScenarioReport r;
    r.scenario = scenario;
    auto& rtt = r.per_repetition[std::string(kMetricRtt)];
    auto& completion = r.per_repetition[std::string(kMetricCompletion)];
    auto& throughput = r.per_repetition[std::string(kMetricThroughput)];
    for (const auto& m : runs) {
        if (!m.rtt_samples.empty()) {
            double sum = 0.0;
            for (auto s : m.rtt_samples) sum += static_cast<double>(s);
            rtt.push_back(sum / static_cast<double>(m.rtt_samples.size()) / 1e6);
        }
        completion.push_back(static_cast<double>(m.completion_time) / 1e9);
        throughput.push_back(sim::mean_throughput_bps(m) / 1e6);
        r.mac_mismatches += m.mac_mismatches;
    }
    if (!rtt.empty()) r.metrics.push_back(summarize(kMetricRtt, rtt, level));
    r.metrics.push_back(summarize(kMetricCompletion, completion, level));
    r.metrics.push_back(summarize(kMetricThroughput, throughput, level));

    // SF load does not depend on the seed; repetition 0 stands for all.
    r.sf_packet_counts = runs.front().sf_packet_counts;
    r.sf_reverse_packet_counts = runs.front().sf_reverse_packet_counts;
    r.datagrams_delivered = runs.front().datagrams_delivered;
    r.transfer_series = mean_series(runs, &sim::Metrics::transfer_series);
    r.throughput_series = mean_series(runs, &sim::Metrics::throughput_series);
    return r;
}

OrderingCheck compare(std::string name, std::string expectation, const std::vector<double>& partial,
                      const std::vector<double>& full, bool partial_lower)
{
    OrderingCheck c{std::move(name), std::move(expectation), Outcome::tied, 0,
                    std::min(partial.size(), full.size())};
    std::size_t equal = 0;
    for (std::size_t i = 0; i < c.total; ++i) {
        bool holds = partial_lower ? partial[i] < full[i] : partial[i] > full[i];
        c.held += holds;
        equal += partial[i] == full[i];
    }
    if (c.total > 0 && c.held == c.total) c.outcome = Outcome::confirmed;
    else if (equal == c.total) c.outcome = Outcome::tied;
    else c.outcome = Outcome::violated;
    return c;
}

std::string num(double v)
{
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

void check_emittable(const Report& report)
{
    if (report.scenarios.empty()) throw Error("report has no scenarios");
    for (const auto& s : report.scenarios) {
        auto has_rtt = std::any_of(s.metrics.begin(), s.metrics.end(),
                                   [](const MetricSummary& m) { return m.metric == kMetricRtt; });
        if (!has_rtt)
            throw Error("report for scenario " + std::string(sim::to_string(s.scenario))
                        + " lacks RTT samples");
    }
}

nlohmann::ordered_json to_json(const Report& report)
{
    nlohmann::ordered_json j;
    j["seed"] = report.seed;
    j["repetitions"] = report.repetitions;
    j["confidence_level"] = report.confidence_level;
    auto& scenarios = j["scenarios"] = nlohmann::ordered_json::array();
    for (const auto& s : report.scenarios) {
        nlohmann::ordered_json js;
        js["scenario"] = std::string(sim::to_string(s.scenario));
        auto& metrics = js["metrics"] = nlohmann::ordered_json::array();
        for (const auto& m : s.metrics)
            metrics.push_back({{"metric", m.metric},
                               {"mean", m.mean},
                               {"std", m.stddev},
                               {"ci_lo", m.ci_lo},
                               {"ci_hi", m.ci_hi},
                               {"n", m.n}});
        js["sf_packet_counts"] = s.sf_packet_counts;
        js["sf_reverse_packet_counts"] = s.sf_reverse_packet_counts;
        js["datagrams_delivered"] = s.datagrams_delivered;
        js["mac_mismatches"] = s.mac_mismatches;
        scenarios.push_back(std::move(js));
    }
    j["deltas"] = report.deltas;
    auto& orderings = j["orderings"] = nlohmann::ordered_json::array();
    for (const auto& o : report.orderings)
        orderings.push_back({{"ordering", o.name},
                             {"expectation", o.expectation},
                             {"outcome", std::string(to_string(o.outcome))},
                             {"held", o.held},
                             {"total", o.total}});
    return j;
}

void write_file(const std::filesystem::path& path, const std::string& content,
                std::vector<std::filesystem::path>& written)
{
    std::ofstream out(path, std::ios::binary);
    out << content;
    out.flush();
    if (!out) throw Error("cannot write " + path.string());
    written.push_back(path);
}

} // namespace

Report run_experiment(const ExperimentConfig& cfg, const model::Repository& repo)
{
    if (!(cfg.confidence_level > 0.0 && cfg.confidence_level < 1.0))
        throw Error("confidence level must lie in (0, 1)");
    if (cfg.scenarios.empty()) throw Error("no scenario selected");

    Report report;
    report.seed = cfg.sim.rng_seed;
    report.repetitions = cfg.sim.repetitions;
    report.confidence_level = cfg.confidence_level;

    for (Scenario scenario : cfg.scenarios) {
        auto runs = cfg.serial ? sim::run_repetitions_serial(repo, cfg.sim, scenario)
                               : sim::run_repetitions(repo, cfg.sim, scenario);
        ScenarioReport r = summarize_scenario(scenario, runs, cfg.confidence_level);
        if (cfg.trace) {
            sim::SimConfig traced = cfg.sim;
            traced.record_trace = true;
            r.trace = sim::run_simulation(repo, traced, scenario).trace;
        }
        report.scenarios.push_back(std::move(r));
    }

    const ScenarioReport* partial = report.find(Scenario::partial);
    const ScenarioReport* full = report.find(Scenario::full);
    if (partial && full) {
        for (const auto& m : partial->metrics)
            report.deltas[m.metric] = m.mean - full->metric(m.metric).mean;
        auto per = [](const ScenarioReport* s, std::string_view k) -> const std::vector<double>& {
            return s->per_repetition.at(std::string(k));
        };
        if (!per(partial, kMetricRtt).empty() && !per(full, kMetricRtt).empty())
            report.orderings.push_back(compare("rtt", "partial < full", per(partial, kMetricRtt),
                                               per(full, kMetricRtt), true));
        report.orderings.push_back(compare("transfer", "completion partial < full",
                                           per(partial, kMetricCompletion),
                                           per(full, kMetricCompletion), true));
        report.orderings.push_back(compare("throughput", "partial > full",
                                           per(partial, kMetricThroughput),
                                           per(full, kMetricThroughput), false));
    }
    return report;
}

Report run_experiment(const ExperimentConfig& cfg)
{
    return run_experiment(cfg, model::repository_load_file(cfg.repository_path));
}

int exit_code(const Report& report)
{
    for (const auto& o : report.orderings)
        if (o.outcome == Outcome::violated) return 2;
    return 0;
}

void emit_report(const Report& report, OutputFormat format, std::ostream& sink)
{
    check_emittable(report);
    if (format == OutputFormat::csv) {
        sink << "scenario,metric,mean,std,ci_lo,ci_hi,n\n";
        for (const auto& s : report.scenarios)
            for (const auto& m : s.metrics)
                sink << sim::to_string(s.scenario) << ',' << m.metric << ',' << num(m.mean) << ','
                     << num(m.stddev) << ',' << num(m.ci_lo) << ',' << num(m.ci_hi) << ',' << m.n
                     << '\n';
    } else {
        sink << to_json(report).dump(2) << '\n';
    }
    sink.flush();
    if (!sink) throw Error("report sink write failed");
}

std::vector<std::filesystem::path> write_report_files(const Report& report, OutputFormat format,
                                                      const std::filesystem::path& dir)
{
    check_emittable(report);
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;

    std::ostringstream summary;
    emit_report(report, format, summary);
    write_file(dir / (format == OutputFormat::csv ? "report.csv" : "report.json"), summary.str(),
               written);

    if (format == OutputFormat::csv) {
        std::string orderings = "ordering,expectation,outcome,held,total\n";
        for (const auto& o : report.orderings)
            orderings += o.name + "," + o.expectation + "," + std::string(to_string(o.outcome))
                         + "," + std::to_string(o.held) + "," + std::to_string(o.total) + "\n";
        write_file(dir / "orderings.csv", orderings, written);

        std::string deltas = "metric,partial_minus_full\n";
        for (const auto& [metric, d] : report.deltas) deltas += metric + "," + num(d) + "\n";
        write_file(dir / "deltas.csv", deltas, written);

        std::string counts = "scenario,sf,packets,reverse_packets\n";
        for (const auto& s : report.scenarios)
            for (const auto& [sf, n] : s.sf_packet_counts)
                counts += std::string(sim::to_string(s.scenario)) + "," + sf + ","
                          + std::to_string(n) + ","
                          + std::to_string(s.sf_reverse_packet_counts.at(sf)) + "\n";
        write_file(dir / "sf_counts.csv", counts, written);
    }

    for (const auto& s : report.scenarios) {
        std::string name(sim::to_string(s.scenario));
        std::string series = "second,transfer_bytes,throughput_bps\n";
        for (std::size_t i = 0; i < s.transfer_series.size(); ++i)
            series += std::to_string(i) + "," + num(s.transfer_series[i]) + ","
                      + num(s.throughput_series[i]) + "\n";
        write_file(dir / ("series_" + name + ".csv"), series, written);
        if (!s.trace.empty())
            write_file(dir / ("trace_" + name + ".csv"), sim::format_trace(s.trace), written);
    }
    return written;
}

std::vector<CsvRow> parse_report_csv(std::string_view text)
{
    std::vector<CsvRow> rows;
    std::size_t start = 0;
    bool header = true;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        if (line.empty()) continue;
        if (header) {
            if (line != "scenario,metric,mean,std,ci_lo,ci_hi,n")
                throw ParseError("unexpected report header", 1, 1);
            header = false;
            continue;
        }
        std::vector<std::string_view> cells;
        std::size_t from = 0;
        while (true) {
            std::size_t comma = line.find(',', from);
            cells.push_back(line.substr(from, comma - from));
            if (comma == std::string_view::npos) break;
            from = comma + 1;
        }
        if (cells.size() != 7) throw ParseError("report row needs 7 cells", rows.size() + 2, 1);
        CsvRow row;
        row.scenario = std::string(cells[0]);
        row.metric = std::string(cells[1]);
        double* targets[] = {&row.mean, &row.stddev, &row.ci_lo, &row.ci_hi};
        for (int i = 0; i < 4; ++i) {
            auto cell = cells[2 + i];
            auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), *targets[i]);
            if (ec != std::errc{} || p != cell.data() + cell.size())
                throw ParseError("malformed number in report", rows.size() + 2, 3 + i);
        }
        auto cell = cells[6];
        auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), row.n);
        if (ec != std::errc{} || p != cell.data() + cell.size())
            throw ParseError("malformed count in report", rows.size() + 2, 7);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace sfc::harness
