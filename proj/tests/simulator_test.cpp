#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "sfc/errors.hpp"
#include "sfc/model/repository.hpp"
#include "sfc/sim/simulator.hpp"
#include "test_support.hpp"

using namespace sfc;
using namespace sfc::model;
using namespace sfc::sim;
using sfc::test::three_sff;
using sfc::test::mac;

namespace {

SimConfig small_config()
{
    SimConfig cfg;
    cfg.traffic.total_bytes = 256 * 1024;
    cfg.rtt_probes = 10;
    return cfg;
}

// Skipped in the partial reverse path: SF1 and SF2 (1 ms each) and the
// detour sff3 -> sff2 -> sff1 instead of sff3 -> sff1, one extra link of
// 100 us plus 64 bytes serialized at 1 Gb/s (512 ns).
constexpr SimTime kSkippedDelay = 2 * 1'000'000 + 100'000 + 64 * 8;

} // namespace

TEST_CASE("classification")
{
    auto repo = three_sff();
    Packet p;
    p.header = repo.flows[0];
    auto c = classify(p, repo);
    REQUIRE(c);
    CHECK(c->first == 1);
    CHECK(c->second == Direction::forward);

    p.header = repo.flows[0].reversed();
    c = classify(p, repo);
    REQUIRE(c);
    CHECK(c->second == Direction::reverse);

    p.header.dst_port = 1;
    CHECK_FALSE(classify(p, repo));
}

TEST_CASE("SF queue timing")
{
    auto repo = three_sff();
    ServiceFunction sf = repo.sfs.at("SF1");
    SfQueue q;

    sf.processing_delay = 0;
    Packet p;
    auto [out, ready] = sf_transit(p, sf, 500, q);
    CHECK(ready == 500);
    CHECK(q.packets() == 1);

    SfQueue q2;
    const SimTime d = 1000;
    sf.processing_delay = d;
    auto a = sf_transit(p, sf, 10, q2);
    auto b = sf_transit(p, sf, 10, q2);
    CHECK(a.second == 10 + d);
    CHECK(b.second == 10 + 2 * d);
    CHECK(q2.packets() == 2);
}

TEST_CASE("zero delays give zero RTT and rate-limited completion")
{
    auto repo = three_sff();
    for (auto& l : repo.topology.links) {
        l.delay = 0;
        l.capacity_bps = 0;
    }
    SimConfig cfg = small_config();
    cfg.per_sf_processing_delay = 0;
    for (auto s : {Scenario::partial, Scenario::full}) {
        auto m = run_simulation(repo, cfg, s);
        CHECK(m.rtt_samples.size() == 10);
        for (auto r : m.rtt_samples) CHECK(r == 0);
        // Last datagram leaves the source at ceil(total_bits * 1e9 / rate).
        const auto bits = cfg.traffic.total_bytes * 8;
        const SimTime expect =
            SimTime((bits * kNanosPerSecond + cfg.traffic.offered_rate_bps - 1)
                    / cfg.traffic.offered_rate_bps);
        CHECK(m.completion_time == expect);
    }
    CHECK(measure_rtt(repo, cfg, Scenario::partial, 5) == std::vector<SimTime>(5, 0));
}

TEST_CASE("deterministic RTT difference equals the skipped delay sum")
{
    auto repo = three_sff();
    SimConfig cfg = small_config();
    auto partial = measure_rtt(repo, cfg, Scenario::partial, 100);
    auto full = measure_rtt(repo, cfg, Scenario::full, 100);
    REQUIRE(partial.size() == 100);
    REQUIRE(full.size() == 100);
    CHECK(std::all_of(partial.begin(), partial.end(), [&](SimTime t) { return t == partial[0]; }));
    for (std::size_t i = 0; i < 100; ++i) CHECK(full[i] - partial[i] == kSkippedDelay);
}

TEST_CASE("transfer in both scenarios")
{
    auto repo = three_sff();
    SimConfig cfg = small_config();
    cfg.record_trace = true;
    auto partial = run_simulation(repo, cfg, Scenario::partial);
    auto full = run_simulation(repo, cfg, Scenario::full);
    const std::uint64_t n = cfg.traffic.total_bytes / cfg.traffic.payload_size;

    for (const Metrics* m : {&partial, &full}) {
        CHECK(m->datagrams_sent == n);
        CHECK(m->datagrams_delivered == n);
        CHECK(m->bytes_delivered == cfg.traffic.total_bytes);
        CHECK(m->mac_mismatches == 0);
        CHECK(m->packets_dropped == 0);
        CHECK(m->packets_injected == m->packets_delivered);
        std::uint64_t series = 0;
        for (auto b : m->transfer_series) series += b;
        CHECK(series == m->bytes_delivered);
        CHECK(m->throughput_series.size() == m->transfer_series.size());
        CHECK(m->packet_ins == 2); // one per flow, rules cover both directions
    }

    CHECK(partial.sf_reverse_packet_counts.at("SF1") == 0);
    CHECK(partial.sf_reverse_packet_counts.at("SF2") == 0);
    CHECK(partial.sf_reverse_packet_counts.at("SF3") == n);
    for (const char* id : {"SF1", "SF2", "SF3"}) CHECK(full.sf_reverse_packet_counts.at(id) == n);

    CHECK(partial.rtt_samples.front() < full.rtt_samples.front());
    CHECK(partial.completion_time < full.completion_time);
    CHECK(mean_throughput_bps(partial) > mean_throughput_bps(full));

    CHECK(std::is_sorted(partial.trace.begin(), partial.trace.end(),
                         [](const TraceEvent& a, const TraceEvent& b) { return a.time < b.time; }));
}

TEST_CASE("SF visit order per packet")
{
    auto repo = three_sff();
    SimConfig cfg = small_config();
    cfg.rtt_probes = 1;
    cfg.traffic.total_bytes = 1024;
    cfg.record_trace = true;
    auto visits = [](const Metrics& m, std::uint64_t seq) {
        std::vector<std::string> out;
        for (const auto& e : m.trace)
            if (e.kind == "sf" && e.seq == seq) out.push_back(e.node);
        return out;
    };
    auto partial = run_simulation(repo, cfg, Scenario::partial);
    auto full = run_simulation(repo, cfg, Scenario::full);
    // seq 0: probe request (forward); seq 1: its reply (reverse).
    CHECK(visits(partial, 0) == std::vector<std::string>{"SF2", "SF1", "SF3"});
    CHECK(visits(partial, 1) == std::vector<std::string>{"SF3"});
    CHECK(visits(full, 1) == std::vector<std::string>{"SF3", "SF1", "SF2"});
}

TEST_CASE("jitter is seeded")
{
    auto repo = three_sff();
    SimConfig cfg = small_config();
    cfg.sf_jitter = 10'000;
    auto a = run_simulation(repo, cfg, Scenario::partial);
    auto b = run_simulation(repo, cfg, Scenario::partial);
    CHECK(a == b);
    cfg.rng_seed = 2;
    auto c = run_simulation(repo, cfg, Scenario::partial);
    CHECK(c.rtt_samples != a.rtt_samples);
}

TEST_CASE("parallel repetitions equal the serial reference")
{
    auto repo = three_sff();
    SimConfig cfg = small_config();
    cfg.sf_jitter = 10'000;
    cfg.repetitions = 4;
    auto par = run_repetitions(repo, cfg, Scenario::full);
    auto ser = run_repetitions_serial(repo, cfg, Scenario::full);
    REQUIRE(par.size() == 4);
    CHECK(par == ser);
    CHECK(par[0] != par[1]);
}

TEST_CASE("unregistered flows and bad configs are rejected")
{
    auto repo = three_sff();
    SimConfig cfg = small_config();
    FlowSpec stray = repo.flows[0];
    stray.dst_port = 1;
    cfg.data_flow = stray;
    try {
        run_simulation(repo, cfg, Scenario::partial);
        FAIL("expected SimulationError");
    } catch (const SimulationError& e) {
        CHECK(std::string(e.what()).find(stray.str()) != std::string::npos);
    }

    SimConfig bad = small_config();
    bad.repetitions = 0;
    CHECK_THROWS_AS(run_repetitions(repo, bad, Scenario::partial), SimulationError);
    bad = small_config();
    bad.traffic.offered_rate_bps = 0;
    CHECK_THROWS_AS(run_simulation(repo, bad, Scenario::partial), SimulationError);
}

TEST_CASE("metrics and traces serialize")
{
    auto repo = three_sff();
    SimConfig cfg = small_config();
    cfg.record_trace = true;
    cfg.rtt_probes = 1;
    cfg.traffic.total_bytes = 1024;
    auto m = run_simulation(repo, cfg, Scenario::partial);
    auto json = serialize_metrics(m);
    CHECK(json.find("\"rtt_samples_ns\"") != std::string::npos);
    CHECK(json.find("\"completion_ns\"") != std::string::npos);
    auto trace = format_trace(m.trace);
    CHECK(std::count(trace.begin(), trace.end(), '\n') == long(m.trace.size()));
    CHECK(trace.rfind("0,inject,client,0", 0) == 0);
}
