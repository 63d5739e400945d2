// Parallel kernels against their serial references.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "sfc/model/repository.hpp"
#include "sfc/sim/flow_table.hpp"
#include "sfc/sim/simulator.hpp"

using namespace sfc;
using namespace sfc::model;
using namespace sfc::sim;

namespace {

struct Batch
{
    FlowTable table;
    std::vector<Packet> packets;
    std::vector<PortNo> ports;
    std::vector<const FlowRule*> out;
};

Batch make_batch(std::size_t n_rules, std::size_t n_packets)
{
    std::mt19937_64 rng(1);
    Batch b;
    for (std::size_t i = 0; i < n_rules; ++i) {
        FlowRule r;
        r.priority = std::uint32_t(rng() % 4) * 10;
        if (rng() % 2) r.match.in_port = PortNo(1 + rng() % 8);
        if (rng() % 2) r.match.src_ip = Ipv4Address(std::uint32_t(rng() % 16));
        if (rng() % 2) r.match.dst_port = std::uint16_t(rng() % 16);
        r.actions = {path::Output{PortNo(i)}};
        b.table.install(r);
    }
    for (std::size_t i = 0; i < n_packets; ++i) {
        Packet p;
        p.header.src_ip = Ipv4Address(std::uint32_t(rng() % 16));
        p.header.dst_port = std::uint16_t(rng() % 16);
        b.packets.push_back(p);
        b.ports.push_back(PortNo(1 + rng() % 8));
    }
    b.out.resize(n_packets);
    return b;
}

template <auto Kernel>
void BM_MatchBatch(benchmark::State& state)
{
    auto b = make_batch(std::size_t(state.range(0)), 1 << 16);
    for (auto _ : state) {
        Kernel(b.table, b.packets, b.ports, b.out);
        benchmark::DoNotOptimize(b.out.data());
    }
    state.SetItemsProcessed(state.iterations() * std::int64_t(b.packets.size()));
}

SimConfig rep_config()
{
    SimConfig cfg;
    cfg.traffic.total_bytes = 1024 * 1024;
    cfg.rtt_probes = 20;
    cfg.repetitions = 8;
    cfg.sf_jitter = 10'000;
    return cfg;
}

template <auto Kernel>
void BM_Repetitions(benchmark::State& state)
{
    const auto repo = repository_load_file(SFC_DATA_DIR "/three_sff_repository.json");
    const auto cfg = rep_config();
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(repo, cfg, Scenario::full));
    state.SetItemsProcessed(state.iterations() * std::int64_t(cfg.repetitions));
}

} // namespace

BENCHMARK(BM_MatchBatch<match_batch>)->Arg(16)->Arg(256)->Name("match_batch/parallel");
BENCHMARK(BM_MatchBatch<match_batch_serial>)->Arg(16)->Arg(256)->Name("match_batch/serial");
BENCHMARK(BM_Repetitions<run_repetitions>)->Unit(benchmark::kMillisecond)->Name("repetitions/parallel");
BENCHMARK(BM_Repetitions<run_repetitions_serial>)->Unit(benchmark::kMillisecond)->Name("repetitions/serial");

BENCHMARK_MAIN();
