#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sfc/model/types.hpp"
#include "sfc/sim/packet.hpp"

namespace sfc::sim {

using model::Repository;
using model::ServiceFunction;

enum class Scenario { partial, full };

std::string_view to_string(Scenario s);
std::optional<Scenario> parse_scenario(std::string_view text);

inline constexpr SimTime kNanosPerSecond = 1'000'000'000;

struct TrafficConfig
{
    std::uint64_t total_bytes = 10ull * 1024 * 1024;
    std::uint32_t payload_size = 1024;
    std::uint64_t offered_rate_bps = 1'000'000'000;
    /// Reverse = server to client, i.e. the swapped tuple of the registered flow.
    Direction direction = Direction::reverse;
};

struct SimConfig
{
    TrafficConfig traffic;
    /// Overrides every SF's processing delay when set.
    std::optional<SimTime> per_sf_processing_delay;
    std::size_t repetitions = 1;
    std::uint64_t rng_seed = 1;
    /// Upper bound of the uniform extra service time added per SF transit.
    /// Zero gives the deterministic mode.
    SimTime sf_jitter = 0;
    SimTime packet_in_latency = 0;
    std::size_t rtt_probes = 100;
    std::uint32_t probe_size = 64;
    /// Defaults: first non-ICMP flow; first ICMP flow on the same chain.
    std::optional<FlowSpec> data_flow;
    std::optional<FlowSpec> probe_flow;
    bool record_trace = false;
};

/// Throws SimulationError on a config that breaks its invariants.
void check_config(const SimConfig& cfg);

struct TraceEvent
{
    SimTime time = 0;
    std::string kind; // inject, sff, packet_in, sf, link, deliver, drop
    std::string node;
    std::uint64_t seq = 0;

    bool operator==(const TraceEvent&) const = default;
};

struct Metrics
{
    std::vector<SimTime> rtt_samples;
    /// Bytes delivered to the receiving endpoint per simulated second of the
    /// bulk transfer.
    std::vector<std::uint64_t> transfer_series;
    std::vector<std::uint64_t> throughput_series;
    SimTime completion_time = 0;
    /// Packets processed per SF during the bulk transfer.
    std::map<std::string, std::uint64_t> sf_packet_counts;
    std::map<std::string, std::uint64_t> sf_reverse_packet_counts;

    std::uint64_t datagrams_sent = 0;
    std::uint64_t datagrams_delivered = 0;
    std::uint64_t bytes_delivered = 0;

    // All packets of the run, probes included.
    std::uint64_t packets_injected = 0;
    std::uint64_t packets_delivered = 0;
    std::uint64_t packets_dropped = 0;
    std::uint64_t mac_mismatches = 0;
    std::uint64_t packet_ins = 0;

    std::vector<TraceEvent> trace;

    bool operator==(const Metrics&) const = default;
};

/// bytes_delivered * 8 / completion_time; 0 when nothing completed.
double mean_throughput_bps(const Metrics& m);

/// Forward when the header equals a registered flow, reverse when it equals
/// one's swap.
std::optional<std::pair<model::SfcId, Direction>> classify(const Packet& pkt,
                                                           const Repository& repo);

/// FIFO single-server model of an SF.
class SfQueue
{
public:
    /// Time at which a packet arriving at `now` leaves the SF.
    SimTime transit(SimTime now, SimTime service_time);

    std::uint64_t packets() const { return packets_; }
    SimTime free_at() const { return free_at_; }

private:
    SimTime free_at_ = 0;
    std::uint64_t packets_ = 0;
};

std::pair<Packet, SimTime> sf_transit(const Packet& pkt, const ServiceFunction& sf, SimTime now,
                                      SfQueue& queue);

/// Runs the RTT probes then the bulk transfer on one timeline.
Metrics run_simulation(const Repository& repo, const SimConfig& cfg, Scenario scenario);

std::vector<SimTime> measure_rtt(const Repository& repo, const SimConfig& cfg, Scenario scenario,
                                 std::size_t n_probes);

/// cfg.repetitions independent runs with seeds rng_seed + i, in parallel.
std::vector<Metrics> run_repetitions(const Repository& repo, const SimConfig& cfg,
                                     Scenario scenario);

/// Single-threaded reference for run_repetitions.
std::vector<Metrics> run_repetitions_serial(const Repository& repo, const SimConfig& cfg,
                                            Scenario scenario);

/// JSON with keys rtt_samples_ns, transfer_bytes_per_s, throughput_bps_per_s,
/// completion_ns, sf_packet_counts (plus counters).
std::string serialize_metrics(const Metrics& m);

/// One `time_ns,event_kind,node_id,packet_seq` line per event.
std::string format_trace(const std::vector<TraceEvent>& trace);

/// Repository as the scenario sees it (all SFs symmetric for `full`, the
/// optional delay override applied).
Repository scenario_repository(const Repository& repo, const SimConfig& cfg, Scenario scenario);

} // namespace sfc::sim
