#include "sfc/sim/simulator.hpp"

#include <algorithm>
#include <exception>
#include <queue>
#include <random>

#include <json.hpp>

#include "sfc/errors.hpp"
#include "sfc/model/repository.hpp"
#include "sfc/path/path_engine.hpp"
#include "sfc/sim/flow_table.hpp"

namespace sfc::sim {

using model::Endpoint;
using model::Link;

std::string_view to_string(Scenario s) { return s == Scenario::partial ? "partial" : "full"; }

std::optional<Scenario> parse_scenario(std::string_view text)
{
    if (text == "partial") return Scenario::partial;
    if (text == "full") return Scenario::full;
    return std::nullopt;
}

void check_config(const SimConfig& cfg)
{
    if (cfg.repetitions < 1) throw SimulationError("repetitions must be >= 1");
    if (cfg.traffic.offered_rate_bps == 0) throw SimulationError("offered rate must be > 0");
    if (cfg.traffic.payload_size == 0) throw SimulationError("payload size must be > 0");
    if (cfg.probe_size == 0) throw SimulationError("probe size must be > 0");
    if (cfg.sf_jitter < 0 || cfg.packet_in_latency < 0)
        throw SimulationError("delays must be non-negative");
    if (cfg.per_sf_processing_delay && *cfg.per_sf_processing_delay < 0)
        throw SimulationError("processing delay must be non-negative");
}

double mean_throughput_bps(const Metrics& m)
{
    if (m.completion_time <= 0) return 0.0;
    return static_cast<double>(m.bytes_delivered) * 8.0 * static_cast<double>(kNanosPerSecond)
           / static_cast<double>(m.completion_time);
}

std::optional<std::pair<model::SfcId, Direction>> classify(const Packet& pkt,
                                                           const Repository& repo)
{
    for (const auto& flow : repo.flows) {
        if (flow.same_tuple(pkt.header)) return std::pair{flow.sfc_id, Direction::forward};
        if (flow.reversed().same_tuple(pkt.header))
            return std::pair{flow.sfc_id, Direction::reverse};
    }
    return std::nullopt;
}

SimTime SfQueue::transit(SimTime now, SimTime service_time)
{
    SimTime start = std::max(now, free_at_);
    free_at_ = start + service_time;
    ++packets_;
    return free_at_;
}

std::pair<Packet, SimTime> sf_transit(const Packet& pkt, const ServiceFunction& sf, SimTime now,
                                      SfQueue& queue)
{
    return {pkt, queue.transit(now, sf.processing_delay)};
}

Repository scenario_repository(const Repository& repo, const SimConfig& cfg, Scenario scenario)
{
    Repository out = scenario == Scenario::full ? model::with_full_symmetry(repo) : repo;
    if (cfg.per_sf_processing_delay)
        out = model::with_processing_delay(out, *cfg.per_sf_processing_delay);
    return out;
}

namespace {

constexpr std::uint16_t kMaxHops = 255;

SimTime serialization_time(std::uint64_t bytes, std::uint64_t capacity_bps)
{
    if (capacity_bps == 0) return 0;
    unsigned __int128 bits_ns = static_cast<unsigned __int128>(bytes) * 8u * kNanosPerSecond;
    return static_cast<SimTime>((bits_ns + capacity_bps - 1) / capacity_bps);
}

enum class Role : std::uint8_t { data, probe_request, probe_reply };

enum class AttachKind : std::uint8_t { none, link, sf, endpoint };

struct Attachment
{
    AttachKind kind = AttachKind::none;
    std::size_t index = 0;
    bool flag = false; // link: this SFF is side a; sf: this is the SF's in_port
};

struct SffState
{
    std::string id;
    std::map<PortNo, Attachment> ports;
    FlowTable table;
};

struct LinkState
{
    const Link* link = nullptr;
    std::size_t sff_a = 0;
    std::size_t sff_b = 0;
    SimTime free_at[2] = {0, 0}; // [0] a->b, [1] b->a
};

struct SfState
{
    const ServiceFunction* sf = nullptr;
    SfQueue queue;
    std::uint64_t data_forward = 0;
    std::uint64_t data_reverse = 0;
};

struct PacketState
{
    Packet pkt;
    Role role = Role::data;
    Direction direction = Direction::forward;
    std::uint16_t hops = 0;
};

enum class EventKind : std::uint8_t { arrive, reinject, inject_data };

struct Event
{
    SimTime time = 0;
    std::uint64_t order = 0;
    EventKind kind = EventKind::arrive;
    std::size_t packet = 0;
    std::size_t sff = 0;
    PortNo port = 0;
    std::size_t aux = 0;

    bool operator>(const Event& o) const
    {
        return time != o.time ? time > o.time : order > o.order;
    }
};

class Engine
{
public:
    Engine(const Repository& repo, const SimConfig& cfg)
        : repo_(repo), cfg_(cfg), rng_(cfg.rng_seed)
    {
        for (const auto& sff : repo_.topology.sffs) {
            sff_index_[sff.id] = sffs_.size();
            sffs_.push_back(SffState{sff.id, {}, {}});
        }
        for (std::size_t i = 0; i < repo_.topology.links.size(); ++i) {
            const Link& link = repo_.topology.links[i];
            LinkState st;
            st.link = &link;
            st.sff_a = sff_index_.at(link.a.sff_id);
            st.sff_b = sff_index_.at(link.b.sff_id);
            sffs_[st.sff_a].ports[link.a.port] = {AttachKind::link, i, true};
            sffs_[st.sff_b].ports[link.b.port] = {AttachKind::link, i, false};
            links_.push_back(st);
        }
        for (const auto& [id, sf] : repo_.sfs) {
            std::size_t i = sfs_.size();
            sfs_.push_back(SfState{&sf, {}, 0, 0});
            auto& ports = sffs_[sff_index_.at(sf.sff_id)].ports;
            ports[sf.in_port] = {AttachKind::sf, i, true};
            ports[sf.out_port] = {AttachKind::sf, i, false};
        }
        for (std::size_t i = 0; i < repo_.topology.endpoints.size(); ++i) {
            const Endpoint& ep = repo_.topology.endpoints[i];
            sffs_[sff_index_.at(ep.sff_id)].ports[ep.port] = {AttachKind::endpoint, i, false};
        }
        for (const auto& [id, sf] : repo_.sfs) {
            metrics_.sf_packet_counts[id] = 0;
            metrics_.sf_reverse_packet_counts[id] = 0;
        }
    }

    void run_probes(const FlowSpec& flow, std::size_t n)
    {
        if (n == 0) return;
        probe_flow_ = flow;
        probe_client_ = &endpoint_for(flow.src_ip, flow);
        probe_server_ = &endpoint_for(flow.dst_ip, flow);
        probes_left_ = n;
        send_probe(now_);
        drain();
        if (metrics_.rtt_samples.size() != n)
            throw SimulationError("probe flow " + flow.str() + " undeliverable: "
                                  + std::to_string(metrics_.rtt_samples.size()) + " of "
                                  + std::to_string(n) + " replies received");
    }

    void run_transfer(const FlowSpec& flow)
    {
        const auto& tr = cfg_.traffic;
        const bool reverse = tr.direction == Direction::reverse;
        data_header_ = reverse ? flow.reversed() : flow;
        data_sender_ = &endpoint_for(reverse ? flow.dst_ip : flow.src_ip, flow);
        data_receiver_ = &endpoint_for(reverse ? flow.src_ip : flow.dst_ip, flow);
        data_direction_ = tr.direction;
        datagrams_ = (tr.total_bytes + tr.payload_size - 1) / tr.payload_size;
        transfer_start_ = now_;
        if (datagrams_ == 0) return;

        push({departure(0), 0, EventKind::inject_data, 0, 0, 0, 0});
        drain();

        metrics_.datagrams_sent = datagrams_;
        if (metrics_.datagrams_delivered != datagrams_)
            throw SimulationError("flow " + flow.str() + " undeliverable: "
                                  + std::to_string(metrics_.datagrams_delivered) + " of "
                                  + std::to_string(datagrams_) + " datagrams delivered");
        metrics_.completion_time = last_delivery_ - transfer_start_;
        metrics_.throughput_series.reserve(metrics_.transfer_series.size());
        for (auto bytes : metrics_.transfer_series) metrics_.throughput_series.push_back(bytes * 8);
        for (const auto& st : sfs_) {
            metrics_.sf_packet_counts[st.sf->id] = st.data_forward + st.data_reverse;
            metrics_.sf_reverse_packet_counts[st.sf->id] = st.data_reverse;
        }
    }

    Metrics take() { return std::move(metrics_); }

private:
    const Endpoint& endpoint_for(model::Ipv4Address ip, const FlowSpec& flow) const
    {
        const Endpoint* ep = repo_.topology.find_endpoint_by_ip(ip);
        if (!ep) throw SimulationError("flow " + flow.str() + " has no endpoint " + ip.str());
        return *ep;
    }

    SimTime departure(std::uint64_t k) const
    {
        const auto& tr = cfg_.traffic;
        std::uint64_t bytes = std::min<std::uint64_t>((k + 1) * tr.payload_size, tr.total_bytes);
        unsigned __int128 bits_ns = static_cast<unsigned __int128>(bytes) * 8u * kNanosPerSecond;
        return transfer_start_
               + static_cast<SimTime>((bits_ns + tr.offered_rate_bps - 1) / tr.offered_rate_bps);
    }

    void push(Event e)
    {
        e.order = next_order_++;
        queue_.push(e);
    }

    void trace(const char* kind, const std::string& node, std::uint64_t seq)
    {
        if (cfg_.record_trace) metrics_.trace.push_back({now_, kind, node, seq});
    }

    void drain()
    {
        while (!queue_.empty()) {
            Event e = queue_.top();
            queue_.pop();
            now_ = e.time;
            switch (e.kind) {
            case EventKind::arrive: arrive(e.packet, e.sff, e.port); break;
            case EventKind::reinject: reinject(e); break;
            case EventKind::inject_data: inject_data(e.aux); break;
            }
        }
    }

    std::size_t new_packet(const Endpoint& from, const Endpoint& to, const FlowSpec& header,
                           std::uint32_t size, Role role, Direction dir)
    {
        PacketState st;
        st.pkt.eth_src = from.mac;
        st.pkt.eth_dst = to.mac;
        st.pkt.header = header;
        st.pkt.payload_size = size;
        st.pkt.seq = next_seq_++;
        st.pkt.created_at = now_;
        st.role = role;
        st.direction = dir;
        packets_.push_back(st);
        return packets_.size() - 1;
    }

    void inject(std::size_t p, const Endpoint& from)
    {
        ++metrics_.packets_injected;
        trace("inject", from.id, packets_[p].pkt.seq);
        arrive(p, sff_index_.at(from.sff_id), from.port);
    }

    void send_probe(SimTime)
    {
        --probes_left_;
        std::size_t p = new_packet(*probe_client_, *probe_server_, probe_flow_, cfg_.probe_size,
                                   Role::probe_request, Direction::forward);
        probe_started_ = now_;
        inject(p, *probe_client_);
    }

    void inject_data(std::uint64_t k)
    {
        const auto& tr = cfg_.traffic;
        std::uint64_t offset = k * tr.payload_size;
        auto size = static_cast<std::uint32_t>(
            std::min<std::uint64_t>(tr.payload_size, tr.total_bytes - offset));
        std::size_t p = new_packet(*data_sender_, *data_receiver_, data_header_, size, Role::data,
                                   data_direction_);
        if (k + 1 < datagrams_) push({departure(k + 1), 0, EventKind::inject_data, 0, 0, 0, k + 1});
        inject(p, *data_sender_);
    }

    void drop(std::size_t p, const std::string& node)
    {
        ++metrics_.packets_dropped;
        trace("drop", node, packets_[p].pkt.seq);
    }

    void arrive(std::size_t p, std::size_t sff, PortNo port)
    {
        SffState& s = sffs_[sff];
        PacketState& st = packets_[p];
        trace("sff", s.id, st.pkt.seq);
        if (++st.hops > kMaxHops) {
            drop(p, s.id);
            return;
        }
        const FlowRule* rule = s.table.match(st.pkt, port);
        if (!rule) {
            packet_in(p, sff, port);
            return;
        }
        PortNo out = 0;
        for (const auto& action : rule->actions) {
            if (auto* set = std::get_if<path::SetEthDst>(&action)) st.pkt.eth_dst = set->mac;
            else out = std::get<path::Output>(action).port;
        }
        output(p, sff, out);
    }

    void packet_in(std::size_t p, std::size_t sff, PortNo port)
    {
        ++metrics_.packet_ins;
        const Packet& pkt = packets_[p].pkt;
        trace("packet_in", sffs_[sff].id, pkt.seq);
        auto rules = path::handle_packet_in(repo_, {sffs_[sff].id, port, pkt.header, pkt.eth_dst});
        if (rules.empty()) {
            drop(p, sffs_[sff].id);
            return;
        }
        pending_.push_back(std::move(rules));
        push({now_ + cfg_.packet_in_latency, 0, EventKind::reinject, p, sff, port,
              pending_.size() - 1});
    }

    void reinject(const Event& e)
    {
        for (auto& [sff_id, rule] : pending_[e.aux]) sffs_[sff_index_.at(sff_id)].table.install(rule);
        pending_[e.aux].clear();
        // The re-injected packet does not count as another hop.
        --packets_[e.packet].hops;
        arrive(e.packet, e.sff, e.port);
    }

    void output(std::size_t p, std::size_t sff, PortNo port)
    {
        SffState& s = sffs_[sff];
        auto it = s.ports.find(port);
        if (it == s.ports.end() || it->second.kind == AttachKind::none) {
            drop(p, s.id);
            return;
        }
        const Attachment& at = it->second;
        PacketState& st = packets_[p];
        switch (at.kind) {
        case AttachKind::link: {
            LinkState& l = links_[at.index];
            int dir = at.flag ? 0 : 1;
            SimTime start = std::max(now_, l.free_at[dir]);
            SimTime done = start + serialization_time(st.pkt.payload_size, l.link->capacity_bps);
            l.free_at[dir] = done;
            trace("link", s.id, st.pkt.seq);
            const auto& far = at.flag ? l.link->b : l.link->a;
            push({done + l.link->delay, 0, EventKind::arrive, p,
                  at.flag ? l.sff_b : l.sff_a, far.port, 0});
            break;
        }
        case AttachKind::sf: {
            SfState& sf = sfs_[at.index];
            trace("sf", sf.sf->id, st.pkt.seq);
            SimTime service = sf.sf->processing_delay;
            if (cfg_.sf_jitter > 0)
                service += static_cast<SimTime>(rng_() % static_cast<std::uint64_t>(cfg_.sf_jitter + 1));
            SimTime ready = sf.queue.transit(now_, service);
            if (st.role == Role::data)
                ++(st.direction == Direction::forward ? sf.data_forward : sf.data_reverse);
            PortNo exit = at.flag ? sf.sf->out_port : sf.sf->in_port;
            push({ready, 0, EventKind::arrive, p, sff, exit, 0});
            break;
        }
        case AttachKind::endpoint:
            deliver(p, repo_.topology.endpoints[at.index]);
            break;
        case AttachKind::none:
            break;
        }
    }

    void deliver(std::size_t p, const Endpoint& ep)
    {
        PacketState& st = packets_[p];
        ++metrics_.packets_delivered;
        trace("deliver", ep.id, st.pkt.seq);
        if (st.pkt.eth_dst != ep.mac) ++metrics_.mac_mismatches;

        switch (st.role) {
        case Role::data: {
            if (&ep != data_receiver_) return;
            ++metrics_.datagrams_delivered;
            metrics_.bytes_delivered += st.pkt.payload_size;
            last_delivery_ = now_;
            auto bin = static_cast<std::size_t>((now_ - transfer_start_) / kNanosPerSecond);
            if (metrics_.transfer_series.size() <= bin) metrics_.transfer_series.resize(bin + 1, 0);
            metrics_.transfer_series[bin] += st.pkt.payload_size;
            break;
        }
        case Role::probe_request: {
            if (&ep != probe_server_) return;
            std::size_t reply = new_packet(*probe_server_, *probe_client_, probe_flow_.reversed(),
                                           cfg_.probe_size, Role::probe_reply, Direction::reverse);
            inject(reply, *probe_server_);
            break;
        }
        case Role::probe_reply:
            if (&ep != probe_client_) return;
            metrics_.rtt_samples.push_back(now_ - probe_started_);
            if (probes_left_ > 0) send_probe(now_);
            break;
        }
    }

    const Repository& repo_;
    const SimConfig& cfg_;
    std::mt19937_64 rng_;

    std::map<std::string, std::size_t> sff_index_;
    std::vector<SffState> sffs_;
    std::vector<LinkState> links_;
    std::vector<SfState> sfs_;
    std::vector<PacketState> packets_;
    std::vector<std::vector<path::SffRule>> pending_;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;

    SimTime now_ = 0;
    std::uint64_t next_order_ = 0;
    std::uint64_t next_seq_ = 0;

    FlowSpec probe_flow_;
    const Endpoint* probe_client_ = nullptr;
    const Endpoint* probe_server_ = nullptr;
    std::size_t probes_left_ = 0;
    SimTime probe_started_ = 0;

    FlowSpec data_header_;
    const Endpoint* data_sender_ = nullptr;
    const Endpoint* data_receiver_ = nullptr;
    Direction data_direction_ = Direction::reverse;
    std::uint64_t datagrams_ = 0;
    SimTime transfer_start_ = 0;
    SimTime last_delivery_ = 0;

    Metrics metrics_;
};

FlowSpec pick_data_flow(const Repository& repo, const SimConfig& cfg)
{
    if (cfg.data_flow) {
        Packet probe;
        probe.header = *cfg.data_flow;
        if (!classify(probe, repo))
            throw SimulationError("flow " + cfg.data_flow->str() + " is not registered");
        return *cfg.data_flow;
    }
    for (const auto& f : repo.flows)
        if (f.protocol != model::Protocol::icmp) return f;
    throw SimulationError("repository registers no data flow");
}

std::optional<FlowSpec> pick_probe_flow(const Repository& repo, const SimConfig& cfg,
                                        std::optional<model::SfcId> sfc)
{
    if (cfg.probe_flow) {
        Packet probe;
        probe.header = *cfg.probe_flow;
        if (!classify(probe, repo))
            throw SimulationError("probe flow " + cfg.probe_flow->str() + " is not registered");
        return cfg.probe_flow;
    }
    for (const auto& f : repo.flows)
        if (f.protocol == model::Protocol::icmp && (!sfc || f.sfc_id == *sfc)) return f;
    return std::nullopt;
}

} // namespace

Metrics run_simulation(const Repository& repo, const SimConfig& cfg, Scenario scenario)
{
    check_config(cfg);
    const Repository effective = scenario_repository(repo, cfg, scenario);
    const FlowSpec data = pick_data_flow(effective, cfg);
    Engine engine(effective, cfg);
    if (auto probe = pick_probe_flow(effective, cfg, data.sfc_id))
        engine.run_probes(*probe, cfg.rtt_probes);
    engine.run_transfer(data);
    return engine.take();
}

std::vector<SimTime> measure_rtt(const Repository& repo, const SimConfig& cfg, Scenario scenario,
                                 std::size_t n_probes)
{
    check_config(cfg);
    if (n_probes < 1) throw SimulationError("n_probes must be >= 1");
    const Repository effective = scenario_repository(repo, cfg, scenario);
    auto probe = pick_probe_flow(effective, cfg, std::nullopt);
    if (!probe) throw SimulationError("repository registers no ICMP probe flow");
    Engine engine(effective, cfg);
    engine.run_probes(*probe, n_probes);
    return engine.take().rtt_samples;
}

namespace {

SimConfig repetition_config(const SimConfig& cfg, std::size_t i)
{
    SimConfig c = cfg;
    c.rng_seed = cfg.rng_seed + i;
    return c;
}

} // namespace

std::vector<Metrics> run_repetitions(const Repository& repo, const SimConfig& cfg,
                                     Scenario scenario)
{
    check_config(cfg);
    const auto n = static_cast<std::ptrdiff_t>(cfg.repetitions);
    std::vector<Metrics> out(cfg.repetitions);
    std::vector<std::exception_ptr> errors(cfg.repetitions);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[i] = run_simulation(repo, repetition_config(cfg, i), scenario);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

std::vector<Metrics> run_repetitions_serial(const Repository& repo, const SimConfig& cfg,
                                            Scenario scenario)
{
    check_config(cfg);
    std::vector<Metrics> out;
    out.reserve(cfg.repetitions);
    for (std::size_t i = 0; i < cfg.repetitions; ++i)
        out.push_back(run_simulation(repo, repetition_config(cfg, i), scenario));
    return out;
}

std::string serialize_metrics(const Metrics& m)
{
    nlohmann::ordered_json j;
    j["rtt_samples_ns"] = m.rtt_samples;
    j["transfer_bytes_per_s"] = m.transfer_series;
    j["throughput_bps_per_s"] = m.throughput_series;
    j["completion_ns"] = m.completion_time;
    j["sf_packet_counts"] = m.sf_packet_counts;
    j["sf_reverse_packet_counts"] = m.sf_reverse_packet_counts;
    j["datagrams_sent"] = m.datagrams_sent;
    j["datagrams_delivered"] = m.datagrams_delivered;
    j["bytes_delivered"] = m.bytes_delivered;
    j["packets_injected"] = m.packets_injected;
    j["packets_delivered"] = m.packets_delivered;
    j["packets_dropped"] = m.packets_dropped;
    j["mac_mismatches"] = m.mac_mismatches;
    j["packet_ins"] = m.packet_ins;
    return j.dump(2) + "\n";
}

std::string format_trace(const std::vector<TraceEvent>& trace)
{
    std::string out;
    for (const auto& e : trace)
        out += std::to_string(e.time) + "," + e.kind + "," + e.node + "," + std::to_string(e.seq)
               + "\n";
    return out;
}

} // namespace sfc::sim
