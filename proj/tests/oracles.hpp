#pragma once

// Reference implementations used as test oracles. Written against the
// public types only, without calling into the code under test.

#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sfc/path/path_engine.hpp"
#include "sfc/sim/packet.hpp"

namespace sfc::test {

// Backwards index walk keeping flagged SFs.
inline std::vector<std::string> reverse_filter_oracle(const std::vector<std::string>& seq,
                                                      const std::map<std::string, bool>& flags)
{
    std::vector<std::string> out;
    for (std::size_t i = seq.size(); i-- > 0;)
        if (flags.at(seq[i])) out.push_back(seq[i]);
    return out;
}

// Small value domains so that random rules and packets collide often.
inline path::FlowRule random_rule(std::mt19937_64& rng)
{
    using namespace model;
    path::FlowRule r;
    r.sff_id = "x";
    r.priority = std::uint32_t(rng() % 4) * 10;
    auto maybe = [&] { return rng() % 2 == 0; };
    if (maybe()) r.match.in_port = PortNo(1 + rng() % 3);
    if (maybe()) r.match.eth_dst = MacAddress({0, 0, 0, 0, 0, std::uint8_t(rng() % 3)});
    if (maybe()) r.match.src_ip = Ipv4Address(std::uint32_t(rng() % 3));
    if (maybe()) r.match.dst_ip = Ipv4Address(std::uint32_t(rng() % 3));
    if (maybe()) r.match.src_port = std::uint16_t(rng() % 3);
    if (maybe()) r.match.dst_port = std::uint16_t(rng() % 3);
    if (maybe()) r.match.protocol = Protocol(rng() % 3);
    r.actions = {path::Output{PortNo(rng() % 1000)}};
    return r;
}

inline std::pair<sim::Packet, model::PortNo> random_packet(std::mt19937_64& rng)
{
    using namespace model;
    sim::Packet p;
    p.eth_dst = MacAddress({0, 0, 0, 0, 0, std::uint8_t(rng() % 3)});
    p.header.src_ip = Ipv4Address(std::uint32_t(rng() % 3));
    p.header.dst_ip = Ipv4Address(std::uint32_t(rng() % 3));
    p.header.src_port = std::uint16_t(rng() % 3);
    p.header.dst_port = std::uint16_t(rng() % 3);
    p.header.protocol = Protocol(rng() % 3);
    return {p, PortNo(1 + rng() % 3)};
}

template <class T>
bool field_ok(const std::optional<T>& want, const T& have)
{
    return !want || *want == have;
}

inline int populated(const path::Match& m)
{
    int n = 0;
    n += m.in_port ? 1 : 0;
    n += m.eth_dst ? 1 : 0;
    n += m.src_ip ? 1 : 0;
    n += m.dst_ip ? 1 : 0;
    n += m.src_port ? 1 : 0;
    n += m.dst_port ? 1 : 0;
    n += m.protocol ? 1 : 0;
    return n;
}

// Linear scan in installation order, keeping the best by (priority,
// populated fields); the first one wins ties.
inline std::optional<path::FlowRule> linear_scan_oracle(const std::vector<path::FlowRule>& rules,
                                                        const sim::Packet& p, model::PortNo port)
{
    std::optional<path::FlowRule> best;
    for (const auto& r : rules) {
        const path::Match& m = r.match;
        bool hit = field_ok(m.in_port, port) && field_ok(m.eth_dst, p.eth_dst)
                   && field_ok(m.src_ip, p.header.src_ip) && field_ok(m.dst_ip, p.header.dst_ip)
                   && field_ok(m.src_port, p.header.src_port)
                   && field_ok(m.dst_port, p.header.dst_port)
                   && field_ok(m.protocol, p.header.protocol);
        if (!hit) continue;
        if (!best || r.priority > best->priority
            || (r.priority == best->priority && populated(m) > populated(best->match)))
            best = r;
    }
    return best;
}

} // namespace sfc::test
