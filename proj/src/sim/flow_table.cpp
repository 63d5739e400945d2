#include "sfc/sim/flow_table.hpp"

#include <algorithm>
#include <cassert>

namespace sfc::sim {

bool rule_matches(const FlowRule& rule, const Packet& pkt, PortNo in_port)
{
    const auto& m = rule.match;
    const auto& h = pkt.header;
    return (!m.in_port || *m.in_port == in_port) && (!m.eth_dst || *m.eth_dst == pkt.eth_dst)
           && (!m.src_ip || *m.src_ip == h.src_ip) && (!m.dst_ip || *m.dst_ip == h.dst_ip)
           && (!m.src_port || *m.src_port == h.src_port)
           && (!m.dst_port || *m.dst_port == h.dst_port)
           && (!m.protocol || *m.protocol == h.protocol);
}

bool FlowTable::install(FlowRule rule)
{
    auto same = [&](const Entry& e) { return e.rule == rule; };
    if (std::any_of(entries_.begin(), entries_.end(), same)) return false;

    Entry entry{std::move(rule), 0, next_install_++};
    entry.specificity = entry.rule.match.specificity();
    // Insert after every entry that precedes it in lookup order; equal keys
    // keep installation order.
    auto pos = std::upper_bound(entries_.begin(), entries_.end(), entry,
                                [](const Entry& a, const Entry& b) {
                                    if (a.rule.priority != b.rule.priority)
                                        return a.rule.priority > b.rule.priority;
                                    return a.specificity > b.specificity;
                                });
    entries_.insert(pos, std::move(entry));
    return true;
}

const FlowRule* FlowTable::match(const Packet& pkt, PortNo in_port) const
{
    for (const auto& e : entries_)
        if (rule_matches(e.rule, pkt, in_port)) return &e.rule;
    return nullptr;
}

std::vector<FlowRule> FlowTable::installed() const
{
    std::vector<const Entry*> order;
    order.reserve(entries_.size());
    for (const auto& e : entries_) order.push_back(&e);
    std::sort(order.begin(), order.end(),
              [](const Entry* a, const Entry* b) { return a->installed_at < b->installed_at; });
    std::vector<FlowRule> out;
    out.reserve(order.size());
    for (const auto* e : order) out.push_back(e->rule);
    return out;
}

void match_batch(const FlowTable& table, std::span<const Packet> packets,
                 std::span<const PortNo> in_ports, std::span<const FlowRule*> out)
{
    assert(packets.size() == in_ports.size() && packets.size() == out.size());
    const auto n = static_cast<std::ptrdiff_t>(packets.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = table.match(packets[i], in_ports[i]);
}

void match_batch_serial(const FlowTable& table, std::span<const Packet> packets,
                        std::span<const PortNo> in_ports, std::span<const FlowRule*> out)
{
    assert(packets.size() == in_ports.size() && packets.size() == out.size());
    for (std::size_t i = 0; i < packets.size(); ++i) out[i] = table.match(packets[i], in_ports[i]);
}

} // namespace sfc::sim
