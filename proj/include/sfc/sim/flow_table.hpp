#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sfc/path/path_engine.hpp"
#include "sfc/sim/packet.hpp"

namespace sfc::sim {

using path::FlowRule;

bool rule_matches(const FlowRule& rule, const Packet& pkt, PortNo in_port);

/// Per-SFF rule set. Lookup order: highest priority, then most populated
/// match, then earliest installed. A miss means packet-in.
class FlowTable
{
public:
    /// Returns false (and changes nothing) when an identical rule is present.
    bool install(FlowRule rule);

    const FlowRule* match(const Packet& pkt, PortNo in_port) const;

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    /// Rules in installation order.
    std::vector<FlowRule> installed() const;

private:
    struct Entry
    {
        FlowRule rule;
        int specificity = 0;
        std::size_t installed_at = 0;
    };

    // Kept sorted in lookup order.
    std::vector<Entry> entries_;
    std::size_t next_install_ = 0;
};

inline const FlowRule* flow_table_match(const FlowTable& table, const Packet& pkt, PortNo in_port)
{
    return table.match(pkt, in_port);
}

/// Batch lookup, parallel over packets. `out[i]` is the match for
/// `packets[i]` arriving on `in_ports[i]`.
void match_batch(const FlowTable& table, std::span<const Packet> packets,
                 std::span<const PortNo> in_ports, std::span<const FlowRule*> out);

/// Single-threaded reference for match_batch.
void match_batch_serial(const FlowTable& table, std::span<const Packet> packets,
                        std::span<const PortNo> in_ports, std::span<const FlowRule*> out);

} // namespace sfc::sim
