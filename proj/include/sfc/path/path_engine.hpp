#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sfc/model/types.hpp"

namespace sfc::path {

using model::Direction;
using model::FlowSpec;
using model::MacAddress;
using model::PortNo;
using model::Repository;
using model::ServiceChain;
using model::SfCatalog;
using model::Topology;

/// One forwarding decision at an SFF: a packet entering on `ingress_port`
/// gets its destination MAC set to `next_mac` and leaves on `egress_port`.
struct Hop
{
    std::string sff_id;
    PortNo ingress_port = 0;
    MacAddress next_mac;
    PortNo egress_port = 0;

    bool operator==(const Hop&) const = default;
};

struct HopPath
{
    Direction direction = Direction::forward;
    model::SfcId sfc_id = 0;
    std::vector<Hop> hops;
    /// MAC the packet carried when it left its source; restored at the last hop.
    MacAddress terminal_restore_mac;
    /// SFs visited, in visiting order.
    std::vector<std::string> sf_visits;

    bool operator==(const HopPath&) const = default;
};

struct SetEthDst
{
    MacAddress mac;
    bool operator==(const SetEthDst&) const = default;
};

struct Output
{
    PortNo port = 0;
    bool operator==(const Output&) const = default;
};

using Action = std::variant<SetEthDst, Output>;

/// Absent fields are wildcards.
struct Match
{
    std::optional<PortNo> in_port;
    std::optional<MacAddress> eth_dst;
    std::optional<model::Ipv4Address> src_ip;
    std::optional<model::Ipv4Address> dst_ip;
    std::optional<std::uint16_t> src_port;
    std::optional<std::uint16_t> dst_port;
    std::optional<model::Protocol> protocol;

    /// Number of populated fields.
    int specificity() const;

    bool operator==(const Match&) const = default;
};

struct FlowRule
{
    std::string sff_id;
    std::uint32_t priority = 0;
    Match match;
    std::vector<Action> actions;

    bool operator==(const FlowRule&) const = default;
};

/// Priority used for every steering rule. 0 is the table-miss entry.
inline constexpr std::uint32_t kSteeringPriority = 100;

using SffRule = std::pair<std::string, FlowRule>;

/// Reverse-direction SF order: the forward sequence walked tail to head,
/// keeping only SFs that require symmetry.
std::vector<std::string> compute_reverse_sf_sequence(const ServiceChain& chain,
                                                     const SfCatalog& catalog);

HopPath compute_forward_path(const ServiceChain& chain, const FlowSpec& flow,
                             const Topology& topo, const SfCatalog& catalog);

HopPath compute_reverse_path(const ServiceChain& chain, const FlowSpec& flow,
                             const Topology& topo, const SfCatalog& catalog);

/// `flow` is always the forward (registered) FlowSpec; reverse paths match
/// on its swapped tuple.
std::vector<FlowRule> generate_flow_rules(const HopPath& path, const FlowSpec& flow);

struct PacketInMeta
{
    std::string sff_id;
    PortNo in_port = 0;
    FlowSpec header;
    MacAddress eth_dst;
};

/// Controller reaction to a table miss: the rules for both directions of
/// the matching registered flow, or nothing for unknown traffic.
std::vector<SffRule> handle_packet_in(const Repository& repo, const PacketInMeta& meta);

/// Shortest-hop SFF route with lexicographic tie-break on SFF ids.
/// Returns the SFF id sequence from `from` to `to`, both inclusive.
std::vector<std::string> shortest_sff_route(const Topology& topo, const std::string& from,
                                            const std::string& to);

std::string dump(const HopPath& path);
std::string dump(const FlowRule& rule);
std::string dump(const std::vector<FlowRule>& rules);

} // namespace sfc::path
