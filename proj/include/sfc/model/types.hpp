#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sfc::model {

using SfcId = std::uint8_t;
using PortNo = std::uint32_t;
using SimTime = std::int64_t; // nanoseconds

class MacAddress
{
public:
    constexpr MacAddress() = default;
    constexpr explicit MacAddress(std::array<std::uint8_t, 6> octets) : octets_(octets) {}

    /// Accepts `aa:bb:cc:dd:ee:ff` (either case); returns nullopt otherwise.
    static std::optional<MacAddress> parse(std::string_view text);

    /// Canonical lowercase colon-separated form.
    std::string str() const;

    const std::array<std::uint8_t, 6>& octets() const { return octets_; }

    auto operator<=>(const MacAddress&) const = default;

private:
    std::array<std::uint8_t, 6> octets_{};
};

class Ipv4Address
{
public:
    constexpr Ipv4Address() = default;
    constexpr explicit Ipv4Address(std::uint32_t value) : value_(value) {}

    static std::optional<Ipv4Address> parse(std::string_view text);
    std::string str() const;
    std::uint32_t value() const { return value_; }

    auto operator<=>(const Ipv4Address&) const = default;

private:
    std::uint32_t value_ = 0;
};

enum class Protocol : std::uint8_t { udp, tcp, icmp };

std::string_view to_string(Protocol p);
std::optional<Protocol> parse_protocol(std::string_view text);

enum class Direction : std::uint8_t { forward, reverse };

std::string_view to_string(Direction d);

/// A unidirectional 5-tuple bound to a chain. The reverse direction of a
/// flow uses the swapped tuple and the same sfc_id.
struct FlowSpec
{
    Ipv4Address src_ip;
    Ipv4Address dst_ip;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    Protocol protocol = Protocol::udp;
    SfcId sfc_id = 0;

    FlowSpec reversed() const
    {
        return {dst_ip, src_ip, dst_port, src_port, protocol, sfc_id};
    }

    /// Compares the 5-tuple only.
    bool same_tuple(const FlowSpec& other) const
    {
        return src_ip == other.src_ip && dst_ip == other.dst_ip
               && src_port == other.src_port && dst_port == other.dst_port
               && protocol == other.protocol;
    }

    std::string str() const;

    auto operator<=>(const FlowSpec&) const = default;
};

struct ServiceFunction
{
    std::string id;
    MacAddress mac;
    std::string sff_id;
    PortNo in_port = 0;
    PortNo out_port = 0;
    bool requires_symmetry = true;
    SimTime processing_delay = 0;
    std::string role;
    bool available = true;

    bool operator==(const ServiceFunction&) const = default;
};

struct ServiceFunctionForwarder
{
    std::string id;
    std::vector<PortNo> ports;

    bool operator==(const ServiceFunctionForwarder&) const = default;
};

struct Endpoint
{
    std::string id;
    MacAddress mac;
    std::string sff_id;
    PortNo port = 0;
    Ipv4Address ip;

    bool operator==(const Endpoint&) const = default;
};

struct PortRef
{
    std::string sff_id;
    PortNo port = 0;

    auto operator<=>(const PortRef&) const = default;
};

struct Link
{
    PortRef a;
    PortRef b;
    SimTime delay = 0;
    std::uint64_t capacity_bps = 0; // 0 = unlimited

    bool operator==(const Link&) const = default;
};

struct Topology
{
    std::vector<ServiceFunctionForwarder> sffs;
    std::vector<Endpoint> endpoints;
    std::vector<Link> links;

    const ServiceFunctionForwarder* find_sff(std::string_view id) const;
    const Endpoint* find_endpoint(std::string_view id) const;
    const Endpoint* find_endpoint_by_ip(Ipv4Address ip) const;

    bool operator==(const Topology&) const = default;
};

struct ServiceChain
{
    SfcId sfc_id = 0;
    std::vector<std::string> sf_sequence;

    bool operator==(const ServiceChain&) const = default;
};

using SfCatalog = std::map<std::string, ServiceFunction, std::less<>>;

/// Administrator-populated store of chains, SFs, flows and topology.
/// Treated as an immutable value once loaded; updates build a new value.
struct Repository
{
    Topology topology;
    SfCatalog sfs;
    std::map<SfcId, ServiceChain> chains;
    std::vector<FlowSpec> flows;

    bool operator==(const Repository&) const = default;
};

} // namespace sfc::model
