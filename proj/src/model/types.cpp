#include "sfc/model/types.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

namespace sfc::model {

namespace {

int hex_value(char c)
{
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

} // namespace

std::optional<MacAddress> MacAddress::parse(std::string_view text)
{
    if (text.size() != 17) return std::nullopt;
    std::array<std::uint8_t, 6> octets{};
    for (std::size_t i = 0; i < 6; ++i) {
        std::size_t at = i * 3;
        int hi = hex_value(text[at]);
        int lo = hex_value(text[at + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        if (i < 5 && text[at + 2] != ':') return std::nullopt;
        octets[i] = static_cast<std::uint8_t>(hi * 16 + lo);
    }
    return MacAddress(octets);
}

std::string MacAddress::str() const
{
    char buf[18];
    std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x:%02x:%02x:%02x", octets_[0], octets_[1],
                  octets_[2], octets_[3], octets_[4], octets_[5]);
    return buf;
}

std::optional<Ipv4Address> Ipv4Address::parse(std::string_view text)
{
    std::uint32_t value = 0;
    const char* p = text.data();
    const char* end = text.data() + text.size();
    for (int i = 0; i < 4; ++i) {
        unsigned octet = 0;
        auto [next, ec] = std::from_chars(p, end, octet);
        if (ec != std::errc{} || next == p || octet > 255 || next - p > 3) return std::nullopt;
        value = (value << 8) | octet;
        p = next;
        if (i < 3) {
            if (p == end || *p != '.') return std::nullopt;
            ++p;
        }
    }
    if (p != end) return std::nullopt;
    return Ipv4Address(value);
}

std::string Ipv4Address::str() const
{
    return std::to_string(value_ >> 24) + "." + std::to_string((value_ >> 16) & 0xff) + "."
           + std::to_string((value_ >> 8) & 0xff) + "." + std::to_string(value_ & 0xff);
}

std::string_view to_string(Protocol p)
{
    switch (p) {
    case Protocol::udp: return "udp";
    case Protocol::tcp: return "tcp";
    case Protocol::icmp: return "icmp";
    }
    return "?";
}

std::optional<Protocol> parse_protocol(std::string_view text)
{
    if (text == "udp") return Protocol::udp;
    if (text == "tcp") return Protocol::tcp;
    if (text == "icmp") return Protocol::icmp;
    return std::nullopt;
}

std::string_view to_string(Direction d)
{
    return d == Direction::forward ? "forward" : "reverse";
}

std::string FlowSpec::str() const
{
    return std::string(to_string(protocol)) + " " + src_ip.str() + ":" + std::to_string(src_port)
           + " -> " + dst_ip.str() + ":" + std::to_string(dst_port) + " sfc "
           + std::to_string(sfc_id);
}

const ServiceFunctionForwarder* Topology::find_sff(std::string_view id) const
{
    auto it = std::find_if(sffs.begin(), sffs.end(), [&](const auto& s) { return s.id == id; });
    return it == sffs.end() ? nullptr : &*it;
}

const Endpoint* Topology::find_endpoint(std::string_view id) const
{
    auto it = std::find_if(endpoints.begin(), endpoints.end(),
                           [&](const auto& e) { return e.id == id; });
    return it == endpoints.end() ? nullptr : &*it;
}

const Endpoint* Topology::find_endpoint_by_ip(Ipv4Address ip) const
{
    auto it = std::find_if(endpoints.begin(), endpoints.end(),
                           [&](const auto& e) { return e.ip == ip; });
    return it == endpoints.end() ? nullptr : &*it;
}

} // namespace sfc::model
