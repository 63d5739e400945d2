#include "sfc/model/repository.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sfc/errors.hpp"

namespace sfc::model {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte)
{
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

// Shape errors carry the JSON path; nlohmann does not retain source offsets
// for values, so line/column are reported as 0.
[[noreturn]] void shape_error(const std::string& where, const std::string& what)
{
    throw ParseError(where + ": " + what, 0, 0);
}

const json& member(const json& obj, const char* key, const std::string& where)
{
    auto it = obj.find(key);
    if (it == obj.end()) shape_error(where, std::string("missing key \"") + key + "\"");
    return *it;
}

std::string get_string(const json& obj, const char* key, const std::string& where)
{
    const json& v = member(obj, key, where);
    if (!v.is_string()) shape_error(where + "." + key, "expected string");
    return v.get<std::string>();
}

std::uint64_t get_unsigned(const json& v, const std::string& where, std::uint64_t max)
{
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        shape_error(where, "expected non-negative integer");
    auto value = v.get<std::uint64_t>();
    if (value > max) shape_error(where, "value out of range");
    return value;
}

std::uint64_t get_unsigned(const json& obj, const char* key, const std::string& where,
                           std::uint64_t max)
{
    return get_unsigned(member(obj, key, where), where + "." + key, max);
}

SimTime get_micros(const json& obj, const char* key, const std::string& where, SimTime fallback)
{
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number()) shape_error(where + "." + key, "expected number");
    double us = it->get<double>();
    if (!(us >= 0.0)) shape_error(where + "." + key, "expected non-negative duration");
    return static_cast<SimTime>(std::llround(us * 1000.0));
}

bool get_bool(const json& obj, const char* key, const std::string& where, bool fallback)
{
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_boolean()) shape_error(where + "." + key, "expected boolean");
    return it->get<bool>();
}

MacAddress get_mac(const json& obj, const std::string& where)
{
    auto text = get_string(obj, "mac", where);
    auto mac = MacAddress::parse(text);
    if (!mac) shape_error(where + ".mac", "malformed MAC address \"" + text + "\"");
    return *mac;
}

Ipv4Address get_ip(const json& obj, const char* key, const std::string& where)
{
    auto text = get_string(obj, key, where);
    auto ip = Ipv4Address::parse(text);
    if (!ip) shape_error(where + "." + key, "malformed IPv4 address \"" + text + "\"");
    return *ip;
}

const json& array_member(const json& obj, const char* key, const std::string& where)
{
    static const json empty = json::array();
    auto it = obj.find(key);
    if (it == obj.end()) return empty;
    if (!it->is_array()) shape_error(where + "." + key, "expected array");
    return *it;
}

PortRef get_port_ref(const json& obj, const char* key, const std::string& where)
{
    const json& v = member(obj, key, where);
    std::string at = where + "." + key;
    if (!v.is_object()) shape_error(at, "expected object");
    return {get_string(v, "sff", at),
            static_cast<PortNo>(get_unsigned(v, "port", at, UINT32_MAX))};
}

Topology parse_topology(const json& doc)
{
    Topology topo;
    auto it = doc.find("topology");
    if (it == doc.end()) return topo;
    const json& t = *it;
    if (!t.is_object()) shape_error("topology", "expected object");

    std::set<std::string> ids;
    const json& sffs = array_member(t, "sffs", "topology");
    for (std::size_t i = 0; i < sffs.size(); ++i) {
        std::string where = "topology.sffs[" + std::to_string(i) + "]";
        ServiceFunctionForwarder sff;
        sff.id = get_string(sffs[i], "id", where);
        const json& ports = array_member(sffs[i], "ports", where);
        for (std::size_t p = 0; p < ports.size(); ++p)
            sff.ports.push_back(static_cast<PortNo>(
                get_unsigned(ports[p], where + ".ports[" + std::to_string(p) + "]", UINT32_MAX)));
        if (!ids.insert(sff.id).second)
            throw DuplicateIdError("duplicate SFF id \"" + sff.id + "\"", sff.id);
        topo.sffs.push_back(std::move(sff));
    }

    std::set<std::string> endpoint_ids;
    const json& endpoints = array_member(t, "endpoints", "topology");
    for (std::size_t i = 0; i < endpoints.size(); ++i) {
        std::string where = "topology.endpoints[" + std::to_string(i) + "]";
        const json& e = endpoints[i];
        Endpoint ep;
        ep.id = get_string(e, "id", where);
        ep.mac = get_mac(e, where);
        ep.sff_id = get_string(e, "sff", where);
        ep.port = static_cast<PortNo>(get_unsigned(e, "port", where, UINT32_MAX));
        if (e.contains("ip")) {
            ep.ip = get_ip(e, "ip", where);
        } else if (auto ip = Ipv4Address::parse(ep.id)) {
            ep.ip = *ip;
        } else {
            throw IntegrityError("endpoint \"" + ep.id + "\" has no \"ip\" and its id is not an "
                                 "IPv4 address", ep.id);
        }
        if (!ids.contains(ep.sff_id))
            throw IntegrityError("endpoint \"" + ep.id + "\" references unknown SFF \""
                                 + ep.sff_id + "\"", ep.sff_id);
        if (!endpoint_ids.insert(ep.id).second)
            throw DuplicateIdError("duplicate endpoint id \"" + ep.id + "\"", ep.id);
        topo.endpoints.push_back(std::move(ep));
    }

    const json& links = array_member(t, "links", "topology");
    for (std::size_t i = 0; i < links.size(); ++i) {
        std::string where = "topology.links[" + std::to_string(i) + "]";
        const json& l = links[i];
        Link link;
        link.a = get_port_ref(l, "a", where);
        link.b = get_port_ref(l, "b", where);
        link.delay = get_micros(l, "delay_us", where, 0);
        link.capacity_bps = l.contains("capacity_bps")
                                ? get_unsigned(l, "capacity_bps", where, UINT64_MAX)
                                : 0;
        for (const auto* end : {&link.a, &link.b})
            if (!ids.contains(end->sff_id))
                throw IntegrityError("link references unknown SFF \"" + end->sff_id + "\"",
                                     end->sff_id);
        topo.links.push_back(std::move(link));
    }
    return topo;
}

Repository parse_document(const json& doc)
{
    if (!doc.is_object()) shape_error("document", "expected object");
    Repository repo;
    repo.topology = parse_topology(doc);

    const json& sfs = array_member(doc, "sfs", "document");
    for (std::size_t i = 0; i < sfs.size(); ++i) {
        std::string where = "sfs[" + std::to_string(i) + "]";
        const json& s = sfs[i];
        ServiceFunction sf;
        sf.id = get_string(s, "id", where);
        sf.mac = get_mac(s, where);
        sf.sff_id = get_string(s, "sff", where);
        sf.in_port = static_cast<PortNo>(get_unsigned(s, "in_port", where, UINT32_MAX));
        sf.out_port = static_cast<PortNo>(get_unsigned(s, "out_port", where, UINT32_MAX));
        sf.requires_symmetry = get_bool(s, "requires_symmetry", where, true);
        sf.processing_delay = get_micros(s, "processing_delay_us", where, 0);
        sf.available = get_bool(s, "available", where, true);
        if (s.contains("role")) sf.role = get_string(s, "role", where);
        if (!repo.topology.find_sff(sf.sff_id))
            throw IntegrityError("SF \"" + sf.id + "\" references unknown SFF \"" + sf.sff_id
                                 + "\"", sf.sff_id);
        std::string id = sf.id;
        if (!repo.sfs.emplace(id, std::move(sf)).second)
            throw DuplicateIdError("duplicate SF id \"" + id + "\"", id);
    }

    const json& chains = array_member(doc, "chains", "document");
    for (std::size_t i = 0; i < chains.size(); ++i) {
        std::string where = "chains[" + std::to_string(i) + "]";
        const json& c = chains[i];
        ServiceChain chain;
        chain.sfc_id = static_cast<SfcId>(get_unsigned(c, "sfc_id", where, UINT8_MAX));
        const json& seq = array_member(c, "sfs", where);
        for (std::size_t k = 0; k < seq.size(); ++k) {
            if (!seq[k].is_string())
                shape_error(where + ".sfs[" + std::to_string(k) + "]", "expected string");
            auto id = seq[k].get<std::string>();
            if (!repo.sfs.contains(id))
                throw IntegrityError("chain " + std::to_string(chain.sfc_id)
                                     + " references unknown SF \"" + id + "\"", id);
            chain.sf_sequence.push_back(std::move(id));
        }
        auto key = chain.sfc_id;
        if (!repo.chains.emplace(key, std::move(chain)).second)
            throw DuplicateIdError("duplicate sfc_id " + std::to_string(key),
                                   std::to_string(key));
    }

    const json& flows = array_member(doc, "flows", "document");
    for (std::size_t i = 0; i < flows.size(); ++i) {
        std::string where = "flows[" + std::to_string(i) + "]";
        const json& f = flows[i];
        FlowSpec flow;
        flow.src_ip = get_ip(f, "src_ip", where);
        flow.dst_ip = get_ip(f, "dst_ip", where);
        flow.src_port = static_cast<std::uint16_t>(get_unsigned(f, "src_port", where, UINT16_MAX));
        flow.dst_port = static_cast<std::uint16_t>(get_unsigned(f, "dst_port", where, UINT16_MAX));
        auto proto_text = get_string(f, "protocol", where);
        auto proto = parse_protocol(proto_text);
        if (!proto) shape_error(where + ".protocol", "unknown protocol \"" + proto_text + "\"");
        flow.protocol = *proto;
        flow.sfc_id = static_cast<SfcId>(get_unsigned(f, "sfc_id", where, UINT8_MAX));
        if (!repo.chains.contains(flow.sfc_id))
            throw IntegrityError("flow " + flow.str() + " references unknown sfc_id "
                                 + std::to_string(flow.sfc_id), std::to_string(flow.sfc_id));
        repo.flows.push_back(flow);
    }
    return repo;
}

ordered_json micros_value(SimTime ns)
{
    if (ns % 1000 == 0) return ns / 1000;
    return static_cast<double>(ns) / 1000.0;
}

} // namespace

std::vector<Violation> repository_validate(const Repository& repo)
{
    std::vector<Violation> out;
    const Topology& topo = repo.topology;

    // Every SFF port may carry at most one attachment.
    std::map<std::string, std::set<PortNo>> declared;
    std::set<std::string> sff_ids;
    for (const auto& sff : topo.sffs) {
        if (!sff_ids.insert(sff.id).second) out.push_back({"duplicate-sff-id", sff.id});
        auto& ports = declared[sff.id];
        for (auto p : sff.ports)
            if (!ports.insert(p).second)
                out.push_back({"duplicate-port", sff.id + ":" + std::to_string(p)});
    }

    std::map<PortRef, std::string> used;
    auto claim = [&](const std::string& sff, PortNo port, const std::string& owner) {
        if (!declared.contains(sff)) {
            out.push_back({"unknown-sff", owner});
            return;
        }
        std::string ref = sff + ":" + std::to_string(port);
        if (!declared[sff].contains(port)) {
            out.push_back({"unknown-port", owner + "@" + ref});
            return;
        }
        if (!used.emplace(PortRef{sff, port}, owner).second)
            out.push_back({"port-conflict", owner + "@" + ref});
    };

    std::map<MacAddress, std::string> macs;
    auto claim_mac = [&](const MacAddress& mac, const std::string& owner) {
        if (!macs.emplace(mac, owner).second) out.push_back({"duplicate-mac", owner});
    };

    std::set<std::string> endpoint_ids;
    std::set<Ipv4Address> endpoint_ips;
    for (const auto& ep : topo.endpoints) {
        if (!endpoint_ids.insert(ep.id).second) out.push_back({"duplicate-endpoint-id", ep.id});
        if (!endpoint_ips.insert(ep.ip).second) out.push_back({"duplicate-endpoint-ip", ep.id});
        claim_mac(ep.mac, ep.id);
        claim(ep.sff_id, ep.port, ep.id);
    }

    for (std::size_t i = 0; i < topo.links.size(); ++i) {
        const Link& link = topo.links[i];
        std::string owner = "link[" + std::to_string(i) + "]";
        claim(link.a.sff_id, link.a.port, owner);
        claim(link.b.sff_id, link.b.port, owner);
        if (link.delay < 0) out.push_back({"negative-delay", owner});
    }

    for (const auto& [key, sf] : repo.sfs) {
        if (key != sf.id) out.push_back({"sf-id-mismatch", key});
        claim_mac(sf.mac, sf.id);
        if (sf.in_port == sf.out_port) {
            out.push_back({"sf-in-equals-out", sf.id});
            claim(sf.sff_id, sf.in_port, sf.id);
        } else {
            claim(sf.sff_id, sf.in_port, sf.id);
            claim(sf.sff_id, sf.out_port, sf.id);
        }
        if (sf.processing_delay < 0) out.push_back({"negative-delay", sf.id});
    }

    for (const auto& [key, chain] : repo.chains) {
        std::string cid = std::to_string(key);
        if (key != chain.sfc_id) out.push_back({"sfc-id-mismatch", cid});
        if (chain.sf_sequence.empty()) out.push_back({"empty-chain", cid});
        std::set<std::string> seen;
        for (const auto& id : chain.sf_sequence) {
            if (!repo.sfs.contains(id)) out.push_back({"unknown-sf-in-chain", id});
            if (!seen.insert(id).second) out.push_back({"duplicate-sf-in-chain", id});
        }
    }

    for (const auto& flow : repo.flows) {
        if (!repo.chains.contains(flow.sfc_id)) out.push_back({"unknown-sfc-in-flow", flow.str()});
        if (!topo.find_endpoint_by_ip(flow.src_ip) || !topo.find_endpoint_by_ip(flow.dst_ip))
            out.push_back({"unknown-flow-endpoint", flow.str()});
    }

    // SFF graph connectivity.
    if (!topo.sffs.empty()) {
        std::map<std::string, std::vector<std::string>> adj;
        for (const auto& link : topo.links) {
            adj[link.a.sff_id].push_back(link.b.sff_id);
            adj[link.b.sff_id].push_back(link.a.sff_id);
        }
        std::set<std::string> reached{topo.sffs.front().id};
        std::vector<std::string> stack{topo.sffs.front().id};
        while (!stack.empty()) {
            auto cur = stack.back();
            stack.pop_back();
            for (const auto& next : adj[cur])
                if (reached.insert(next).second) stack.push_back(next);
        }
        for (const auto& sff : topo.sffs)
            if (!reached.contains(sff.id)) out.push_back({"topology-disconnected", sff.id});
    }
    return out;
}

Repository repository_load_text(std::string_view text)
{
    if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); }))
        return {};
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ParseError("malformed repository document: " + std::string(e.what()), line, column);
    }
    Repository repo = parse_document(doc);
    auto violations = repository_validate(repo);
    if (!violations.empty()) {
        std::string msg = "repository invalid:";
        for (const auto& v : violations) msg += " " + v.rule + "(" + v.id + ")";
        throw ValidationError(msg);
    }
    return repo;
}

Repository repository_load(std::istream& source)
{
    std::string text{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
    return repository_load_text(text);
}

Repository repository_load_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open repository file \"" + path + "\"");
    return repository_load(in);
}

std::string repository_serialize(const Repository& repo)
{
    ordered_json sffs = ordered_json::array();
    for (const auto& sff : repo.topology.sffs)
        sffs.push_back({{"id", sff.id}, {"ports", sff.ports}});
    ordered_json endpoints = ordered_json::array();
    for (const auto& ep : repo.topology.endpoints)
        endpoints.push_back({{"id", ep.id}, {"mac", ep.mac.str()}, {"sff", ep.sff_id},
                             {"port", ep.port}, {"ip", ep.ip.str()}});
    ordered_json links = ordered_json::array();
    for (const auto& link : repo.topology.links)
        links.push_back({{"a", {{"sff", link.a.sff_id}, {"port", link.a.port}}},
                         {"b", {{"sff", link.b.sff_id}, {"port", link.b.port}}},
                         {"delay_us", micros_value(link.delay)},
                         {"capacity_bps", link.capacity_bps}});

    ordered_json sfs = ordered_json::array();
    for (const auto& [id, sf] : repo.sfs) {
        ordered_json s = {{"id", sf.id},
                          {"mac", sf.mac.str()},
                          {"sff", sf.sff_id},
                          {"in_port", sf.in_port},
                          {"out_port", sf.out_port},
                          {"requires_symmetry", sf.requires_symmetry},
                          {"processing_delay_us", micros_value(sf.processing_delay)}};
        if (!sf.role.empty()) s["role"] = sf.role;
        if (!sf.available) s["available"] = false;
        sfs.push_back(std::move(s));
    }

    ordered_json chains = ordered_json::array();
    for (const auto& [id, chain] : repo.chains)
        chains.push_back({{"sfc_id", chain.sfc_id}, {"sfs", chain.sf_sequence}});

    ordered_json flows = ordered_json::array();
    for (const auto& f : repo.flows)
        flows.push_back({{"src_ip", f.src_ip.str()},
                         {"dst_ip", f.dst_ip.str()},
                         {"src_port", f.src_port},
                         {"dst_port", f.dst_port},
                         {"protocol", std::string(to_string(f.protocol))},
                         {"sfc_id", f.sfc_id}});

    ordered_json doc = {
        {"topology", {{"sffs", sffs}, {"endpoints", endpoints}, {"links", links}}},
        {"sfs", sfs},
        {"chains", chains},
        {"flows", flows},
    };
    return doc.dump(2) + "\n";
}

const ServiceChain& lookup_chain(const Repository& repo, SfcId sfc_id)
{
    auto it = repo.chains.find(sfc_id);
    if (it == repo.chains.end()) throw UnknownChainError(sfc_id);
    return it->second;
}

Repository remove_chain(const Repository& repo, SfcId sfc_id)
{
    Repository out = repo;
    if (out.chains.erase(sfc_id) == 0) throw UnknownChainError(sfc_id);
    std::erase_if(out.flows, [&](const FlowSpec& f) { return f.sfc_id == sfc_id; });
    return out;
}

Repository with_full_symmetry(const Repository& repo)
{
    Repository out = repo;
    for (auto& [id, sf] : out.sfs) sf.requires_symmetry = true;
    return out;
}

Repository with_processing_delay(const Repository& repo, SimTime delay)
{
    Repository out = repo;
    for (auto& [id, sf] : out.sfs) sf.processing_delay = delay;
    return out;
}

} // namespace sfc::model
