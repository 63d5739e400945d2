#include "sfc/path/path_engine.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

#include "sfc/errors.hpp"
#include "sfc/log.hpp"
#include "sfc/model/repository.hpp"

namespace sfc::path {

using model::Endpoint;
using model::Link;
using model::ServiceFunction;

int Match::specificity() const
{
    return int(in_port.has_value()) + int(eth_dst.has_value()) + int(src_ip.has_value())
           + int(dst_ip.has_value()) + int(src_port.has_value()) + int(dst_port.has_value())
           + int(protocol.has_value());
}

namespace {

const ServiceFunction& require_sf(const SfCatalog& catalog, const std::string& id)
{
    auto it = catalog.find(id);
    if (it == catalog.end()) throw IntegrityError("unknown SF \"" + id + "\"", id);
    return it->second;
}

const Endpoint& require_endpoint(const Topology& topo, model::Ipv4Address ip)
{
    const Endpoint* ep = topo.find_endpoint_by_ip(ip);
    if (!ep) throw IntegrityError("no endpoint with address " + ip.str(), ip.str());
    return *ep;
}

// Link between two SFFs with the lowest local port, as (local, remote).
std::pair<PortNo, PortNo> pick_link(const Topology& topo, const std::string& from,
                                    const std::string& to)
{
    std::optional<std::pair<PortNo, PortNo>> best;
    for (const Link& link : topo.links) {
        std::optional<std::pair<PortNo, PortNo>> cand;
        if (link.a.sff_id == from && link.b.sff_id == to) cand = {link.a.port, link.b.port};
        else if (link.b.sff_id == from && link.a.sff_id == to) cand = {link.b.port, link.a.port};
        if (cand && (!best || *cand < *best)) best = cand;
    }
    if (!best) throw NoRouteError("no link between " + from + " and " + to);
    return *best;
}

class PathBuilder
{
public:
    PathBuilder(const Topology& topo, HopPath& path, std::string sff, PortNo ingress)
        : topo_(topo), path_(path), sff_(std::move(sff)), ingress_(ingress)
    {}

    void steer_to(const std::string& target_sff, const MacAddress& next_mac, PortNo final_egress)
    {
        auto route = shortest_sff_route(topo_, sff_, target_sff);
        for (std::size_t i = 0; i + 1 < route.size(); ++i) {
            auto [local, remote] = pick_link(topo_, route[i], route[i + 1]);
            path_.hops.push_back({route[i], ingress_, next_mac, local});
            sff_ = route[i + 1];
            ingress_ = remote;
        }
        path_.hops.push_back({sff_, ingress_, next_mac, final_egress});
    }

    void visit_sf(const ServiceFunction& sf, PortNo enter, PortNo exit)
    {
        steer_to(sf.sff_id, sf.mac, enter);
        path_.sf_visits.push_back(sf.id);
        sff_ = sf.sff_id;
        ingress_ = exit;
    }

private:
    const Topology& topo_;
    HopPath& path_;
    std::string sff_;
    PortNo ingress_;
};

} // namespace

std::vector<std::string> shortest_sff_route(const Topology& topo, const std::string& from,
                                            const std::string& to)
{
    std::map<std::string, std::vector<std::string>> adj;
    for (const Link& link : topo.links) {
        adj[link.a.sff_id].push_back(link.b.sff_id);
        adj[link.b.sff_id].push_back(link.a.sff_id);
    }
    for (auto& [id, next] : adj) {
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
    }

    // Distances to the destination; then walk greedily from the source
    // taking the smallest-id neighbour one step closer. This yields the
    // lexicographically smallest among all shortest routes.
    std::map<std::string, std::size_t> dist{{to, 0}};
    std::deque<std::string> queue{to};
    while (!queue.empty()) {
        auto cur = queue.front();
        queue.pop_front();
        for (const auto& n : adj[cur])
            if (dist.emplace(n, dist[cur] + 1).second) queue.push_back(n);
    }
    auto it = dist.find(from);
    if (it == dist.end()) throw NoRouteError("no route from " + from + " to " + to);

    std::vector<std::string> route{from};
    std::string cur = from;
    while (cur != to) {
        std::size_t want = dist[cur] - 1;
        for (const auto& n : adj[cur]) {
            auto d = dist.find(n);
            if (d != dist.end() && d->second == want) {
                cur = n;
                break;
            }
        }
        route.push_back(cur);
    }
    return route;
}

std::vector<std::string> compute_reverse_sf_sequence(const ServiceChain& chain,
                                                     const SfCatalog& catalog)
{
    std::vector<std::string> out;
    for (auto it = chain.sf_sequence.rbegin(); it != chain.sf_sequence.rend(); ++it) {
        const ServiceFunction& sf = require_sf(catalog, *it);
        if (!sf.requires_symmetry) continue;
        if (!sf.available) throw UnavailableSfError(sf.id);
        out.push_back(sf.id);
    }
    return out;
}

HopPath compute_forward_path(const ServiceChain& chain, const FlowSpec& flow,
                             const Topology& topo, const SfCatalog& catalog)
{
    const Endpoint& src = require_endpoint(topo, flow.src_ip);
    const Endpoint& dst = require_endpoint(topo, flow.dst_ip);

    HopPath path;
    path.direction = Direction::forward;
    path.sfc_id = chain.sfc_id;
    path.terminal_restore_mac = dst.mac;

    PathBuilder builder(topo, path, src.sff_id, src.port);
    for (const auto& id : chain.sf_sequence) {
        const ServiceFunction& sf = require_sf(catalog, id);
        if (!sf.available) throw UnavailableSfError(sf.id);
        builder.visit_sf(sf, sf.in_port, sf.out_port);
    }
    builder.steer_to(dst.sff_id, dst.mac, dst.port);
    return path;
}

HopPath compute_reverse_path(const ServiceChain& chain, const FlowSpec& flow,
                             const Topology& topo, const SfCatalog& catalog)
{
    const Endpoint& client = require_endpoint(topo, flow.src_ip);
    const Endpoint& server = require_endpoint(topo, flow.dst_ip);

    HopPath path;
    path.direction = Direction::reverse;
    path.sfc_id = chain.sfc_id;
    path.terminal_restore_mac = client.mac;

    PathBuilder builder(topo, path, server.sff_id, server.port);
    for (const auto& id : compute_reverse_sf_sequence(chain, catalog)) {
        const ServiceFunction& sf = catalog.find(id)->second;
        // Reverse traffic enters through the forward exit and leaves
        // through the forward entry.
        builder.visit_sf(sf, sf.out_port, sf.in_port);
    }
    builder.steer_to(client.sff_id, client.mac, client.port);
    return path;
}

std::vector<FlowRule> generate_flow_rules(const HopPath& path, const FlowSpec& flow)
{
    const FlowSpec tuple = path.direction == Direction::forward ? flow : flow.reversed();
    std::vector<FlowRule> rules;
    rules.reserve(path.hops.size());
    MacAddress arriving = path.terminal_restore_mac;
    for (const Hop& hop : path.hops) {
        FlowRule rule;
        rule.sff_id = hop.sff_id;
        rule.priority = kSteeringPriority;
        rule.match.in_port = hop.ingress_port;
        rule.match.eth_dst = arriving;
        rule.match.src_ip = tuple.src_ip;
        rule.match.dst_ip = tuple.dst_ip;
        rule.match.src_port = tuple.src_port;
        rule.match.dst_port = tuple.dst_port;
        rule.match.protocol = tuple.protocol;
        rule.actions = {SetEthDst{hop.next_mac}, Output{hop.egress_port}};
        rules.push_back(std::move(rule));
        arriving = hop.next_mac;
    }
    return rules;
}

std::vector<SffRule> handle_packet_in(const Repository& repo, const PacketInMeta& meta)
{
    auto it = std::find_if(repo.flows.begin(), repo.flows.end(), [&](const FlowSpec& f) {
        return f.same_tuple(meta.header) || f.reversed().same_tuple(meta.header);
    });
    if (it == repo.flows.end()) {
        log(LogLevel::info, "packet-in at " + meta.sff_id + ":" + std::to_string(meta.in_port)
                                + " for unknown flow " + meta.header.str() + ", dropping");
        return {};
    }
    const FlowSpec& flow = *it;
    const ServiceChain& chain = model::lookup_chain(repo, flow.sfc_id);

    std::vector<SffRule> out;
    for (const HopPath& p :
         {compute_forward_path(chain, flow, repo.topology, repo.sfs),
          compute_reverse_path(chain, flow, repo.topology, repo.sfs)}) {
        for (auto& rule : generate_flow_rules(p, flow)) {
            std::string sff = rule.sff_id;
            out.emplace_back(std::move(sff), std::move(rule));
        }
    }
    return out;
}

std::string dump(const HopPath& path)
{
    std::ostringstream os;
    os << "path " << to_string(path.direction) << " sfc=" << unsigned(path.sfc_id)
       << " restore=" << path.terminal_restore_mac.str() << " sfs=[";
    for (std::size_t i = 0; i < path.sf_visits.size(); ++i)
        os << (i ? "," : "") << path.sf_visits[i];
    os << "]\n";
    for (std::size_t i = 0; i < path.hops.size(); ++i) {
        const Hop& h = path.hops[i];
        os << "hop " << i << " sff=" << h.sff_id << " in=" << h.ingress_port
           << " set_dst=" << h.next_mac.str() << " out=" << h.egress_port << "\n";
    }
    return os.str();
}

std::string dump(const FlowRule& rule)
{
    std::ostringstream os;
    os << "sff=" << rule.sff_id << " priority=" << rule.priority << " match[";
    const Match& m = rule.match;
    const char* sep = "";
    auto field = [&](const char* name, const std::string& value) {
        os << sep << name << "=" << value;
        sep = ",";
    };
    if (m.in_port) field("in_port", std::to_string(*m.in_port));
    if (m.eth_dst) field("eth_dst", m.eth_dst->str());
    if (m.src_ip) field("src_ip", m.src_ip->str());
    if (m.dst_ip) field("dst_ip", m.dst_ip->str());
    if (m.src_port) field("src_port", std::to_string(*m.src_port));
    if (m.dst_port) field("dst_port", std::to_string(*m.dst_port));
    if (m.protocol) field("protocol", std::string(to_string(*m.protocol)));
    os << "] actions[";
    for (std::size_t i = 0; i < rule.actions.size(); ++i) {
        os << (i ? "," : "");
        if (auto* s = std::get_if<SetEthDst>(&rule.actions[i])) os << "set_eth_dst:" << s->mac.str();
        else os << "output:" << std::get<Output>(rule.actions[i]).port;
    }
    os << "]";
    return os.str();
}

std::string dump(const std::vector<FlowRule>& rules)
{
    std::string out;
    for (const auto& r : rules) out += dump(r) + "\n";
    return out;
}

} // namespace sfc::path
