#include "sfc/intent/intent.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sfc/errors.hpp"
#include "sfc/model/repository.hpp"

namespace sfc::intent {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s)
{
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::optional<double> parse_number(std::string_view s)
{
    s = trim(s);
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<std::uint64_t> parse_unsigned(std::string_view s)
{
    s = trim(s);
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

std::string format_number(double v)
{
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

Sla parse_sla(std::string_view value, std::size_t line)
{
    std::optional<std::uint64_t> bandwidth;
    std::optional<double> latency;
    std::optional<double> cost;

    std::size_t start = 0;
    while (start <= value.size()) {
        std::size_t end = value.find(';', start);
        if (end == std::string_view::npos) end = value.size();
        std::string_view part = trim(value.substr(start, end - start));
        start = end + 1;
        if (part.empty()) continue;

        auto colon = part.find(':');
        if (colon == std::string_view::npos)
            throw MalformedValueError("SLA field without ':' in \"" + std::string(part) + "\"",
                                      line);
        std::string name = lower(trim(part.substr(0, colon)));
        std::string_view raw = part.substr(colon + 1);
        auto bad = [&](const char* what) {
            return MalformedValueError(std::string("SLA ") + what + " \""
                                           + std::string(trim(raw)) + "\"",
                                       line);
        };
        if (name == "bandwidth") {
            if (bandwidth) throw bad("duplicate Bandwidth");
            bandwidth = parse_unsigned(raw);
            if (!bandwidth) throw bad("malformed Bandwidth");
        } else if (name == "latency") {
            if (latency) throw bad("duplicate Latency");
            latency = parse_number(raw);
            if (!latency || *latency < 0) throw bad("malformed Latency");
        } else if (name == "cost") {
            if (cost) throw bad("duplicate Cost");
            cost = parse_number(raw);
            if (!cost || *cost < 0) throw bad("malformed Cost");
        } else {
            throw MalformedValueError("unknown SLA field \"" + name + "\"", line);
        }
    }
    if (!bandwidth) throw MissingKeyError("SLA.Bandwidth");
    if (!latency) throw MissingKeyError("SLA.Latency");
    if (!cost) throw MissingKeyError("SLA.Cost");
    return {*bandwidth, *latency, *cost};
}

std::uint32_t parse_validity(std::string_view value, std::size_t line)
{
    value = trim(value);
    std::string_view number = value;
    auto space = value.find_first_of(" \t");
    if (space != std::string_view::npos) {
        std::string unit = lower(trim(value.substr(space)));
        if (unit != "days" && unit != "day")
            throw MalformedValueError("validity unit must be days, got \"" + unit + "\"", line);
        number = value.substr(0, space);
    }
    auto days = parse_unsigned(number);
    if (!days || *days == 0 || *days > UINT32_MAX)
        throw MalformedValueError("malformed Intent validity \"" + std::string(value) + "\"",
                                  line);
    return static_cast<std::uint32_t>(*days);
}

std::size_t chains_using(const Repository& repo, const std::string& sf_id)
{
    std::size_t n = 0;
    for (const auto& [id, chain] : repo.chains)
        n += std::count(chain.sf_sequence.begin(), chain.sf_sequence.end(), sf_id) > 0;
    return n;
}

model::SfcId next_free_sfc_id(const Repository& repo)
{
    for (unsigned id = 1; id <= UINT8_MAX; ++id)
        if (!repo.chains.contains(static_cast<model::SfcId>(id)))
            return static_cast<model::SfcId>(id);
    throw ConsistencyError("no free sfc_id left");
}

} // namespace

IntentRequest parse_intent(std::string_view text)
{
    std::optional<std::string> label;
    std::optional<std::uint32_t> validity;
    std::optional<Sla> sla;

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = trim(text.substr(start, end - start));
        start = end + 1;
        ++line_no;
        if (line.empty()) continue;

        auto colon = line.find(':');
        if (colon == std::string_view::npos)
            throw MalformedValueError("expected `Key: value`", line_no);
        std::string key = lower(trim(line.substr(0, colon)));
        std::string_view value = trim(line.substr(colon + 1));

        if (key == "intent label") {
            if (label) throw MalformedValueError("duplicate Intent Label", line_no);
            if (value.empty()) throw MalformedValueError("empty Intent Label", line_no);
            label = std::string(value);
        } else if (key == "intent validity") {
            if (validity) throw MalformedValueError("duplicate Intent validity", line_no);
            validity = parse_validity(value, line_no);
        } else if (key == "sla") {
            if (sla) throw MalformedValueError("duplicate SLA", line_no);
            sla = parse_sla(value, line_no);
        }
        // Other keys belong to the policy editor and are ignored here.
    }
    if (!label) throw MissingKeyError("Intent Label");
    if (!validity) throw MissingKeyError("Intent validity");
    if (!sla) throw MissingKeyError("SLA");
    return {*label, *validity, *sla};
}

std::string serialize_intent(const IntentRequest& intent)
{
    return "Intent Label: " + intent.label + "\nIntent validity: "
           + std::to_string(intent.validity_days) + " days\nSLA: Bandwidth:"
           + std::to_string(intent.sla.bandwidth_bps) + ";Latency: "
           + format_number(intent.sla.latency_ms) + "; Cost: " + format_number(intent.sla.cost)
           + ";\n";
}

bool Blueprint::admits(const IntentRequest& intent) const
{
    return intent.sla.latency_ms <= max_latency_ms && intent.sla.bandwidth_bps >= min_bandwidth_bps;
}

std::vector<Blueprint> load_blueprints(std::string_view json_text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text.begin(), json_text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed blueprint catalog: ") + e.what(), 0, e.byte);
    }
    if (!doc.is_array()) throw ParseError("blueprint catalog must be an array", 0, 0);
    std::vector<Blueprint> out;
    try {
        for (const auto& b : doc) {
            Blueprint bp;
            bp.id = b.at("id").get<std::string>();
            for (const auto& r : b.at("sf_roles"))
                bp.sf_roles.push_back(
                    {r.at("role").get<std::string>(), r.value("requires_symmetry", true)});
            bp.max_latency_ms = b.at("max_latency_ms").get<double>();
            bp.min_bandwidth_bps = b.at("min_bandwidth_bps").get<std::uint64_t>();
            if (bp.sf_roles.empty())
                throw ParseError("blueprint \"" + bp.id + "\" has no sf_roles", 0, 0);
            out.push_back(std::move(bp));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("blueprint catalog: ") + e.what(), 0, 0);
    }
    return out;
}

std::vector<Blueprint> load_blueprints_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open blueprint catalog \"" + path + "\"");
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return load_blueprints(text);
}

const Blueprint& map_intent_to_blueprint(const IntentRequest& intent,
                                         const std::vector<Blueprint>& catalog)
{
    if (catalog.empty()) throw NoMatchingBlueprintError("blueprint catalog is empty");
    std::string failed;
    for (const auto& bp : catalog) {
        if (bp.admits(intent)) return bp;
        failed += " " + bp.id + "(";
        const char* sep = "";
        if (intent.sla.latency_ms > bp.max_latency_ms) {
            failed += "latency " + format_number(intent.sla.latency_ms) + " > "
                      + format_number(bp.max_latency_ms) + " ms";
            sep = ", ";
        }
        if (intent.sla.bandwidth_bps < bp.min_bandwidth_bps)
            failed += sep + std::string("bandwidth ") + std::to_string(intent.sla.bandwidth_bps)
                      + " < " + std::to_string(bp.min_bandwidth_bps) + " bps";
        failed += ")";
    }
    throw NoMatchingBlueprintError("no blueprint admits intent \"" + intent.label + "\":" + failed);
}

ResourceAllocation compute_resources(const IntentRequest& intent, const Blueprint& bp,
                                     const ResourcePolicy& policy)
{
    const std::uint64_t bw = intent.sla.bandwidth_bps;
    const std::uint64_t c = policy.cpu_capacity_bps;
    ResourceAllocation alloc;
    for (const auto& role : bp.sf_roles) {
        RoleResources r;
        r.role = role.role;
        r.bandwidth_bps = bw;
        r.cpu_units = bw / c + (bw % c != 0);
        r.memory_mb = policy.memory_mb_per_role;
        alloc.per_role.push_back(std::move(r));
    }
    return alloc;
}

ServiceChain compose_sfc_instance(const Blueprint& bp, const Repository& repo)
{
    ServiceChain chain;
    chain.sfc_id = next_free_sfc_id(repo);
    std::set<std::string> taken;
    for (const auto& role : bp.sf_roles) {
        const model::ServiceFunction* best = nullptr;
        std::size_t best_load = 0;
        // Catalog iterates in id order, so strict < keeps the smallest id on ties.
        for (const auto& [id, sf] : repo.sfs) {
            if (sf.role != role.role || sf.requires_symmetry != role.requires_symmetry
                || !sf.available || taken.contains(id))
                continue;
            std::size_t load = chains_using(repo, id);
            if (!best || load < best_load) {
                best = &sf;
                best_load = load;
            }
        }
        if (!best) throw NoInstanceForRoleError(role.role);
        taken.insert(best->id);
        chain.sf_sequence.push_back(best->id);
    }
    return chain;
}

DeploymentCommand build_deployment_command(const IntentRequest& intent, const Blueprint& bp,
                                           const ResourceAllocation& alloc,
                                           const ServiceChain& chain, const Repository& repo,
                                           std::vector<model::FlowSpec> flows)
{
    if (chain.sf_sequence.size() != bp.sf_roles.size())
        throw ConsistencyError("chain length does not match blueprint \"" + bp.id + "\"");
    if (alloc.per_role.size() != bp.sf_roles.size())
        throw ConsistencyError("resource allocation does not cover every role");

    DeploymentCommand cmd;
    cmd.intent_label = intent.label;
    cmd.blueprint_id = bp.id;
    cmd.chain = chain;
    cmd.resources = alloc;
    for (std::size_t i = 0; i < chain.sf_sequence.size(); ++i) {
        const auto& id = chain.sf_sequence[i];
        auto it = repo.sfs.find(id);
        if (it == repo.sfs.end()) throw ConsistencyError("chain references unknown SF \"" + id + "\"");
        const auto& sf = it->second;
        const auto& role = bp.sf_roles[i];
        if (sf.role != role.role || sf.requires_symmetry != role.requires_symmetry)
            throw ConsistencyError("SF \"" + id + "\" lacks the attributes of role \"" + role.role
                                   + "\"");
        if (alloc.per_role[i].role != role.role)
            throw ConsistencyError("resource allocation out of role order");
        cmd.sf_attributes.push_back({sf.id, sf.role, sf.requires_symmetry});
    }
    for (auto& f : flows) f.sfc_id = chain.sfc_id;
    cmd.flows = std::move(flows);
    return cmd;
}

std::string dump(const DeploymentCommand& cmd)
{
    std::ostringstream os;
    os << "intent " << cmd.intent_label << "\n";
    os << "blueprint " << cmd.blueprint_id << "\n";
    os << "chain " << unsigned(cmd.chain.sfc_id) << " [";
    for (std::size_t i = 0; i < cmd.chain.sf_sequence.size(); ++i)
        os << (i ? "," : "") << cmd.chain.sf_sequence[i];
    os << "]\n";
    for (const auto& sf : cmd.sf_attributes)
        os << "sf " << sf.id << " role=" << sf.role
           << " requires_symmetry=" << (sf.requires_symmetry ? "true" : "false") << "\n";
    for (const auto& r : cmd.resources.per_role)
        os << "resources " << r.role << " cpu_units=" << r.cpu_units << " memory_mb=" << r.memory_mb
           << " bandwidth_bps=" << r.bandwidth_bps << "\n";
    for (const auto& f : cmd.flows) os << "flow " << f.str() << "\n";
    return os.str();
}

void AuditLog::append(AuditRecord record)
{
    std::lock_guard lock(mutex_);
    entries_.push_back(std::move(record));
}

std::vector<AuditRecord> AuditLog::entries() const
{
    std::lock_guard lock(mutex_);
    return entries_;
}

ExecutionResult execute_deployment(const DeploymentCommand& cmd, const Repository& repo,
                                   AuditLog* audit)
{
    for (const auto& snap : cmd.sf_attributes) {
        auto it = repo.sfs.find(snap.id);
        if (it == repo.sfs.end())
            throw ConsistencyError("deployment references deleted SF \"" + snap.id + "\"");
        if (it->second.requires_symmetry != snap.requires_symmetry)
            throw ConsistencyError("symmetry attribute of SF \"" + snap.id
                                   + "\" changed since the command was built");
    }
    for (const auto& id : cmd.chain.sf_sequence)
        if (!repo.sfs.contains(id))
            throw ConsistencyError("deployment references deleted SF \"" + id + "\"");

    ExecutionResult result{repo, false, {}};
    auto existing = repo.chains.find(cmd.chain.sfc_id);
    if (existing == repo.chains.end()) {
        result.repo.chains.emplace(cmd.chain.sfc_id, cmd.chain);
        result.changed = true;
    } else if (existing->second != cmd.chain) {
        throw ConsistencyError("sfc_id " + std::to_string(cmd.chain.sfc_id)
                               + " already bound to a different chain");
    }
    for (const auto& f : cmd.flows) {
        if (std::find(result.repo.flows.begin(), result.repo.flows.end(), f)
            == result.repo.flows.end()) {
            result.repo.flows.push_back(f);
            result.changed = true;
        }
    }

    auto violations = model::repository_validate(result.repo);
    if (!violations.empty())
        throw ConsistencyError("deployment would break repository invariant " + violations[0].rule
                               + " (" + violations[0].id + ")");

    const auto& chain = result.repo.chains.at(cmd.chain.sfc_id);
    for (const auto& flow : result.repo.flows) {
        if (flow.sfc_id != chain.sfc_id) continue;
        for (const auto& p :
             {path::compute_forward_path(chain, flow, result.repo.topology, result.repo.sfs),
              path::compute_reverse_path(chain, flow, result.repo.topology, result.repo.sfs)})
            for (auto& rule : path::generate_flow_rules(p, flow))
                result.rules.emplace_back(rule.sff_id, rule);
    }

    if (audit && result.changed) {
        for (const auto& snap : cmd.sf_attributes)
            audit->append({"NFVO", "instantiate-vnf", snap.id});
        audit->append({"VIM", "reserve-resources", cmd.intent_label});
        audit->append({"SDN-C", "install-rules", std::to_string(result.rules.size())});
    }
    return result;
}

DeploymentCommand run_intent_pipeline(std::string_view intent_text,
                                      const std::vector<Blueprint>& catalog,
                                      const Repository& repo, const ResourcePolicy& policy)
{
    IntentRequest intent = parse_intent(intent_text);
    const Blueprint& bp = map_intent_to_blueprint(intent, catalog);
    ResourceAllocation alloc = compute_resources(intent, bp, policy);
    ServiceChain chain = compose_sfc_instance(bp, repo);
    return build_deployment_command(intent, bp, alloc, chain, repo);
}

} // namespace sfc::intent
