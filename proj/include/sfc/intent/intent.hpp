#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "sfc/model/types.hpp"
#include "sfc/path/path_engine.hpp"

namespace sfc::intent {

using model::Repository;
using model::ServiceChain;

/// SLA units: bandwidth in bits/s, latency in milliseconds, cost in
/// abstract monetary units.
struct Sla
{
    std::uint64_t bandwidth_bps = 0;
    double latency_ms = 0.0;
    double cost = 0.0;

    bool operator==(const Sla&) const = default;
};

struct IntentRequest
{
    std::string label;
    std::uint32_t validity_days = 0;
    Sla sla;

    bool operator==(const IntentRequest&) const = default;
};

/// Parses the line-oriented intent format:
///
///     Intent Label: added-value-service1
///     Intent validity: 30 days
///     SLA: Bandwidth:100000000;Latency: 20; Cost: 50;
///
/// Throws MissingKeyError or MalformedValueError.
IntentRequest parse_intent(std::string_view text);
std::string serialize_intent(const IntentRequest& intent);

struct RoleDescriptor
{
    std::string role;
    bool requires_symmetry = true;

    bool operator==(const RoleDescriptor&) const = default;
};

struct Blueprint
{
    std::string id;
    std::vector<RoleDescriptor> sf_roles;
    double max_latency_ms = 0.0;
    std::uint64_t min_bandwidth_bps = 0;

    /// True when the intent's latency is within max_latency_ms and its
    /// bandwidth is at least min_bandwidth_bps.
    bool admits(const IntentRequest& intent) const;

    bool operator==(const Blueprint&) const = default;
};

std::vector<Blueprint> load_blueprints(std::string_view json_text);
std::vector<Blueprint> load_blueprints_file(const std::string& path);

/// First admitting blueprint in catalog order.
const Blueprint& map_intent_to_blueprint(const IntentRequest& intent,
                                         const std::vector<Blueprint>& catalog);

struct ResourcePolicy
{
    std::uint64_t cpu_capacity_bps = 1'000'000'000;
    std::uint32_t memory_mb_per_role = 512;
};

struct RoleResources
{
    std::string role;
    std::uint64_t cpu_units = 0;
    std::uint64_t memory_mb = 0;
    std::uint64_t bandwidth_bps = 0;

    bool operator==(const RoleResources&) const = default;
};

struct ResourceAllocation
{
    std::vector<RoleResources> per_role;

    bool operator==(const ResourceAllocation&) const = default;
};

ResourceAllocation compute_resources(const IntentRequest& intent, const Blueprint& bp,
                                     const ResourcePolicy& policy = {});

/// Picks one available SF per role (fewest chains already using it, then
/// smallest id) and returns a chain under the smallest free sfc_id.
ServiceChain compose_sfc_instance(const Blueprint& bp, const Repository& repo);

struct SfSnapshot
{
    std::string id;
    std::string role;
    bool requires_symmetry = true;

    bool operator==(const SfSnapshot&) const = default;
};

struct DeploymentCommand
{
    std::string intent_label;
    std::string blueprint_id;
    ServiceChain chain;
    ResourceAllocation resources;
    std::vector<SfSnapshot> sf_attributes;
    std::vector<model::FlowSpec> flows;

    bool operator==(const DeploymentCommand&) const = default;
};

DeploymentCommand build_deployment_command(const IntentRequest& intent, const Blueprint& bp,
                                           const ResourceAllocation& alloc,
                                           const ServiceChain& chain, const Repository& repo,
                                           std::vector<model::FlowSpec> flows = {});

std::string dump(const DeploymentCommand& cmd);

/// Southbound call recorded instead of being sent to an NFVO/VIM/SDN-C.
struct AuditRecord
{
    std::string target;
    std::string action;
    std::string detail;

    bool operator==(const AuditRecord&) const = default;
};

class AuditLog
{
public:
    void append(AuditRecord record);
    std::vector<AuditRecord> entries() const;

private:
    mutable std::mutex mutex_;
    std::vector<AuditRecord> entries_;
};

struct ExecutionResult
{
    Repository repo;
    bool changed = false;
    std::vector<path::SffRule> rules;
};

/// Registers the chain and flows, then compiles steering rules for every
/// flow bound to the chain. Re-running an executed command changes nothing.
ExecutionResult execute_deployment(const DeploymentCommand& cmd, const Repository& repo,
                                   AuditLog* audit = nullptr);

/// parse, map, size, compose, build.
DeploymentCommand run_intent_pipeline(std::string_view intent_text,
                                      const std::vector<Blueprint>& catalog,
                                      const Repository& repo, const ResourcePolicy& policy = {});

} // namespace sfc::intent
