#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "sfc/errors.hpp"
#include "sfc/intent/intent.hpp"
#include "sfc/model/repository.hpp"
#include "test_support.hpp"

using namespace sfc;
using namespace sfc::intent;
using sfc::test::data_path;
using sfc::test::three_sff;

namespace {

std::string sample_text()
{
    std::ifstream in(data_path("sample.intent"));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<Blueprint> catalog()
{
    return load_blueprints_file(data_path("blueprints.json"));
}

IntentRequest with_sla(std::uint64_t bw, double latency)
{
    return {"t", 1, {bw, latency, 0}};
}

Blueprint bp(const std::string& id, double max_latency, std::uint64_t min_bw)
{
    return {id, {{"stateful-firewall", true}}, max_latency, min_bw};
}

} // namespace

TEST_CASE("sample intent parses")
{
    auto intent = parse_intent(sample_text());
    CHECK(intent.label == "added-value-service1");
    CHECK(intent.validity_days == 30);
    CHECK(intent.sla.bandwidth_bps == 100'000'000);
    CHECK(intent.sla.latency_ms == 20.0);
    CHECK(intent.sla.cost == 50.0);
}

TEST_CASE("missing and malformed intents")
{
    try {
        parse_intent("Intent Label: x\nIntent validity: 3 days\n");
        FAIL("expected MissingKeyError");
    } catch (const MissingKeyError& e) {
        CHECK(e.key() == "SLA");
    }
    try {
        parse_intent("Intent Label: x\nIntent validity: many days\nSLA: Bandwidth:1;Latency: 1; Cost: 1;\n");
        FAIL("expected MalformedValueError");
    } catch (const MalformedValueError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_intent("Intent Label: x\nIntent validity: 3 days\nSLA: Bandwidth:fast;Latency: 1; Cost: 1;\n"),
                    MalformedValueError);
    CHECK_THROWS_AS(parse_intent("Intent validity: 3 days\nSLA: Bandwidth:1;Latency: 1; Cost: 1;\n"),
                    MissingKeyError);
}

TEST_CASE("parse, serialize, parse")
{
    auto first = parse_intent(sample_text());
    auto again = parse_intent(serialize_intent(first));
    CHECK(again == first);

    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        IntentRequest r{"svc-" + std::to_string(rng() % 1000), std::uint32_t(rng() % 365),
                        {rng() % 10'000'000'000ull, double(rng() % 100'000) / 8.0,
                         double(rng() % 1000) / 4.0}};
        CHECK(parse_intent(serialize_intent(r)) == r);
    }
}

TEST_CASE("blueprint selection is first fit")
{
    auto cat = catalog();
    CHECK(map_intent_to_blueprint(with_sla(0, 1), cat).id == "low-latency-edge");
    CHECK(map_intent_to_blueprint(with_sla(100'000'000, 20), cat).id == "filtered-web-access");
    CHECK_THROWS_AS(map_intent_to_blueprint(with_sla(1, 500), cat), NoMatchingBlueprintError);

    // Both admit; order alone decides.
    std::vector<Blueprint> two{bp("b1", 10, 0), bp("b2", 10, 0)};
    auto intent = with_sla(5, 5);
    CHECK(map_intent_to_blueprint(intent, two).id == "b1");
    std::swap(two[0], two[1]);
    CHECK(map_intent_to_blueprint(intent, two).id == "b2");

    // Boundaries are inclusive.
    CHECK(bp("x", 10, 100).admits(with_sla(100, 10)));
    CHECK_FALSE(bp("x", 10, 100).admits(with_sla(99, 10)));
    CHECK_FALSE(bp("x", 10, 100).admits(with_sla(100, 10.5)));
}

TEST_CASE("resources follow the ceil formula")
{
    auto b = catalog()[1];
    ResourcePolicy policy;
    const auto c = policy.cpu_capacity_bps;

    auto at_c = compute_resources(with_sla(c, 1), b, policy);
    REQUIRE(at_c.per_role.size() == 3);
    for (const auto& r : at_c.per_role) CHECK(r.cpu_units == 1);
    for (const auto& r : compute_resources(with_sla(c + 1, 1), b, policy).per_role)
        CHECK(r.cpu_units == 2);
    for (const auto& r : compute_resources(with_sla(0, 1), b, policy).per_role) {
        CHECK(r.cpu_units == 0);
        CHECK(r.bandwidth_bps == 0);
    }

    std::mt19937_64 rng(9);
    for (int i = 0; i < 200; ++i) {
        const std::uint64_t bw = rng() % 50'000'000'000ull;
        // Floating-point ceil is exact here since both operands are < 2^53.
        const auto expect = std::uint64_t(std::ceil(double(bw) / double(c)));
        for (const auto& r : compute_resources(with_sla(bw, 1), b, policy).per_role) {
            CHECK(r.cpu_units == expect);
            CHECK(r.bandwidth_bps == bw);
            CHECK(r.memory_mb == policy.memory_mb_per_role);
        }
    }
}

TEST_CASE("composition picks instances by role")
{
    auto repo = three_sff();
    auto chain = compose_sfc_instance(catalog()[1], repo);
    CHECK(chain.sfc_id == 2);
    CHECK(chain.sf_sequence == std::vector<std::string>{"SF2", "SF1", "SF3"});

    Blueprint missing{"m", {{"load-balancer", true}}, 100, 0};
    try {
        compose_sfc_instance(missing, repo);
        FAIL("expected NoInstanceForRoleError");
    } catch (const NoInstanceForRoleError& e) {
        CHECK(e.role() == "load-balancer");
    }
}

TEST_CASE("equal-load candidates resolve to the smaller id")
{
    auto repo = three_sff();
    auto twin = repo.sfs.at("SF3");
    twin.id = "SF0";
    twin.mac = sfc::test::mac("00:00:00:00:0a:04");
    twin.in_port = 6;
    twin.out_port = 7;
    repo.topology.sffs[2].ports.push_back(6);
    repo.topology.sffs[2].ports.push_back(7);
    repo.sfs[twin.id] = twin;
    REQUIRE(model::repository_validate(repo).empty());

    Blueprint fw{"fw", {{"stateful-firewall", true}}, 100, 0};
    // SF3 is used by chain 1, SF0 by none.
    CHECK(compose_sfc_instance(fw, repo).sf_sequence == std::vector<std::string>{"SF0"});
    // With chain 1 gone both are unused.
    auto idle = model::remove_chain(repo, 1);
    CHECK(compose_sfc_instance(fw, idle).sf_sequence == std::vector<std::string>{"SF0"});
    auto renamed = idle;
    renamed.sfs.erase("SF0");
    twin.id = "SF4";
    renamed.sfs[twin.id] = twin;
    CHECK(compose_sfc_instance(fw, renamed).sf_sequence == std::vector<std::string>{"SF3"});
}

TEST_CASE("sample intent through the whole pipeline")
{
    auto repo = three_sff();
    auto cmd = run_intent_pipeline(sample_text(), catalog(), repo);
    CHECK(cmd.intent_label == "added-value-service1");
    CHECK(cmd.blueprint_id == "filtered-web-access");
    CHECK(cmd.chain.sf_sequence == std::vector<std::string>{"SF2", "SF1", "SF3"});
    REQUIRE(cmd.sf_attributes.size() == 3);
    CHECK(cmd.sf_attributes[2].id == "SF3");
    CHECK(cmd.sf_attributes[2].requires_symmetry);
    CHECK_FALSE(cmd.sf_attributes[0].requires_symmetry);
    for (const auto& r : cmd.resources.per_role) CHECK(r.bandwidth_bps >= 100'000'000);
    CHECK(dump(cmd).find("chain 2 [SF2,SF1,SF3]") != std::string::npos);
}

TEST_CASE("executing a command twice changes nothing the second time")
{
    auto repo = three_sff();
    auto cmd = run_intent_pipeline(sample_text(), catalog(), repo);
    model::FlowSpec f = repo.flows[0];
    f.src_port = 40001;
    cmd.flows = {f};
    cmd.flows[0].sfc_id = cmd.chain.sfc_id;

    AuditLog audit;
    auto first = execute_deployment(cmd, repo, &audit);
    CHECK(first.changed);
    CHECK(first.repo.chains.size() == 2);
    CHECK_FALSE(first.rules.empty());
    const auto records = audit.entries().size();
    CHECK(records > 0);

    auto second = execute_deployment(cmd, first.repo, &audit);
    CHECK_FALSE(second.changed);
    CHECK(second.repo == first.repo);
    CHECK(second.rules == first.rules);
    CHECK(audit.entries().size() == records);
}

TEST_CASE("executing against a repository missing an SF fails")
{
    auto repo = three_sff();
    auto cmd = run_intent_pipeline(sample_text(), catalog(), repo);
    auto gone = model::remove_chain(repo, 1);
    gone.sfs.erase("SF1");
    CHECK_THROWS_AS(execute_deployment(cmd, gone), ConsistencyError);
}
