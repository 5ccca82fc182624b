#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "shiftlab/report.hpp"

using namespace shiftlab;

namespace {

nlohmann::json load_schema() {
    std::ifstream in("schemas/report.schema.json");
    if (!in) in.open("../schemas/report.schema.json");
    REQUIRE(in.good());
    nlohmann::json j;
    in >> j;
    return j;
}

}  // namespace

TEST_CASE("report envelope") {
    std::vector<NamedCheck> checks{
        {"zeta", {{"status", "EvidenceFor"}}},
        {"alpha", {{"status", "HoldsExactly"}}},
        {"mid", {{"status", "Inconclusive"}}},
    };
    auto report = make_report("classify", {{"horizon", "420"}}, 7, checks);

    CHECK(report["tool"] == "shiftlab");
    CHECK(report["version"] == "0.1.0");
    CHECK(report["command"] == "classify");
    CHECK(report["seed"] == "7");
    CHECK(report["config"]["horizon"] == "420");

    REQUIRE(report["checks"].size() == 3);
    CHECK(report["checks"][0]["name"] == "alpha");
    CHECK(report["checks"][1]["name"] == "mid");
    CHECK(report["checks"][2]["name"] == "zeta");
    CHECK(report["checks"][0]["status"] == "HoldsExactly");

    // Serialization is deterministic: same inputs, same bytes.
    auto again = make_report("classify", {{"horizon", "420"}}, 7, checks);
    CHECK(report.dump(2) == again.dump(2));
}

TEST_CASE("reports validate against the shipped schema") {
    auto schema = load_schema();

    auto good = make_report(
        "verify", nlohmann::json::object(), 0,
        {{"balance_k1",
          {{"check", "balance"},
           {"k", 1},
           {"verdict", "HoldsExactly"},
           {"horizon", "88410"},
           {"witness", nlohmann::json::object()}}}});
    CHECK(schema_violations(schema, good).empty());

    SECTION("missing envelope key") {
        auto bad = good;
        bad.erase("seed");
        auto errors = schema_violations(schema, bad);
        REQUIRE(errors.size() == 1);
        CHECK(errors[0].find("missing required key 'seed'") != std::string::npos);
    }

    SECTION("wrong tool name") {
        auto bad = good;
        bad["tool"] = "other";
        auto errors = schema_violations(schema, bad);
        REQUIRE_FALSE(errors.empty());
        CHECK(errors[0].find("not in enum") != std::string::npos);
    }

    SECTION("unknown command") {
        auto bad = good;
        bad["command"] = "frobnicate";
        CHECK_FALSE(schema_violations(schema, bad).empty());
    }

    SECTION("check row must be an object with a name") {
        auto bad = good;
        bad["checks"].push_back("loose string");
        auto errors = schema_violations(schema, bad);
        REQUIRE_FALSE(errors.empty());
        CHECK(errors[0].find("$/checks/1") != std::string::npos);

        auto nameless = good;
        nameless["checks"][0].erase("name");
        CHECK_FALSE(schema_violations(schema, nameless).empty());
    }

    SECTION("verdict outside the status enum") {
        auto bad = good;
        bad["checks"][0]["verdict"] = "Maybe";
        CHECK_FALSE(schema_violations(schema, bad).empty());
    }

    SECTION("horizon must travel as a decimal string") {
        auto bad = good;
        bad["checks"][0]["horizon"] = 88410;
        auto errors = schema_violations(schema, bad);
        REQUIRE_FALSE(errors.empty());
        CHECK(errors[0].find("expected string") != std::string::npos);
    }

    SECTION("seed as a number is rejected") {
        auto bad = good;
        bad["seed"] = 0;
        CHECK_FALSE(schema_violations(schema, bad).empty());
    }
}

TEST_CASE("schema checker handles bad refs") {
    nlohmann::json schema{{"type", "object"},
                          {"properties", {{"x", {{"$ref", "#/$defs/nope"}}}}}};
    auto errors = schema_violations(schema, nlohmann::json{{"x", 1}});
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].find("unresolvable") != std::string::npos);
}
