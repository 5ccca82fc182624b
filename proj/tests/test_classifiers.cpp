#include <catch2/catch_amalgamated.hpp>

#include "shiftlab/classifiers.hpp"
#include "shiftlab/construction.hpp"

using namespace shiftlab;

namespace {

RunLengthWeights ones(std::int64_t n) {
    return RunLengthWeights::from_runs({{0, n}});
}

}  // namespace

TEST_CASE("transitivity check on the constructed weights") {
    auto st = build_construction(13);
    const auto& w = st.concatenated;
    auto v = check_transitive(w, st.s(12));

    CHECK(v.status == VerdictStatus::EvidenceFor);
    CHECK(v.witness["doubling_steps"].get<int>() >= 3);
    CHECK(v.witness["max_exponent"] == "15632744610");
    CHECK(v.witness["records_truncated"] == false);

    // The climb through the fourth doubling block appears as one record run.
    bool found = false;
    for (const auto& ev : v.witness["records"]) {
        if (ev["n_first"] == "221") {
            CHECK(ev["n_last"] == "420");
            CHECK(ev["exponent"] == "210");
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("mixing check finds the exact return times") {
    auto st = build_construction(13);
    const auto& w = st.concatenated;
    auto v = check_mixing(w, st.s(12));

    // Returns of M_1^n to 1 land exactly at the odd-block right edges, and
    // the last one sits in the upper half of the horizon.
    CHECK(v.status == VerdictStatus::EvidenceAgainst);
    CHECK(v.witness["witness_count"] == "5");
    CHECK(v.witness["count_exact"] == true);
    CHECK(v.witness["last_witness"] == "15632744610");

    std::vector<std::string> ns;
    for (const auto& item : v.witness["witnesses"]) {
        ns.push_back(item["n"].get<std::string>());
        CHECK(item["exponent"] == "0");
    }
    CHECK(ns == std::vector<std::string>{"2", "10", "210", "88410", "15632744610"});
}

TEST_CASE("window infimum check on the constructed weights") {
    auto st = build_construction(13);
    const auto& w = st.concatenated;

    auto v9 = check_hypermixing_condition(w, st.s(9));
    CHECK(v9.status == VerdictStatus::EvidenceAgainst);
    CHECK(v9.witness["min_window"]["n"] == "421");
    CHECK(v9.witness["min_window"]["length"] == "87990");
    CHECK(v9.witness["min_window"]["exponent"] == "-210");
    CHECK(v9.witness["single_entry_floor"] == "-1");
    CHECK(v9.witness.contains("recurrence_exponent"));

    // A deeper horizon exposes the next odd block as the new record window.
    auto v12 = check_hypermixing_condition(w, st.s(12));
    CHECK(v12.status == VerdictStatus::EvidenceAgainst);
    CHECK(v12.witness["min_window"]["n"] == "176821");
    CHECK(v12.witness["min_window"]["length"] == "15632567790");
    CHECK(v12.witness["min_window"]["exponent"] == "-88410");
}

TEST_CASE("norm decay minima on the constructed weights") {
    auto st = build_construction(13);
    const auto& w = st.concatenated;
    auto e0 = SparseVector::basis(0);

    auto v = strong_transitivity_evidence(w, e0, 420, ScaledRational::pow2(-10));
    CHECK(v.status == VerdictStatus::EvidenceFor);
    CHECK(v.horizon == 420);
    REQUIRE(v.witness["times"].size() == 3);
    CHECK(v.witness["times"][0]["n"] == "4");
    CHECK(v.witness["times"][1]["n"] == "20");
    CHECK(v.witness["times"][2]["n"] == "420");
    CHECK(parse_scaled(v.witness["times"][0]["norm"].get<std::string>())
              .compare(ScaledRational::pow2(-2)) == 0);
    CHECK(parse_scaled(v.witness["times"][1]["norm"].get<std::string>())
              .compare(ScaledRational::pow2(-10)) == 0);
    CHECK(parse_scaled(v.witness["times"][2]["norm"].get<std::string>())
              .compare(ScaledRational::pow2(-210)) == 0);
    CHECK(v.witness["base_norm"] == "1");

    // Demanding more decay than the horizon delivers is inconclusive, not a
    // failure: deeper minima exist past the scan.
    auto strict = strong_transitivity_evidence(w, e0, 420, ScaledRational::pow2(-300));
    CHECK(strict.status == VerdictStatus::Inconclusive);

    // The scan cap turns a huge horizon into a reported partial scan.
    ClassifierPolicy pol;
    pol.strong_scan_cap = 100;
    auto capped = strong_transitivity_evidence(w, e0, 420, ScaledRational::pow2(-10),
                                               SpaceNorm::sup(), pol);
    CHECK(capped.status == VerdictStatus::EvidenceFor);
    CHECK(capped.horizon == 100);
    CHECK(capped.witness["scan_capped_at"] == "100");
    CHECK(capped.witness["times"].size() == 2);

    CHECK_THROWS_AS(strong_transitivity_evidence(w, SparseVector(), 10), ZeroVector);
    CHECK_THROWS_AS(strong_transitivity_evidence(w, e0, 0), PreconditionViolation);
    CHECK_THROWS_AS(strong_transitivity_evidence(w, e0, 10, ScaledRational()),
                    PreconditionViolation);
    auto st7 = build_construction(7);
    CHECK_THROWS_AS(strong_transitivity_evidence(st7.concatenated, e0, 500),
                    InsufficientDepth);
}

TEST_CASE("classifier battery on toy weight sequences") {
    SECTION("all ones: no growth anywhere") {
        auto w = ones(1201);
        CHECK(check_transitive(w, 1000).status == VerdictStatus::EvidenceAgainst);
        CHECK(check_mixing(w, 1000).status == VerdictStatus::EvidenceAgainst);
        CHECK(check_hypermixing_condition(w, 1000).status ==
              VerdictStatus::EvidenceAgainst);

        // Norms never decay, so the minima scan comes back empty-handed.
        auto v = strong_transitivity_evidence(w, SparseVector::basis(0), 1000);
        CHECK(v.status == VerdictStatus::Inconclusive);
        CHECK(v.witness["times"].empty());
    }

    SECTION("constant doubling: growth at every scale, no returns") {
        auto w = RunLengthWeights::from_runs({{0, 1}, {1, 1100}});
        auto t = check_transitive(w, 1000);
        CHECK(t.status == VerdictStatus::EvidenceFor);
        auto m = check_mixing(w, 1000);
        CHECK(m.status == VerdictStatus::EvidenceFor);
        CHECK(m.witness["witness_count"] == "0");
        auto h = check_hypermixing_condition(w, 1000);
        CHECK(h.status == VerdictStatus::EvidenceFor);
        CHECK(h.witness["min_window"]["exponent"] == "1");
    }

    SECTION("constant halving: everything sinks") {
        auto w = RunLengthWeights::from_runs({{0, 1}, {-1, 1100}});
        CHECK(check_transitive(w, 1000).status == VerdictStatus::EvidenceAgainst);
        CHECK(check_mixing(w, 1000).status == VerdictStatus::EvidenceAgainst);
        CHECK(check_hypermixing_condition(w, 1000).status ==
              VerdictStatus::EvidenceAgainst);
    }

    SECTION("alternating 2, 1/2: bounded oscillation") {
        std::vector<DyadicRun> runs{{0, 1}};
        for (int t = 0; t < 600; ++t) {
            runs.push_back({1, 1});
            runs.push_back({-1, 1});
        }
        auto w = RunLengthWeights::from_runs(std::move(runs));
        auto t = check_transitive(w, 1000);
        CHECK(t.status == VerdictStatus::EvidenceAgainst);
        CHECK(t.witness["max_exponent"] == "1");
        CHECK(check_mixing(w, 1000).status == VerdictStatus::EvidenceAgainst);
    }

    SECTION("one early dip, then steady doubling") {
        auto w = RunLengthWeights::from_runs({{0, 1}, {-1, 20}, {1, 2000}});
        // Record runs compress into a single event here, so the doubling-chain
        // counter sees too few events; the three-scale comparison still fires.
        auto t = check_transitive(w, 2000);
        CHECK(t.status == VerdictStatus::EvidenceFor);
        CHECK(t.witness["max_exponent"] == "1960");

        auto m = check_mixing(w, 2000);
        CHECK(m.status == VerdictStatus::EvidenceFor);
        CHECK(m.witness["witness_count"] == "40");
        CHECK(m.witness["last_witness"] == "40");

        // The dip is symmetric, so its own second half reads as a recurring
        // half-depth window: the infimum check stays conservatively negative.
        auto h = check_hypermixing_condition(w, 2000);
        CHECK(h.status == VerdictStatus::EvidenceAgainst);
        CHECK(h.witness["min_window"]["exponent"] == "-20");
    }

    SECTION("one front-loaded dip reads as a positive infimum") {
        // The dip sits in the first quarter so the running max still doubles
        // at every scale; transitivity must hold for the infimum to matter.
        auto w = RunLengthWeights::from_runs(
            {{0, 1}, {1, 2}, {-10, 1}, {-1, 1}, {1, 1996}});
        auto h = check_hypermixing_condition(w, 2000);
        CHECK(h.status == VerdictStatus::EvidenceFor);
        CHECK(h.witness["min_window"]["exponent"] == "-11");
        CHECK_FALSE(h.witness.contains("recurrence_exponent"));
    }

    SECTION("horizon preconditions") {
        auto w = ones(100);
        CHECK_THROWS_AS(check_transitive(w, 0), PreconditionViolation);
        CHECK_THROWS_AS(check_transitive(w, 100), InsufficientDepth);
        CHECK_THROWS_AS(check_mixing(w, 100), InsufficientDepth);
        CHECK_THROWS_AS(check_hypermixing_condition(w, 100), InsufficientDepth);
    }
}

TEST_CASE("classifier battery in float mode") {
    auto geometric = [](const Rational& ratio, std::size_t n) {
        std::vector<Rational> values{1};
        for (std::size_t t = 0; t < n; ++t) values.push_back(ratio);
        return GeneralWeights::from_values(std::move(values));
    };

    SECTION("ratio 3/2 grows at every scale") {
        auto g = geometric(Rational(3, 2), 60);
        CHECK(check_transitive(g, 60).status == VerdictStatus::EvidenceFor);
        auto m = check_mixing(g, 60);
        CHECK(m.status == VerdictStatus::EvidenceFor);
        CHECK(m.witness["witnesses"].empty());
        CHECK(check_hypermixing_condition(g, 60).status == VerdictStatus::EvidenceFor);
    }

    SECTION("ratio 2/3 sinks") {
        auto g = geometric(Rational(2, 3), 60);
        CHECK(check_transitive(g, 60).status == VerdictStatus::EvidenceAgainst);
        CHECK(check_mixing(g, 60).status == VerdictStatus::EvidenceAgainst);
        CHECK(check_hypermixing_condition(g, 60).status == VerdictStatus::EvidenceAgainst);
    }

    SECTION("alternating 2, 1/2 stagnates") {
        std::vector<Rational> values{1};
        for (int t = 0; t < 30; ++t) {
            values.push_back(2);
            values.emplace_back(Rational(1, 2));
        }
        auto g = GeneralWeights::from_values(std::move(values));
        CHECK(check_transitive(g, 60).status == VerdictStatus::EvidenceAgainst);
        CHECK(check_mixing(g, 60).status == VerdictStatus::EvidenceAgainst);
    }

    SECTION("norm minima with a 4,4,1/4,1/4 cycle") {
        std::vector<Rational> values{1};
        for (int t = 0; t < 15; ++t) {
            values.push_back(4);
            values.push_back(4);
            values.emplace_back(Rational(1, 4));
            values.emplace_back(Rational(1, 4));
        }
        auto g = GeneralWeights::from_values(std::move(values));
        auto v = strong_transitivity_evidence(g, SparseVector::basis(0), 59, 0.125);
        CHECK(v.status == VerdictStatus::EvidenceFor);
        REQUIRE_FALSE(v.witness["times"].empty());
        CHECK(v.witness["times"][0]["n"] == "2");
    }

    SECTION("sinking weights refuse the norm scan") {
        std::vector<Rational> values{1};
        for (int t = 1; t <= 40; ++t) values.emplace_back(Rational(1, t + 1));
        auto g = GeneralWeights::from_values(std::move(values));
        CHECK(is_surjective_shift(g).status == VerdictStatus::EvidenceAgainst);
        CHECK_THROWS_AS(strong_transitivity_evidence(g, SparseVector::basis(0), 20),
                        PreconditionViolation);
    }

    SECTION("float-mode preconditions") {
        auto g = geometric(Rational(3, 2), 20);
        CHECK_THROWS_AS(check_transitive(g, 0), PreconditionViolation);
        CHECK_THROWS_AS(check_transitive(g, 21), InsufficientDepth);
        CHECK_THROWS_AS(strong_transitivity_evidence(g, SparseVector::basis(0), 30),
                        InsufficientDepth);
        CHECK_THROWS_AS(strong_transitivity_evidence(g, SparseVector::basis(0), 10, 0.0),
                        PreconditionViolation);
    }
}

TEST_CASE("classifier report shape") {
    auto w = ones(101);
    auto v = check_transitive(w, 100);
    auto j = classifier_report_json("transitive", v);
    CHECK(j["criterion"] == "transitive");
    CHECK(j["status"] == "EvidenceAgainst");
    CHECK(j["horizon"] == "100");
    CHECK(j["witness"].is_object());
    CHECK(j["narrative"].is_string());
}
