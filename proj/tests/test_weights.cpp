#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "shiftlab/weights.hpp"

using namespace shiftlab;

namespace {

RunLengthWeights sample_weights() {
    // w = [1/2, 2, 2, 1/2, 1, 1, 2] as exponents [-1, 1, 1, -1, 0, 0, 1].
    return RunLengthWeights::from_runs(
        {{-1, 1}, {1, 2}, {-1, 1}, {0, 2}, {1, 1}});
}

}  // namespace

TEST_CASE("run tables and lookups", "[weights]") {
    auto w = sample_weights();
    CHECK(w.total_length() == 7);
    CHECK(w.is_flat());
    REQUIRE(w.runs().size() == 5);
    std::vector<long long> want{-1, 1, 1, -1, 0, 0, 1};
    for (std::size_t i = 0; i < want.size(); ++i)
        CHECK(w.exponent_at(BigInt(i)) == want[i]);
    CHECK_THROWS_AS(w.exponent_at(BigInt(7)), IndexBeyondMaterialized);
    long long acc = 0;
    CHECK(w.prefix_exponent(BigInt(0)) == 0);
    for (std::size_t i = 0; i < want.size(); ++i) {
        acc += want[i];
        CHECK(w.prefix_exponent(BigInt(i + 1)) == acc);
    }
    CHECK_THROWS_AS(w.prefix_exponent(BigInt(8)), IndexBeyondMaterialized);
}

TEST_CASE("from_runs rejects bad runs", "[weights]") {
    CHECK_THROWS_AS(RunLengthWeights::from_runs({}), PreconditionViolation);
    CHECK_THROWS_AS(RunLengthWeights::from_runs({{0, 0}}), PreconditionViolation);
    CHECK_THROWS_AS(RunLengthWeights::from_runs({{0, -3}}), PreconditionViolation);
}

TEST_CASE("partial products are exact powers of two", "[weights]") {
    auto w = sample_weights();
    // Index 0 is inert: products start at i >= 1.
    CHECK_THROWS_AS(partial_product(w, BigInt(0), BigInt(2)), PreconditionViolation);
    CHECK_THROWS_AS(partial_product(w, BigInt(1), BigInt(-1)), PreconditionViolation);
    CHECK_THROWS_AS(partial_product(w, BigInt(5), BigInt(3)), IndexBeyondMaterialized);
    auto empty = std::get<ExactPow2>(partial_product(w, BigInt(3), BigInt(0)));
    CHECK(empty.exponent == 0);

    // Naive-loop oracle over every admissible window.
    for (long long i = 1; i < 7; ++i) {
        for (long long j = 0; i + j <= 7; ++j) {
            long long sum = 0;
            for (long long t = i; t < i + j; ++t) sum += *to_i64(w.exponent_at(t));
            auto got = std::get<ExactPow2>(partial_product(w, BigInt(i), BigInt(j)));
            CHECK(got.exponent == sum);
        }
    }
}

TEST_CASE("window stats preconditions", "[weights]") {
    auto w = sample_weights();
    CHECK_THROWS_AS(w.window_stats(BigInt(3), BigInt(3)), PreconditionViolation);
    CHECK_THROWS_AS(w.window_stats(BigInt(3), BigInt(9)), PreconditionViolation);
    auto s = w.window_stats(BigInt(1), BigInt(4));
    CHECK(s.len == 3);
    CHECK(s.sum == 1);
}

TEST_CASE("flatten respects its budget", "[weights]") {
    auto big = RunLengthWeights::from_tree(
        rle::make_repeat(rle::make_seq({rle::make_run(1, 1), rle::make_run(0, 1)}),
                         BigInt(1) << 40));
    CHECK_FALSE(big.is_flat());
    CHECK_THROWS_AS(big.flatten(1000), DepthTooLarge);
    CHECK_THROWS_AS(big.runs(), DepthTooLarge);
    auto small = RunLengthWeights::from_tree(
        rle::make_repeat(rle::make_seq({rle::make_run(1, 2), rle::make_run(0, 1)}), 3));
    auto runs = small.flatten(100);
    REQUIRE(runs.size() == 6);
    CHECK(runs[0].exponent == 1);
    CHECK(runs[0].length == 2);
    CHECK(runs[1].exponent == 0);
    CHECK(runs[1].length == 1);
    // Equal exponents merge across node boundaries.
    auto merged = RunLengthWeights::from_tree(
        rle::make_repeat(rle::make_seq({rle::make_run(2, 1), rle::make_run(2, 3)}), 5));
    auto mruns = merged.flatten(100);
    REQUIRE(mruns.size() == 1);
    CHECK(mruns[0].exponent == 2);
    CHECK(mruns[0].length == 20);
}

TEST_CASE("general weights carry log-domain products", "[weights]") {
    auto g = GeneralWeights::from_values({Rational(3, 2), Rational(2), Rational(1, 3)});
    CHECK(g.declared_horizon() == 3);
    CHECK(g.value_at(0) == Rational(3, 2));
    auto p = std::get<LogSpace>(partial_product_general(g, 1, 2));
    double want = std::log2(2.0) + std::log2(1.0 / 3.0);
    CHECK(std::abs(p.log2_value - want) < 1e-9);
    CHECK(p.rel_err_bound >= 0.0);
    CHECK_THROWS_AS(GeneralWeights::from_values({Rational(0)}), PreconditionViolation);
    CHECK_THROWS_AS(GeneralWeights::from_values({Rational(-1)}), PreconditionViolation);
    CHECK_THROWS_AS(partial_product_general(g, 0, 1), PreconditionViolation);
    CHECK_THROWS_AS(partial_product_general(g, 1, 3), IndexBeyondMaterialized);
}

TEST_CASE("surjectivity verdicts", "[weights]") {
    auto w = sample_weights();
    auto v = is_surjective_shift(w);
    CHECK(v.status == VerdictStatus::HoldsUpToHorizon);
    CHECK(v.witness["min_exponent"] == "-1");

    auto g_ok = GeneralWeights::from_values({Rational(1, 2), Rational(2), Rational(1, 2)});
    CHECK(is_surjective_shift(g_ok).status == VerdictStatus::HoldsUpToHorizon);
    // Strictly sinking weights: inf looks like 0 at the horizon.
    std::vector<Rational> sinking;
    Rational v2(1);
    for (int i = 0; i < 40; ++i) {
        v2 /= 2;
        sinking.push_back(v2);
    }
    CHECK(is_surjective_shift(GeneralWeights::from_values(sinking)).status ==
          VerdictStatus::EvidenceAgainst);
}

TEST_CASE("weights files round trip", "[weights]") {
    auto w = sample_weights();
    auto j = weights_to_json(w);
    CHECK(j["kind"] == "dyadic_runs");
    auto back = weights_from_json(j);
    REQUIRE(back.is_dyadic());
    CHECK(back.dyadic().total_length() == 7);
    for (long long i = 0; i < 7; ++i)
        CHECK(back.dyadic().exponent_at(i) == w.exponent_at(i));

    nlohmann::json gj;
    gj["kind"] = "general";
    gj["values"] = {"3/2", "2", "1/3"};
    auto gw = weights_from_json(gj);
    REQUIRE_FALSE(gw.is_dyadic());
    CHECK(gw.general().value_at(2) == Rational(1, 3));
    auto gj2 = weights_to_json(gw.general());
    CHECK(gj2["values"][0] == "3/2");

    CHECK_THROWS_AS(weights_from_json(nlohmann::json::parse("{}")), ParseError);
    CHECK_THROWS_AS(weights_from_json(nlohmann::json::parse(R"({"kind":"x"})")), ParseError);
    CHECK_THROWS_AS(weights_from_json(nlohmann::json::parse(R"({"kind":"general","values":["0"]})")),
                    PreconditionViolation);
}

TEST_CASE("big run lengths serialize as decimal strings", "[weights]") {
    std::vector<DyadicRun> runs{{BigInt(-1), BigInt("15632744610")}};
    auto j = runs_to_json(runs);
    CHECK(j["runs"][0][1] == "15632744610");
    auto w = weights_from_json(j);
    CHECK(w.dyadic().total_length() == BigInt("15632744610"));
}
