#include <catch2/catch_amalgamated.hpp>

#include "shiftlab/construction.hpp"
#include "shiftlab/shifts.hpp"

using namespace shiftlab;

namespace {

SparseVector random_vector(SplitMix64& rng, std::int64_t max_index, int max_entries) {
    std::vector<SparseVector::Entry> entries;
    int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_entries)));
    for (int t = 0; t < n; ++t) {
        BigInt idx(rng.below(static_cast<std::uint64_t>(max_index + 1)));
        std::int64_t num = static_cast<std::int64_t>(rng.below(19)) - 9;
        if (num == 0) num = 1;
        std::int64_t den = 1 + static_cast<std::int64_t>(rng.below(5));
        std::int64_t e = static_cast<std::int64_t>(rng.below(21)) - 10;
        ScaledRational c =
            ScaledRational::from_rational(Rational(num, den)) * ScaledRational::pow2(BigInt(e));
        entries.emplace_back(std::move(idx), std::move(c));
    }
    return SparseVector::from_entries(std::move(entries));
}

}  // namespace

TEST_CASE("sparse vector basics") {
    auto e0 = SparseVector::basis(0);
    CHECK(e0.support_size() == 1);
    CHECK(e0.at(0)->compare(ScaledRational::from_int(1)) == 0);
    CHECK(e0.max_support() == 0);
    CHECK_FALSE(e0.at(1).has_value());
    CHECK_THROWS_AS(SparseVector::basis(-1), PreconditionViolation);

    SparseVector zero;
    CHECK(zero.is_zero());
    CHECK_THROWS_AS(zero.max_support(), ZeroVector);

    // Duplicate indices merge; exact cancellation drops the entry.
    auto merged = SparseVector::from_entries({
        {BigInt(5), ScaledRational::from_int(3)},
        {BigInt(2), ScaledRational::from_int(1)},
        {BigInt(5), ScaledRational::from_int(-3)},
        {BigInt(7), ScaledRational()},
    });
    CHECK(merged.support_size() == 1);
    CHECK(merged.at(2)->compare(ScaledRational::from_int(1)) == 0);
    CHECK(merged.max_support() == 2);

    CHECK_THROWS_AS(SparseVector::from_entries({{BigInt(-1), ScaledRational::from_int(1)}}),
                    PreconditionViolation);

    auto a = SparseVector::from_entries({{BigInt(0), ScaledRational::from_int(2)}});
    auto b = SparseVector::from_entries(
        {{BigInt(0), ScaledRational::from_rational(Rational(4, 2))}});
    CHECK(a == b);
    CHECK_FALSE(a == e0);
}

TEST_CASE("single backward shift") {
    auto st = build_construction(7);
    const auto& w = st.concatenated;

    // B annihilates e_0 and index 0 stays inert in longer vectors.
    CHECK(backward_shift(w, SparseVector::basis(0)).is_zero());

    // Index 0 carries the inert 2^{-1}; the first acting weight is w_1 = 2,
    // so B e_1 = 2 e_0.
    auto be1 = backward_shift(w, SparseVector::basis(1));
    CHECK(be1.support_size() == 1);
    CHECK(be1.at(0)->compare(ScaledRational::from_int(2)) == 0);

    // w_2 = 2^{-1}, so B e_2 = (1/2) e_1.
    auto be2 = backward_shift(w, SparseVector::basis(2));
    CHECK(be2.at(1)->compare(ScaledRational::pow2(-1)) == 0);

    // Support past the materialized weights is an error, not a guess.
    CHECK_THROWS_AS(backward_shift(w, SparseVector::basis(421)), IndexBeyondMaterialized);
}

TEST_CASE("shift powers match iterated single shifts") {
    auto st = build_construction(9);
    const auto& w = st.concatenated;
    SplitMix64 rng(2024);

    for (int trial = 0; trial < 40; ++trial) {
        SparseVector x = random_vector(rng, 400, 6);
        std::int64_t n = 1 + static_cast<std::int64_t>(rng.below(30));

        SparseVector fwd_iter = x;
        for (std::int64_t t = 0; t < n; ++t) fwd_iter = forward_shift(w, fwd_iter);
        CHECK(forward_shift_power(w, x, BigInt(n)) == fwd_iter);

        SparseVector bwd_iter = x;
        for (std::int64_t t = 0; t < n; ++t) bwd_iter = backward_shift(w, bwd_iter);
        CHECK(backward_shift_power(w, x, BigInt(n)) == bwd_iter);
    }

    SparseVector x = random_vector(rng, 400, 6);
    CHECK(forward_shift_power(w, x, 0) == x);
    CHECK(backward_shift_power(w, x, 0) == x);
    CHECK_THROWS_AS(forward_shift_power(w, x, -1), PreconditionViolation);
    CHECK_THROWS_AS(backward_shift_power(w, x, -1), PreconditionViolation);

    // Pushing the support past the materialized region must throw.
    CHECK_THROWS_AS(forward_shift_power(w, SparseVector::basis(88400), BigInt(100)),
                    IndexBeyondMaterialized);
}

TEST_CASE("backward shift is linear") {
    auto st = build_construction(9);
    const auto& w = st.concatenated;
    SplitMix64 rng(77);
    for (int trial = 0; trial < 25; ++trial) {
        SparseVector x = random_vector(rng, 300, 5);
        SparseVector y = random_vector(rng, 300, 5);
        std::vector<SparseVector::Entry> sum_entries;
        for (const auto& e : x.entries()) sum_entries.push_back(e);
        for (const auto& e : y.entries()) sum_entries.push_back(e);
        SparseVector sum = SparseVector::from_entries(std::move(sum_entries));

        SparseVector lhs = backward_shift(w, sum);
        SparseVector bx = backward_shift(w, x);
        SparseVector by = backward_shift(w, y);
        std::vector<SparseVector::Entry> rhs_entries;
        for (const auto& e : bx.entries()) rhs_entries.push_back(e);
        for (const auto& e : by.entries()) rhs_entries.push_back(e);
        CHECK(lhs == SparseVector::from_entries(std::move(rhs_entries)));
    }
}

TEST_CASE("forward shift is a bit-exact right inverse") {
    auto st = build_construction(9);
    const auto& w = st.concatenated;
    SplitMix64 rng(5150);

    for (const std::int64_t n : {std::int64_t{1}, std::int64_t{4}, std::int64_t{20},
                                 std::int64_t{210}}) {
        auto v = verify_right_inverse(w, SparseVector::basis(0), BigInt(n));
        CHECK(v.status == VerdictStatus::HoldsExactly);
        CHECK(v.horizon == n);
    }

    for (int trial = 0; trial < 20; ++trial) {
        SparseVector x = random_vector(rng, 500, 8);
        std::int64_t n = static_cast<std::int64_t>(rng.below(400));
        auto v = verify_right_inverse(w, x, BigInt(n));
        CHECK(v.status == VerdictStatus::HoldsExactly);
    }

    // The left composition S B is not the identity: it kills the e_0 part.
    SparseVector mixed = SparseVector::from_entries({
        {BigInt(0), ScaledRational::from_int(1)},
        {BigInt(3), ScaledRational::from_int(1)},
    });
    SparseVector sb = forward_shift(w, backward_shift(w, mixed));
    CHECK(sb.support_size() == 1);
    CHECK(sb.at(3)->compare(ScaledRational::from_int(1)) == 0);
}

TEST_CASE("norms on small vectors") {
    auto x = SparseVector::from_entries({
        {BigInt(0), ScaledRational::from_int(3)},
        {BigInt(5), ScaledRational::from_int(-4)},
    });

    auto sup = norm(x, SpaceNorm::sup());
    CHECK(sup.exact);
    CHECK(sup.exact_value.compare(ScaledRational::from_int(4)) == 0);
    CHECK(sup.to_string() == "4");

    auto l1 = norm(x, SpaceNorm::l1());
    CHECK(l1.exact);
    CHECK(l1.exact_value.compare(ScaledRational::from_int(7)) == 0);

    // 3-4-5 scaled to unit length: the square root is exact.
    auto pythag = SparseVector::from_entries({
        {BigInt(0), ScaledRational::from_rational(Rational(3, 5))},
        {BigInt(1), ScaledRational::from_rational(Rational(-4, 5))},
    });
    auto l2 = norm(pythag, SpaceNorm::l2());
    CHECK(l2.exact);
    CHECK(l2.exact_value.compare(ScaledRational::from_int(1)) == 0);

    // sqrt(2) is not representable; the log2 approximation takes over.
    auto ones = SparseVector::from_entries({
        {BigInt(0), ScaledRational::from_int(1)},
        {BigInt(1), ScaledRational::from_int(1)},
    });
    auto root2 = norm(ones, SpaceNorm::l2());
    CHECK_FALSE(root2.exact);
    CHECK(root2.log2_approx == Catch::Approx(0.5).epsilon(1e-12));
    CHECK(root2.to_string().substr(0, 3) == "~2^");

    auto l3 = norm(ones, SpaceNorm::lp(3));
    CHECK(l3.log2_approx == Catch::Approx(1.0 / 3.0).epsilon(1e-12));

    auto l32 = norm(ones, SpaceNorm::lp(Rational(3, 2)));
    CHECK(l32.log2_approx == Catch::Approx(2.0 / 3.0).epsilon(1e-12));

    auto zero = norm(SparseVector(), SpaceNorm::l2());
    CHECK(zero.exact);
    CHECK(zero.exact_value.is_zero());
    CHECK(zero.approx() == 0.0);

    CHECK_THROWS_AS(SpaceNorm::lp(Rational(1, 2)), PreconditionViolation);
    CHECK(SpaceNorm::sup().name() == "sup");
    CHECK(SpaceNorm::l1().name() == "l1");
    CHECK(SpaceNorm::l2().name() == "l2");
    CHECK(SpaceNorm::lp(Rational(3, 2)).name() == "l3/2");
}

TEST_CASE("norms survive astronomical exponent gaps") {
    // Exponent spread far past the exact-alignment cutoff: the l1 value falls
    // back to the log2 domain, while sup stays exact.
    auto x = SparseVector::from_entries({
        {BigInt(0), ScaledRational::from_int(1)},
        {BigInt(1), ScaledRational::pow2(BigInt(-1) << 25)},
    });
    auto l1 = norm(x, SpaceNorm::l1());
    CHECK_FALSE(l1.exact);
    CHECK(l1.log2_approx == Catch::Approx(0.0).margin(1e-9));

    auto sup = norm(x, SpaceNorm::sup());
    CHECK(sup.exact);
    CHECK(sup.exact_value.compare(ScaledRational::from_int(1)) == 0);

    // Huge but representable exponents keep exact sup arithmetic.
    auto tiny = SparseVector::from_entries(
        {{BigInt(7), ScaledRational::pow2(BigInt("-15632744610"))}});
    auto tiny_sup = norm(tiny, SpaceNorm::sup());
    CHECK(tiny_sup.exact);
    CHECK(tiny_sup.exact_value.compare(ScaledRational::pow2(BigInt("-15632744610"))) == 0);
    CHECK(tiny_sup.to_string() == "1*2^-15632744610");
}

TEST_CASE("decay profile of the first basis vector") {
    auto st = build_construction(12);
    const auto& w = st.concatenated;
    auto times = recovery_times(st, 5);

    auto profile = decay_profile(w, SparseVector::basis(0), times, SpaceNorm::sup());
    REQUIRE(profile.size() == 5);

    // ||S^{n_k} e_0|| collapses to a single power of two per recovery time.
    const char* expected[] = {"-2", "-10", "-210", "-88410", "-15632744610"};
    for (int k = 1; k <= 5; ++k) {
        const auto& pt = profile[static_cast<std::size_t>(k - 1)];
        CHECK(pt.k == k);
        CHECK(pt.n_k == times.at(k));
        CHECK(pt.value.exact);
        CHECK(pt.value.exact_value.compare(ScaledRational::pow2(parse_big(expected[k - 1]))) ==
              0);
    }

    // A single-entry vector has the same l1 and sup norms.
    auto l1_profile = decay_profile(w, SparseVector::basis(0), times, SpaceNorm::l1());
    for (int k = 0; k < 5; ++k)
        CHECK(l1_profile[static_cast<std::size_t>(k)].value.exact_value.compare(
                  profile[static_cast<std::size_t>(k)].value.exact_value) == 0);

    auto csv = decay_profile_csv(profile, SpaceNorm::sup());
    CHECK(csv.substr(0, 21) == "k,n_k,norm_kind,value");
    CHECK(csv.find("1,4,sup,0.25\n") != std::string::npos);
    CHECK(csv.find("2,20,sup,0.0009765625\n") != std::string::npos);
    CHECK(csv.find("5,31265489220,sup,1*2^-15632744610\n") != std::string::npos);

    CHECK_THROWS_AS(decay_profile(w, SparseVector(), times, SpaceNorm::sup()), ZeroVector);

    // Support + n_k past the materialized region is detected before shifting.
    auto st10 = build_construction(10);
    auto times10 = recovery_times(st10, 4);
    CHECK_THROWS_AS(
        decay_profile(st10.concatenated, SparseVector::basis(1), times10, SpaceNorm::sup()),
        InsufficientDepth);
}

TEST_CASE("vector JSON round trip") {
    SplitMix64 rng(31337);
    for (int trial = 0; trial < 20; ++trial) {
        SparseVector x = random_vector(rng, 1000, 10);
        CHECK(vector_from_json(vector_to_json(x)) == x);
    }

    auto x = vector_from_json(nlohmann::json::parse(
        R"({"entries": [[0, "3/2*2^-7"], ["15632744610", "1/3"], [2, 5]]})"));
    CHECK(x.support_size() == 3);
    CHECK(x.at(0)->compare(ScaledRational::from_rational(Rational(3, 2)) *
                           ScaledRational::pow2(-7)) == 0);
    CHECK(x.at(BigInt("15632744610"))
              ->compare(ScaledRational::from_rational(Rational(1, 3))) == 0);
    CHECK(x.at(2)->compare(ScaledRational::from_int(5)) == 0);

    CHECK(parse_scaled("5").compare(ScaledRational::from_int(5)) == 0);
    CHECK(parse_scaled("3/4*2^2").compare(ScaledRational::from_int(3)) == 0);

    CHECK_THROWS_AS(vector_from_json(nlohmann::json::array()), ParseError);
    CHECK_THROWS_AS(vector_from_json(nlohmann::json::parse(R"({"entries": [[1]]})")),
                    ParseError);
    CHECK_THROWS_AS(vector_from_json(nlohmann::json::parse(R"({"entries": [[1, true]]})")),
                    ParseError);
}
