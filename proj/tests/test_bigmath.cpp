#include <catch2/catch_amalgamated.hpp>

#include "shiftlab/bigmath.hpp"
#include "shiftlab/errors.hpp"
#include "shiftlab/scaled.hpp"

using namespace shiftlab;

TEST_CASE("decimal round trip", "[bigmath]") {
    for (const char* s : {"0", "1", "-1", "488765408098600848810", "-15632744610"}) {
        CHECK(to_decimal(parse_big(s)) == std::string(s));
    }
    CHECK(parse_big("+7") == 7);
    CHECK_THROWS_AS(parse_big(""), ParseError);
    CHECK_THROWS_AS(parse_big("12x"), ParseError);
    CHECK_THROWS_AS(parse_big("0x10"), ParseError);
}

TEST_CASE("rational parse and format", "[bigmath]") {
    CHECK(format_rational(parse_rational("3/4")) == "3/4");
    CHECK(format_rational(parse_rational("-6/8")) == "-3/4");
    CHECK(format_rational(parse_rational("5")) == "5");
    CHECK(format_rational(Rational(10, 2)) == "5");
    CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
    CHECK_THROWS_AS(parse_rational("a/b"), ParseError);
}

TEST_CASE("bit length and valuation", "[bigmath]") {
    CHECK(bit_length(BigInt(0)) == 0);
    CHECK(bit_length(BigInt(1)) == 1);
    CHECK(bit_length(BigInt(255)) == 8);
    CHECK(bit_length(BigInt(256)) == 9);
    CHECK(bit_length(BigInt(-256)) == 9);
    CHECK(twos_valuation(BigInt(12)) == 2);
    CHECK(twos_valuation(BigInt(1)) == 0);
    CHECK(twos_valuation(BigInt(1) << 100) == 100);
}

TEST_CASE("floor and ceil division follow sign conventions", "[bigmath]") {
    CHECK(floor_div(BigInt(7), BigInt(2)) == 3);
    CHECK(floor_div(BigInt(-7), BigInt(2)) == -4);
    CHECK(ceil_div(BigInt(7), BigInt(2)) == 4);
    CHECK(ceil_div(BigInt(-7), BigInt(2)) == -3);
    CHECK(floor_div(BigInt(-8), BigInt(2)) == -4);
}

TEST_CASE("narrowing helpers", "[bigmath]") {
    CHECK(to_i64(BigInt(42)).value() == 42);
    CHECK(to_i64(BigInt(-42)).value() == -42);
    CHECK_FALSE(to_i64(BigInt(1) << 70).has_value());
    CHECK(to_u64_clamped(BigInt(1) << 70) == UINT64_MAX);
    CHECK(to_u64_clamped(BigInt(5)) == 5);
}

TEST_CASE("splitmix is deterministic and respects bounds", "[bigmath]") {
    SplitMix64 a(0x5eedbeefcafef00dULL), b(0x5eedbeefcafef00dULL);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    SplitMix64 c(7);
    for (int i = 0; i < 1000; ++i) {
        auto v = c.below(17);
        CHECK(v < 17);
    }
}

TEST_CASE("scaled rational normalizes to odd mantissa", "[scaled]") {
    auto x = ScaledRational::from_rational(Rational(12, 8));
    CHECK(x.mantissa() == Rational(3));
    CHECK(x.exponent2() == -1);
    auto y = ScaledRational::from_int(BigInt(48));
    CHECK(y.mantissa() == Rational(3));
    CHECK(y.exponent2() == 4);
    CHECK(ScaledRational().is_zero());
    CHECK(ScaledRational::pow2(BigInt(-10)).to_exact_string() == "1/1024");
}

TEST_CASE("scaled arithmetic is exact", "[scaled]") {
    auto a = ScaledRational::from_rational(Rational(3, 4));
    auto b = ScaledRational::from_rational(Rational(1, 4));
    CHECK((a + b) == ScaledRational::from_int(BigInt(1)));
    CHECK((a - b) == ScaledRational::from_rational(Rational(1, 2)));
    CHECK((a * b) == ScaledRational::from_rational(Rational(3, 16)));
    CHECK((a / b) == ScaledRational::from_int(BigInt(3)));
    CHECK(a.square() == ScaledRational::from_rational(Rational(9, 16)));
    CHECK((-a).sign() == -1);
    CHECK((-a).abs() == a);
}

TEST_CASE("comparisons survive astronomical exponent gaps", "[scaled]") {
    auto tiny = ScaledRational::pow2(BigInt("-15632744610"));
    auto small = ScaledRational::pow2(BigInt(-5));
    CHECK(tiny < small);
    CHECK(small > tiny);
    CHECK(tiny > ScaledRational());
    CHECK(tiny.compare_abs_pow2(BigInt(-5)) < 0);
    CHECK(small.compare_abs_pow2(BigInt(-5)) == 0);
    CHECK(small.compare_abs_pow2(BigInt(-6)) > 0);
    auto huge = ScaledRational::pow2(BigInt("15632744610"));
    CHECK(huge > small);
    CHECK((tiny * huge) == ScaledRational::from_int(BigInt(1)));
}

TEST_CASE("addition refuses to fold astronomical gaps", "[scaled]") {
    auto tiny = ScaledRational::pow2(BigInt("-15632744610"));
    auto one = ScaledRational::from_int(BigInt(1));
    CHECK_THROWS_AS(one.add(tiny), PreconditionViolation);
    CHECK(one.add(ScaledRational::pow2(-20)) ==
          ScaledRational::from_rational(Rational(1048577, 1048576)));
}

TEST_CASE("exact square roots", "[scaled]") {
    auto four = ScaledRational::from_int(BigInt(4));
    REQUIRE(four.sqrt_exact().has_value());
    CHECK(*four.sqrt_exact() == ScaledRational::from_int(BigInt(2)));
    auto q = ScaledRational::from_rational(Rational(9, 16));
    CHECK(*q.sqrt_exact() == ScaledRational::from_rational(Rational(3, 4)));
    CHECK_FALSE(ScaledRational::from_int(BigInt(2)).sqrt_exact().has_value());
    CHECK_FALSE((-four).sqrt_exact().has_value());
    // 2^(-10) is a perfect square of 2^(-5).
    CHECK(*ScaledRational::pow2(-10).sqrt_exact() == ScaledRational::pow2(-5));
}

TEST_CASE("string forms", "[scaled]") {
    CHECK(ScaledRational::from_rational(Rational(3, 2)).to_exact_string() == "3/2");
    auto far = ScaledRational::pow2(BigInt(100000));
    CHECK(far.to_exact_string() == "1*2^100000");
    auto dec = ScaledRational::from_rational(Rational(1, 4)).to_exact_decimal();
    REQUIRE(dec.has_value());
    CHECK(*dec == "0.25");
    // Denominator with a factor other than 2 and 5 has no finite decimal.
    CHECK_FALSE(ScaledRational::from_rational(Rational(1, 3)).to_exact_decimal().has_value());
    CHECK(ScaledRational::from_rational(Rational(1, 10)).to_exact_decimal().value() == "0.1");
}
