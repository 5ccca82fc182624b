#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "shiftlab/errors.hpp"

namespace shiftlab {

// Indices, run lengths, and binary exponents routinely exceed 64 bits (the
// eleventh cumulative block length is ~1.5e10 and the thirteenth ~4.9e20), so
// all sequence arithmetic runs on arbitrary-precision integers.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline std::string to_decimal(const BigInt& v) { return v.str(); }

inline BigInt parse_big(const std::string& text) {
    if (text.empty()) throw ParseError("empty integer literal");
    std::size_t i = (text[0] == '-' || text[0] == '+') ? 1 : 0;
    if (i == text.size()) throw ParseError("sign without digits: '" + text + "'");
    for (; i < text.size(); ++i)
        if (text[i] < '0' || text[i] > '9')
            throw ParseError("bad integer literal: '" + text + "'");
    return BigInt(text[0] == '+' ? text.substr(1) : text);
}

// Accepts "p/q" or a bare integer "p". q must be nonzero; the result is
// normalized by cpp_rational.
inline Rational parse_rational(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) return Rational(parse_big(text));
    BigInt p = parse_big(text.substr(0, slash));
    BigInt q = parse_big(text.substr(slash + 1));
    if (q == 0) throw ParseError("zero denominator: '" + text + "'");
    return Rational(p, q);
}

inline std::string format_rational(const Rational& r) {
    if (boost::multiprecision::denominator(r) == 1)
        return boost::multiprecision::numerator(r).str();
    return boost::multiprecision::numerator(r).str() + "/" +
           boost::multiprecision::denominator(r).str();
}

// Number of bits in |v|; 0 for v == 0.
inline std::size_t bit_length(const BigInt& v) {
    if (v == 0) return 0;
    return boost::multiprecision::msb(boost::multiprecision::abs(v)) + 1;
}

// Largest e with 2^e dividing v. Precondition: v != 0.
inline std::size_t twos_valuation(const BigInt& v) {
    return boost::multiprecision::lsb(boost::multiprecision::abs(v));
}

inline BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline BigInt ceil_div(const BigInt& a, const BigInt& b) {
    return -floor_div(-a, b);
}

inline std::optional<std::int64_t> to_i64(const BigInt& v) {
    static const BigInt lo = BigInt(std::numeric_limits<std::int64_t>::min());
    static const BigInt hi = BigInt(std::numeric_limits<std::int64_t>::max());
    if (v < lo || v > hi) return std::nullopt;
    return static_cast<std::int64_t>(v);
}

inline std::uint64_t to_u64_clamped(const BigInt& v) {
    if (v <= 0) return 0;
    static const BigInt hi = BigInt(std::numeric_limits<std::uint64_t>::max());
    if (v >= hi) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(v);
}

// splitmix64: tiny, seedable, reproducible across platforms. Used for the
// stratified index sampling in wide estimate scans.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound); bound > 0. Modulo bias is irrelevant for
    // sampling jitter but kept small anyway via 128-bit style rejection.
    std::uint64_t below(std::uint64_t bound) {
        std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }
};

}  // namespace shiftlab
