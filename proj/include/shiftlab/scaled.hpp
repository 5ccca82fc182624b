#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "shiftlab/bigmath.hpp"
#include "shiftlab/errors.hpp"

namespace shiftlab {

namespace detail {

// Compares a * 2^s against b for a, b > 0 without materializing huge shifts:
// bit lengths decide unless they tie, and a tie bounds |s| by bit_length(b).
inline int compare_shifted_pos(const BigInt& a, const BigInt& s, const BigInt& b) {
    BigInt left_bits = BigInt(bit_length(a)) + s;
    BigInt right_bits = BigInt(bit_length(b));
    if (left_bits != right_bits) return left_bits < right_bits ? -1 : 1;
    // Bit lengths agree, so the shift is small enough to apply exactly.
    auto shift = to_i64(s);
    BigInt lhs = a, rhs = b;
    if (*shift >= 0)
        lhs <<= static_cast<unsigned>(*shift);
    else
        rhs <<= static_cast<unsigned>(-*shift);
    if (lhs == rhs) return 0;
    return lhs < rhs ? -1 : 1;
}

}  // namespace detail

// Exact dyadic-scaled rational: frac * 2^exp2 with frac fully odd (numerator
// and denominator both odd) so the binary exponent lives in exp2 alone. exp2
// is a big integer because shift-power norms reach magnitudes like 2^(-1.5e10)
// whose exponent must stay exact while the mantissa stays tiny.
class ScaledRational {
  public:
    ScaledRational() : frac_(0), exp2_(0) {}

    static ScaledRational from_rational(const Rational& r) {
        ScaledRational v;
        v.frac_ = r;
        v.exp2_ = 0;
        v.normalize();
        return v;
    }

    static ScaledRational from_int(const BigInt& n) { return from_rational(Rational(n)); }

    static ScaledRational pow2(const BigInt& e) {
        ScaledRational v;
        v.frac_ = 1;
        v.exp2_ = e;
        return v;
    }

    const Rational& mantissa() const { return frac_; }
    const BigInt& exponent2() const { return exp2_; }

    bool is_zero() const { return frac_ == 0; }
    int sign() const { return frac_ == 0 ? 0 : (frac_ < 0 ? -1 : 1); }

    ScaledRational operator-() const {
        ScaledRational v = *this;
        v.frac_ = -v.frac_;
        return v;
    }

    ScaledRational abs() const {
        ScaledRational v = *this;
        if (v.frac_ < 0) v.frac_ = -v.frac_;
        return v;
    }

    ScaledRational operator*(const ScaledRational& o) const {
        ScaledRational v;
        v.frac_ = frac_ * o.frac_;
        v.exp2_ = exp2_ + o.exp2_;
        v.normalize();  // odd*odd can still produce an even numerator after reduction? No,
                        // but frac may become 0; keep the zero invariant tidy.
        return v;
    }

    ScaledRational operator/(const ScaledRational& o) const {
        if (o.is_zero()) throw PreconditionViolation("division by zero ScaledRational");
        ScaledRational v;
        v.frac_ = frac_ / o.frac_;
        v.exp2_ = exp2_ - o.exp2_;
        v.normalize();
        return v;
    }

    // Addition aligns binary exponents exactly. The gap guard protects against
    // astronomically separated magnitudes whose aligned mantissa would not fit
    // in memory; within one shifted vector the gaps are at most a few thousand
    // bits, far below the guard.
    ScaledRational add(const ScaledRational& o, std::int64_t max_gap_bits = (1 << 22)) const {
        if (is_zero()) return o;
        if (o.is_zero()) return *this;
        const ScaledRational& lo = (exp2_ <= o.exp2_) ? *this : o;
        const ScaledRational& hi = (exp2_ <= o.exp2_) ? o : *this;
        BigInt gap = hi.exp2_ - lo.exp2_;
        auto gap64 = to_i64(gap);
        if (!gap64 || *gap64 > max_gap_bits)
            throw PreconditionViolation("exponent gap too large for exact addition: 2^" +
                                        to_decimal(gap));
        ScaledRational v;
        v.frac_ = lo.frac_ + hi.frac_ * Rational(BigInt(1) << static_cast<unsigned>(*gap64));
        v.exp2_ = lo.exp2_;
        v.normalize();
        return v;
    }

    ScaledRational operator+(const ScaledRational& o) const { return add(o); }
    ScaledRational operator-(const ScaledRational& o) const { return add(-o); }

    ScaledRational square() const { return *this * *this; }

    // Three-way comparison by value. Exact for arbitrary exponent gaps.
    int compare(const ScaledRational& o) const {
        int sa = sign(), sb = o.sign();
        if (sa != sb) return sa < sb ? -1 : 1;
        if (sa == 0) return 0;
        // Same nonzero sign: compare |a| vs |b|, flip if negative.
        using boost::multiprecision::denominator;
        using boost::multiprecision::numerator;
        BigInt na = boost::multiprecision::abs(numerator(frac_));
        BigInt da = denominator(frac_);
        BigInt nb = boost::multiprecision::abs(numerator(o.frac_));
        BigInt db = denominator(o.frac_);
        // |a| vs |b|  <=>  na*db * 2^(ea-eb)  vs  nb*da
        int c = detail::compare_shifted_pos(na * db, exp2_ - o.exp2_, nb * da);
        return sa > 0 ? c : -c;
    }

    bool operator<(const ScaledRational& o) const { return compare(o) < 0; }
    bool operator<=(const ScaledRational& o) const { return compare(o) <= 0; }
    bool operator>(const ScaledRational& o) const { return compare(o) > 0; }
    bool operator>=(const ScaledRational& o) const { return compare(o) >= 0; }
    bool operator==(const ScaledRational& o) const { return compare(o) == 0; }
    bool operator!=(const ScaledRational& o) const { return compare(o) != 0; }

    // Compare |value| against 2^m exactly.
    int compare_abs_pow2(const BigInt& m) const {
        if (is_zero()) return -1;
        using boost::multiprecision::denominator;
        using boost::multiprecision::numerator;
        BigInt n = boost::multiprecision::abs(numerator(frac_));
        BigInt d = denominator(frac_);
        return detail::compare_shifted_pos(n, exp2_ - m, d);
    }

    // Exact square root when one exists in the dyadic rationals.
    std::optional<ScaledRational> sqrt_exact() const {
        if (sign() < 0) return std::nullopt;
        if (is_zero()) return ScaledRational();
        if (exp2_ % 2 != 0) return std::nullopt;
        using boost::multiprecision::denominator;
        using boost::multiprecision::numerator;
        BigInt n = numerator(frac_), d = denominator(frac_);
        BigInt rn = boost::multiprecision::sqrt(n);
        BigInt rd = boost::multiprecision::sqrt(d);
        if (rn * rn != n || rd * rd != d) return std::nullopt;
        ScaledRational v;
        v.frac_ = Rational(rn, rd);
        v.exp2_ = exp2_ / 2;
        return v;
    }

    double to_double() const {
        if (is_zero()) return 0.0;
        auto e = to_i64(exp2_);
        if (!e || *e > 100000 || *e < -100000)
            return exp2_ > 0 ? (sign() > 0 ? std::numeric_limits<double>::infinity()
                                           : -std::numeric_limits<double>::infinity())
                             : (sign() > 0 ? 0.0 : -0.0);
        // Keep precision by converting the mantissa first, then scaling.
        double m = static_cast<double>(frac_);
        return std::ldexp(m, static_cast<int>(*e));
    }

    // Canonical exact text: "p/q" when the exponent folds into a small
    // rational, else "p/q*2^e". Always parseable and exact.
    std::string to_exact_string() const {
        using boost::multiprecision::denominator;
        using boost::multiprecision::numerator;
        if (is_zero()) return "0";
        auto e = to_i64(exp2_);
        if (e && *e >= -512 && *e <= 512) return format_rational(folded());
        std::string s = format_rational(frac_);
        return s + "*2^" + to_decimal(exp2_);
    }

    // Finite decimal expansion when the value is decimal-exact (denominator
    // 2^a 5^b after folding) and short enough to be worth printing; nullopt
    // otherwise. Callers fall back to to_exact_string().
    std::optional<std::string> to_exact_decimal(std::size_t max_digits = 400) const {
        if (is_zero()) return std::string("0");
        auto e = to_i64(exp2_);
        if (!e || *e > static_cast<std::int64_t>(max_digits * 4) ||
            *e < -static_cast<std::int64_t>(max_digits * 4))
            return std::nullopt;
        Rational v = folded();
        using boost::multiprecision::denominator;
        using boost::multiprecision::numerator;
        BigInt num = numerator(v);
        BigInt den = denominator(v);
        bool neg = num < 0;
        if (neg) num = -num;
        // den = 2^a * 5^b required for a finite expansion.
        std::size_t a = 0, b = 0;
        BigInt d = den;
        while (d % 2 == 0) {
            d /= 2;
            ++a;
        }
        while (d % 5 == 0) {
            d /= 5;
            ++b;
        }
        if (d != 1) return std::nullopt;
        std::size_t digits = a > b ? a : b;
        if (digits > max_digits) return std::nullopt;
        // Scale to an integer over 10^digits.
        BigInt scaled = num;
        for (std::size_t i = 0; i < digits - a; ++i) scaled *= 2;
        for (std::size_t i = 0; i < digits - b; ++i) scaled *= 5;
        std::string body = scaled.str();
        std::string out = neg ? "-" : "";
        if (digits == 0) return out + body;
        if (body.size() <= digits) body.insert(0, digits + 1 - body.size(), '0');
        body.insert(body.size() - digits, ".");
        if (body.size() > max_digits + 2) return std::nullopt;
        return out + body;
    }

  private:
    Rational frac_;
    BigInt exp2_;

    // Returns frac * 2^exp2 as a plain rational. Only valid for small exp2.
    Rational folded() const {
        auto e = to_i64(exp2_);
        if (!e || *e > 4096 || *e < -4096)
            throw PreconditionViolation("exponent too large to fold into a rational");
        if (*e >= 0) return frac_ * Rational(BigInt(1) << static_cast<unsigned>(*e));
        return frac_ / Rational(BigInt(1) << static_cast<unsigned>(-*e));
    }

    void normalize() {
        using boost::multiprecision::denominator;
        using boost::multiprecision::numerator;
        if (frac_ == 0) {
            exp2_ = 0;
            return;
        }
        BigInt n = numerator(frac_), d = denominator(frac_);
        std::size_t vn = twos_valuation(n);
        std::size_t vd = twos_valuation(d);
        if (vn == 0 && vd == 0) return;
        n >>= vn;
        d >>= vd;
        exp2_ += BigInt(vn) - BigInt(vd);
        frac_ = Rational(n, d);
    }
};

}  // namespace shiftlab
