#pragma once

// Exact-arithmetic model systems on [0,1], the circle, and the binary
// sequence space:
//   tent      T(x) = 2x on [0,1/2], 2-2x on [1/2,1]
//   doubling  angle doubling on the circle (in turns)
//   shift     sigma(x0,x1,...) = (x1,x2,...) on Sigma_2
//   rotation  x -> x + theta (mod 1), theta = p/q a convergent of an
//             irrational target; every horizon query requires H < q so
//             periodicity artifacts cannot masquerade as recurrence
//
// Conventions: circle points and distances are in turns with the arc-length
// metric; intervals are closed (rational endpoints make the half-open branch
// choice at 1/2 immaterial for images); circle balls are open, so ball
// intersection tests are strict. Cylinders with an empty prefix are the full
// space and appear only as computed images, never as user input.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "shiftlab/bigmath.hpp"
#include "shiftlab/errors.hpp"
#include "shiftlab/verdict.hpp"

namespace shiftlab {

// --- Regions ----------------------------------------------------------------

struct Interval {
    Rational lo, hi;  // closed [lo, hi] within [0,1]
};

struct Arc {
    Rational center, halfwidth;  // closed arc; halfwidth 1/2 covers the circle
};

struct Cylinder {
    std::string prefix;  // '0'/'1' characters; empty means the full space
};

struct CircleBall {
    Rational center, radius;  // open arc-metric ball
};

using RegionT = std::variant<Interval, Arc, Cylinder, CircleBall>;

// --- Systems ----------------------------------------------------------------

struct TentSystem {};
struct DoublingSystem {};

struct ShiftSystem {
    std::size_t depth = 64;  // metric truncation depth D
};

struct RotationSystem {
    Rational theta;

    explicit RotationSystem(const Rational& t) : theta(t) {
        if (!(theta > 0 && theta < 1))
            throw PreconditionViolation("rotation angle must satisfy 0 < theta < 1 turn");
    }

    BigInt period() const { return boost::multiprecision::denominator(theta); }
};

using SystemT = std::variant<TentSystem, DoublingSystem, ShiftSystem, RotationSystem>;

// --- Circle arithmetic -------------------------------------------------------

inline Rational wrap_unit(const Rational& r) {
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    BigInt f = floor_div(numerator(r), denominator(r));
    return r - Rational(f);
}

inline Rational circle_distance(const Rational& a, const Rational& b) {
    Rational d = wrap_unit(a - b);
    return std::min(d, Rational(1) - d);
}

// --- Region validation --------------------------------------------------------

inline void validate_region(const RegionT& r) {
    if (const auto* iv = std::get_if<Interval>(&r)) {
        if (!(0 <= iv->lo && iv->lo < iv->hi && iv->hi <= 1))
            throw PreconditionViolation("interval must satisfy 0 <= lo < hi <= 1");
    } else if (const auto* arc = std::get_if<Arc>(&r)) {
        if (!(arc->halfwidth > 0 && arc->halfwidth <= Rational(1, 2)))
            throw PreconditionViolation("arc halfwidth must be in (0, 1/2]");
    } else if (const auto* cyl = std::get_if<Cylinder>(&r)) {
        if (cyl->prefix.empty()) throw PreconditionViolation("cylinder prefix must be nonempty");
        for (char c : cyl->prefix)
            if (c != '0' && c != '1')
                throw ParseError("cylinder prefix must be a 0/1 string");
    } else if (const auto* ball = std::get_if<CircleBall>(&r)) {
        if (!(ball->radius > 0 && ball->radius <= Rational(1, 2)))
            throw PreconditionViolation("ball radius must be in (0, 1/2]");
    }
}

namespace detail_sys {

inline bool on_circle(const RegionT& r) {
    return std::holds_alternative<Arc>(r) || std::holds_alternative<CircleBall>(r);
}

// Circle systems accept both Arc and CircleBall; images are computed on the
// (center, halfwidth) pair either way.
inline std::pair<Rational, Rational> as_arc(const RegionT& r) {
    if (const auto* arc = std::get_if<Arc>(&r)) return {arc->center, arc->halfwidth};
    if (const auto* ball = std::get_if<CircleBall>(&r)) return {ball->center, ball->radius};
    throw RegionSystemMismatch("this system acts on circle regions");
}

inline const Interval& as_interval(const RegionT& r) {
    if (const auto* iv = std::get_if<Interval>(&r)) return *iv;
    throw RegionSystemMismatch("the tent map acts on intervals in [0,1]");
}

inline const Cylinder& as_cylinder(const RegionT& r) {
    if (const auto* c = std::get_if<Cylinder>(&r)) return *c;
    throw RegionSystemMismatch("the shift acts on cylinders");
}

inline std::vector<Interval> merge_intervals(std::vector<Interval> parts) {
    std::sort(parts.begin(), parts.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> out;
    for (auto& p : parts) {
        if (!out.empty() && p.lo <= out.back().hi)
            out.back().hi = std::max(out.back().hi, p.hi);
        else
            out.push_back(p);
    }
    return out;
}

}  // namespace detail_sys

// --- Forward images -----------------------------------------------------------

// Exact forward image as a finite union of regions of the same kind.
inline std::vector<RegionT> image(const SystemT& system, const RegionT& region) {
    if (std::holds_alternative<TentSystem>(system)) {
        const Interval& iv = detail_sys::as_interval(region);
        const Rational half(1, 2);
        std::vector<Interval> parts;
        if (iv.lo < half) {
            Rational b = std::min(iv.hi, half);
            parts.push_back({2 * iv.lo, 2 * b});
        }
        if (iv.hi > half) {
            Rational a = std::max(iv.lo, half);
            parts.push_back({2 - 2 * iv.hi, 2 - 2 * a});
        }
        std::vector<RegionT> out;
        for (auto& p : detail_sys::merge_intervals(std::move(parts))) out.emplace_back(p);
        return out;
    }
    if (std::holds_alternative<DoublingSystem>(system)) {
        auto [center, halfwidth] = detail_sys::as_arc(region);
        Rational w = std::min(Rational(2 * halfwidth), Rational(1, 2));
        RegionT img = std::holds_alternative<CircleBall>(region)
                          ? RegionT(CircleBall{wrap_unit(2 * center), w})
                          : RegionT(Arc{wrap_unit(2 * center), w});
        return {img};
    }
    if (std::holds_alternative<ShiftSystem>(system)) {
        const Cylinder& c = detail_sys::as_cylinder(region);
        if (c.prefix.empty()) return {RegionT(Cylinder{""})};
        return {RegionT(Cylinder{c.prefix.substr(1)})};
    }
    const auto& rot = std::get<RotationSystem>(system);
    auto [center, halfwidth] = detail_sys::as_arc(region);
    RegionT img = std::holds_alternative<Arc>(region)
                      ? RegionT(Arc{wrap_unit(center + rot.theta), halfwidth})
                      : RegionT(CircleBall{wrap_unit(center + rot.theta), halfwidth});
    return {img};
}

inline std::vector<RegionT> image_set(const SystemT& system, const std::vector<RegionT>& set,
                                      std::size_t max_parts = 4096) {
    std::vector<RegionT> out;
    for (const auto& r : set) {
        auto img = image(system, r);
        out.insert(out.end(), img.begin(), img.end());
    }
    if (std::holds_alternative<TentSystem>(system)) {
        std::vector<Interval> parts;
        parts.reserve(out.size());
        for (auto& r : out) parts.push_back(std::get<Interval>(r));
        out.clear();
        for (auto& p : detail_sys::merge_intervals(std::move(parts))) out.emplace_back(p);
    }
    if (out.size() > max_parts)
        throw PreconditionViolation("image decomposed into too many parts to continue");
    return out;
}

inline bool is_full_space(const SystemT& system, const std::vector<RegionT>& set) {
    if (std::holds_alternative<TentSystem>(system)) {
        return set.size() == 1 && std::get<Interval>(set[0]).lo == 0 &&
               std::get<Interval>(set[0]).hi == 1;
    }
    if (std::holds_alternative<ShiftSystem>(system)) {
        for (const auto& r : set)
            if (std::get<Cylinder>(r).prefix.empty()) return true;
        return false;
    }
    for (const auto& r : set) {
        auto [c, h] = detail_sys::as_arc(r);
        if (h >= Rational(1, 2)) return true;
    }
    return false;
}

// --- Covering criterion ---------------------------------------------------------

// Minimal j <= max_j with T^j(U) equal to the whole space, by exact image
// iteration. The witness carries j; Inconclusive when max_j is exhausted.
inline Verdict covering_time(const SystemT& system, const RegionT& region, int max_j = 64) {
    if (std::holds_alternative<RotationSystem>(system))
        throw RegionSystemMismatch("rotations are isometries and never expand to a cover");
    validate_region(region);
    Verdict v;
    v.horizon = max_j;

    // Soft bound for tent intervals: smallest m with 2^m * L >= 2.
    std::optional<int> soft_bound;
    if (std::holds_alternative<TentSystem>(system)) {
        const auto& iv = std::get<Interval>(region);
        Rational len = iv.hi - iv.lo;
        int m = 0;
        Rational scaled = len;
        while (scaled < 2 && m < 8192) {
            scaled *= 2;
            ++m;
        }
        soft_bound = m;
        v.witness["soft_bound"] = m;
    }

    std::vector<RegionT> current{region};
    for (int j = 0; j <= max_j; ++j) {
        if (is_full_space(system, current)) {
            v.status = VerdictStatus::HoldsExactly;
            v.witness["j"] = j;
            if (soft_bound) v.witness["soft_bound_satisfied"] = (j <= *soft_bound);
            v.narrative = "iterated image covers the space after " + std::to_string(j) +
                          " steps";
            return v;
        }
        current = image_set(system, current);
    }
    v.status = VerdictStatus::Inconclusive;
    v.narrative = "image did not cover the space within " + std::to_string(max_j) + " steps";
    return v;
}

// --- Return sets -----------------------------------------------------------------

namespace detail_sys {

inline bool intersects(const SystemT& system, const std::vector<RegionT>& set,
                       const RegionT& V) {
    if (std::holds_alternative<TentSystem>(system)) {
        const Interval& v = as_interval(V);
        for (const auto& r : set) {
            const Interval& u = std::get<Interval>(r);
            if (std::max(u.lo, v.lo) <= std::min(u.hi, v.hi)) return true;
        }
        return false;
    }
    if (std::holds_alternative<ShiftSystem>(system)) {
        const Cylinder& v = as_cylinder(V);
        for (const auto& r : set) {
            const Cylinder& u = std::get<Cylinder>(r);
            std::size_t n = std::min(u.prefix.size(), v.prefix.size());
            if (u.prefix.compare(0, n, v.prefix, 0, n) == 0) return true;
        }
        return false;
    }
    // Circle systems: strict for open balls, closed for arcs.
    auto [vc, vh] = as_arc(V);
    bool v_open = std::holds_alternative<CircleBall>(V);
    for (const auto& r : set) {
        auto [uc, uh] = as_arc(r);
        bool open = v_open || std::holds_alternative<CircleBall>(r);
        Rational d = circle_distance(uc, vc);
        if (open ? d < uh + vh : d <= uh + vh) return true;
    }
    return false;
}

}  // namespace detail_sys

struct ReturnSet {
    std::int64_t horizon = 0;
    std::vector<std::int64_t> hits;  // sorted n with T^n(U) intersecting V

    bool contains(std::int64_t n) const {
        return std::binary_search(hits.begin(), hits.end(), n);
    }
};

inline ReturnSet return_set(const SystemT& system, const RegionT& U, const RegionT& V,
                            std::int64_t horizon) {
    if (horizon < 0) throw PreconditionViolation("horizon must be >= 0");
    validate_region(U);
    validate_region(V);
    ReturnSet out;
    out.horizon = horizon;
    if (const auto* rot = std::get_if<RotationSystem>(&system)) {
        if (BigInt(horizon) >= rot->period())
            throw HorizonExceedsPeriod("horizon must be below the rotation period " +
                                       to_decimal(rot->period()));
        auto [uc, uh] = detail_sys::as_arc(U);
        auto [vc, vh] = detail_sys::as_arc(V);
        bool open = std::holds_alternative<CircleBall>(U) ||
                    std::holds_alternative<CircleBall>(V);
        Rational pos = uc;
        for (std::int64_t n = 0; n <= horizon; ++n) {
            Rational d = circle_distance(pos, vc);
            if (open ? d < uh + vh : d <= uh + vh) out.hits.push_back(n);
            pos = wrap_unit(pos + rot->theta);
        }
        return out;
    }
    std::vector<RegionT> current{U};
    for (std::int64_t n = 0; n <= horizon; ++n) {
        if (detail_sys::intersects(system, current, V)) out.hits.push_back(n);
        current = image_set(system, current);
    }
    return out;
}

inline std::string return_set_csv(const ReturnSet& rs) {
    std::string csv = "n,hit\n";
    std::size_t at = 0;
    for (std::int64_t n = 0; n <= rs.horizon; ++n) {
        bool hit = at < rs.hits.size() && rs.hits[at] == n;
        if (hit) ++at;
        csv += std::to_string(n);
        csv += hit ? ",1\n" : ",0\n";
    }
    return csv;
}

// --- Rotation-specific verdicts ----------------------------------------------------

// U = B_{delta/4}(a) with delta = d(Ta, a): N(U,U) must not contain two
// consecutive integers. theta = 1/2 is degenerate (T^2 = identity, outside
// the hypothesis); it is flagged in the witness, not rejected.
inline Verdict no_consecutive_returns(const RotationSystem& rot, const Rational& a,
                                      std::int64_t horizon) {
    if (horizon < 0) throw PreconditionViolation("horizon must be >= 0");
    if (BigInt(horizon) >= rot.period())
        throw HorizonExceedsPeriod("horizon must be below the rotation period " +
                                   to_decimal(rot.period()));
    Rational delta = circle_distance(wrap_unit(a + rot.theta), a);
    Rational radius = delta / 4;
    RegionT U = CircleBall{wrap_unit(a), radius};
    ReturnSet rs = return_set(SystemT(rot), U, U, horizon);

    Verdict v;
    v.horizon = BigInt(horizon);
    v.witness["delta"] = format_rational(delta);
    v.witness["radius"] = format_rational(radius);
    v.witness["return_count"] = std::to_string(rs.hits.size());
    if (rot.theta == Rational(1, 2)) {
        v.witness["degenerate_theta"] = true;
        v.narrative = "theta = 1/2 gives T^2 = identity, outside the irrational hypothesis; ";
    }
    nlohmann::json sample = nlohmann::json::array();
    for (std::size_t i = 0; i < rs.hits.size() && i < 16; ++i)
        sample.push_back(rs.hits[i]);
    v.witness["returns_sample"] = sample;

    for (std::size_t i = 0; i + 1 < rs.hits.size(); ++i) {
        if (rs.hits[i] + 1 == rs.hits[i + 1]) {
            v.status = VerdictStatus::FailsWithWitness;
            v.witness["n"] = std::to_string(rs.hits[i]);
            v.narrative += "consecutive returns at n = " + std::to_string(rs.hits[i]);
            return v;
        }
    }
    v.status = VerdictStatus::HoldsUpToHorizon;
    v.narrative += "no two consecutive integers in N(U,U) up to the horizon";
    return v;
}

// For each target x: minimal j <= horizon with d(x, a + j theta) < delta.
// Also re-derives T^j(B_delta(a)) = B_delta(T^j a) by iterating the generic
// image and comparing against the directly translated ball.
inline Verdict strong_transitivity_cover(const RotationSystem& rot, const Rational& a,
                                         const Rational& delta,
                                         const std::vector<Rational>& targets,
                                         std::int64_t horizon) {
    if (!(delta > 0)) throw PreconditionViolation("delta must be positive");
    if (horizon < 0) throw PreconditionViolation("horizon must be >= 0");
    if (BigInt(horizon) >= rot.period())
        throw HorizonExceedsPeriod("horizon must be below the rotation period " +
                                   to_decimal(rot.period()));

    // Orbit positions a + j theta, j = 0..horizon.
    std::vector<Rational> orbit;
    orbit.reserve(static_cast<std::size_t>(horizon) + 1);
    Rational pos = wrap_unit(a);
    for (std::int64_t j = 0; j <= horizon; ++j) {
        orbit.push_back(pos);
        pos = wrap_unit(pos + rot.theta);
    }

    Verdict v;
    v.horizon = BigInt(horizon);
    nlohmann::json cover = nlohmann::json::array();
    std::size_t uncovered = 0;
    for (const auto& t : targets) {
        std::optional<std::int64_t> found;
        for (std::int64_t j = 0; j <= horizon; ++j) {
            if (circle_distance(t, orbit[static_cast<std::size_t>(j)]) < delta) {
                found = j;
                break;
            }
        }
        nlohmann::json row;
        row["target"] = format_rational(wrap_unit(t));
        if (found)
            row["j"] = std::to_string(*found);
        else {
            row["j"] = nullptr;
            ++uncovered;
        }
        cover.push_back(row);
    }
    v.witness["cover"] = cover;

    // Ball-image identity along the first few steps: translation is exact.
    bool identity_ok = true;
    std::vector<RegionT> ball{RegionT(CircleBall{wrap_unit(a), delta})};
    for (std::int64_t j = 1; j <= std::min<std::int64_t>(horizon, 32); ++j) {
        ball = image_set(SystemT(rot), ball);
        const auto& got = std::get<CircleBall>(ball[0]);
        if (ball.size() != 1 || got.center != orbit[static_cast<std::size_t>(j)] ||
            got.radius != delta) {
            identity_ok = false;
            break;
        }
    }
    v.witness["ball_image_identity"] = identity_ok;

    if (uncovered == 0 && identity_ok) {
        v.status = VerdictStatus::EvidenceFor;
        v.narrative = "all " + std::to_string(targets.size()) +
                      " targets are delta-covered by the orbit";
    } else {
        v.status = VerdictStatus::Inconclusive;
        v.narrative = std::to_string(uncovered) + " of " + std::to_string(targets.size()) +
                      " targets not covered within the horizon";
    }
    return v;
}

// Separation Fact: U = B_rho(x) with rho = min(delta, eps/2), eps = d(x, Tx),
// delta from the declared modulus of continuity. All bundled invertible
// systems share the conservative uniform modulus delta(eps') = eps'/2 (sharp
// for Lipschitz-2 maps; deliberately loose for the isometric rotation), so
// rho = eps/4. Verifies T^n(U) and T^{n+1}(U) disjoint for every n <= horizon.
inline std::pair<RegionT, Verdict> separation_region(const SystemT& system, const Rational& x,
                                                     std::int64_t horizon) {
    const auto* rot = std::get_if<RotationSystem>(&system);
    if (!rot)
        throw NonInjectiveSystem(
            "separation needs an injective system; tent, doubling, and shift are 2-to-1");
    if (horizon < 0) throw PreconditionViolation("horizon must be >= 0");
    if (BigInt(horizon) >= rot->period())
        throw HorizonExceedsPeriod("horizon must be below the rotation period " +
                                   to_decimal(rot->period()));

    Rational tx = wrap_unit(x + rot->theta);
    Rational eps = circle_distance(x, tx);
    if (eps == 0) throw FixedPointInput("x is a fixed point of the rotation");
    Rational delta = (eps / 2) / 2;  // modulus delta(eps') = eps'/2 at eps' = eps/2
    Rational rho = std::min(delta, Rational(eps / 2));
    CircleBall U{wrap_unit(x), rho};

    Verdict v;
    v.horizon = BigInt(horizon);
    v.witness["epsilon"] = format_rational(eps);
    v.witness["rho"] = format_rational(rho);
    Rational c_n = U.center;
    for (std::int64_t n = 0; n <= horizon; ++n) {
        Rational c_next = wrap_unit(c_n + rot->theta);
        Rational d = circle_distance(c_n, c_next);
        if (d < rho + rho) {
            v.status = VerdictStatus::FailsWithWitness;
            v.witness["n"] = std::to_string(n);
            v.narrative = "T^n(U) and T^{n+1}(U) overlap at n = " + std::to_string(n);
            return {RegionT(U), v};
        }
        c_n = c_next;
    }
    v.status = VerdictStatus::HoldsUpToHorizon;
    v.witness["checked"] = std::to_string(horizon + 1);
    v.narrative = "U and all its iterates stay disjoint from their successors";
    return {RegionT(U), v};
}

// --- Symbol-space metric -------------------------------------------------------

struct SymbolDistance {
    Rational value;  // exact truncated sum over n = 0..D
    Rational tail;   // certified bound on the omitted tail: [0, 2^{-D}]

    Rational upper() const { return value + tail; }
};

inline SymbolDistance symbol_metric(const ShiftSystem& space, const std::string& x,
                                    const std::string& y) {
    if (x.size() <= space.depth || y.size() <= space.depth)
        throw LengthMismatch("both sequences must carry more than D = " +
                             std::to_string(space.depth) + " symbols");
    for (const std::string* s : {&x, &y})
        for (char c : *s)
            if (c != '0' && c != '1') throw ParseError("sequences must be 0/1 strings");
    Rational value = 0;
    BigInt pow = 1;  // 2^n
    for (std::size_t n = 0; n <= space.depth; ++n) {
        if (x[n] != y[n]) value += Rational(1, pow);
        pow <<= 1;
    }
    return {value, Rational(1, BigInt(1) << space.depth)};
}

// --- JSON formats ----------------------------------------------------------------
// System descriptor: {"system": "tent|doubling|shift|rotation",
//                     "theta": "p/q" (rotation), "depth": D (shift)}.
// Region: {"type": "interval", "lo": "3/10", "hi": "2/5"}
//       | {"type": "arc", "center": "p/q", "halfwidth": "p/q"}
//       | {"type": "cylinder", "prefix": "01"}
//       | {"type": "ball", "center": "p/q", "radius": "p/q"}

inline SystemT system_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("system"))
        throw ParseError("system descriptor must carry a \"system\" field");
    std::string kind = j.at("system").get<std::string>();
    if (kind == "tent") return TentSystem{};
    if (kind == "doubling") return DoublingSystem{};
    if (kind == "shift") {
        ShiftSystem s;
        if (j.contains("depth")) s.depth = j.at("depth").get<std::size_t>();
        return s;
    }
    if (kind == "rotation") {
        if (!j.contains("theta")) throw ParseError("rotation descriptor needs \"theta\"");
        return RotationSystem(parse_rational(j.at("theta").get<std::string>()));
    }
    throw ParseError("unknown system: '" + kind + "'");
}

inline RegionT region_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("type"))
        throw ParseError("region must carry a \"type\" field");
    std::string type = j.at("type").get<std::string>();
    auto rat = [&](const char* key) {
        if (!j.contains(key))
            throw ParseError(std::string("region is missing \"") + key + "\"");
        return parse_rational(j.at(key).get<std::string>());
    };
    RegionT r;
    if (type == "interval")
        r = Interval{rat("lo"), rat("hi")};
    else if (type == "arc")
        r = Arc{rat("center"), rat("halfwidth")};
    else if (type == "cylinder")
        r = Cylinder{j.value("prefix", std::string())};
    else if (type == "ball")
        r = CircleBall{rat("center"), rat("radius")};
    else
        throw ParseError("unknown region type: '" + type + "'");
    validate_region(r);
    return r;
}

inline nlohmann::json region_to_json(const RegionT& r) {
    nlohmann::json j;
    if (const auto* iv = std::get_if<Interval>(&r)) {
        j["type"] = "interval";
        j["lo"] = format_rational(iv->lo);
        j["hi"] = format_rational(iv->hi);
    } else if (const auto* arc = std::get_if<Arc>(&r)) {
        j["type"] = "arc";
        j["center"] = format_rational(arc->center);
        j["halfwidth"] = format_rational(arc->halfwidth);
    } else if (const auto* cyl = std::get_if<Cylinder>(&r)) {
        j["type"] = "cylinder";
        j["prefix"] = cyl->prefix;
    } else {
        const auto& ball = std::get<CircleBall>(r);
        j["type"] = "ball";
        j["center"] = format_rational(ball.center);
        j["radius"] = format_rational(ball.radius);
    }
    return j;
}

}  // namespace shiftlab
