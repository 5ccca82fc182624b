#pragma once

// Finite-horizon semi-decision procedures for the product criteria:
//   transitive:  sup_n M_1^n = infinity
//   mixing:      lim_n M_1^n = infinity
//   hypermixing: sup_n M_1^n = infinity  and  inf over windows M_n^k > 0
// plus a norm-decay search backing strong-transitivity evidence.
//
// Asymptotic conditions are undecidable from finite data; every rule here is
// a declared heuristic over the materialized horizon, and the verdicts say
// Evidence*, never more. Witnesses are exact facts and stay valid at any
// larger horizon even where the evidence grade flips.
//
// Throughout, E(n) denotes the exponent of M_1^n = w_1 ... w_n, i.e.
// P(n+1) - P(1) in prefix-sum terms (index 0 is inert in all products).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "shiftlab/bigmath.hpp"
#include "shiftlab/errors.hpp"
#include "shiftlab/rle.hpp"
#include "shiftlab/scaled.hpp"
#include "shiftlab/shifts.hpp"
#include "shiftlab/verdict.hpp"
#include "shiftlab/weights.hpp"

namespace shiftlab {

struct ClassifierPolicy {
    std::size_t max_witnesses = 64;
    // Norm scans walk n = 1..horizon one step at a time; cap the walk so a
    // huge horizon degrades to a partial (reported) scan instead of hanging.
    BigInt strong_scan_cap = BigInt(1) << 20;
};

namespace detail {

inline void require_horizon(const RunLengthWeights& w, const BigInt& horizon) {
    if (horizon < 1) throw PreconditionViolation("horizon must be >= 1");
    if (horizon + 1 > w.total_length())
        throw InsufficientDepth("horizon " + to_decimal(horizon) +
                                " needs materialized length > horizon, have " +
                                to_decimal(w.total_length()));
}

// max over 1 <= n <= T of E(n).
inline BigInt running_max_exponent(const RunLengthWeights& w, const BigInt& T) {
    return w.window_stats(1, T + 1).max_prefix;
}

// min over L <= n <= T of E(n).
inline BigInt late_min_exponent(const RunLengthWeights& w, const BigInt& L, const BigInt& T) {
    BigInt at_L = w.prefix_exponent(L + 1) - w.prefix_exponent(1);
    if (L == T) return at_L;
    BigInt rel = w.window_stats(L + 1, T + 1).min_prefix;
    return std::min(at_L, BigInt(at_L + rel));
}

struct RecordTable {
    // Record event: positions n in [n_first, n_last] all set new maxima of
    // E, ending at value exponent.
    struct Event {
        BigInt n_first, n_last;
        BigInt exponent;
    };
    std::vector<Event> events;
    bool truncated = false;
};

inline RecordTable exponent_records(const RunLengthWeights& w, const BigInt& horizon,
                                    std::size_t max_events) {
    auto scan = rle::collect_records(w.root(), 2, horizon + 1, max_events);
    BigInt p1 = w.exponent_at(0);
    RecordTable table;
    table.truncated = scan.truncated;
    table.events.reserve(scan.events.size());
    for (const auto& ev : scan.events)
        table.events.push_back({ev.p_first - 1, ev.p_last - 1, ev.value - p1});
    return table;
}

// Longest doubling chain through the record values: greedy count of steps
// v -> v' with v >= 1 and v' >= 2v.
inline int doubling_steps(const RecordTable& table) {
    int steps = 0;
    std::optional<BigInt> cur;
    for (const auto& ev : table.events) {
        if (!cur) {
            if (ev.exponent >= 1) cur = ev.exponent;
            continue;
        }
        if (ev.exponent >= 2 * *cur) {
            ++steps;
            cur = ev.exponent;
        }
    }
    return steps;
}

inline nlohmann::json record_events_json(const RecordTable& table) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& ev : table.events) {
        arr.push_back({{"n_first", to_decimal(ev.n_first)},
                       {"n_last", to_decimal(ev.n_last)},
                       {"exponent", to_decimal(ev.exponent)}});
    }
    return arr;
}

}  // namespace detail

inline Verdict check_transitive(const RunLengthWeights& w, const BigInt& horizon,
                                const ClassifierPolicy& policy = {}) {
    detail::require_horizon(w, horizon);
    Verdict v;
    v.horizon = horizon;

    auto table = detail::exponent_records(w, horizon, policy.max_witnesses);
    int steps = detail::doubling_steps(table);
    BigInt r_full = detail::running_max_exponent(w, horizon);

    bool scales_ok = false;
    BigInt r_half = r_full, r_quarter = r_full;
    if (horizon >= 4) {
        r_half = detail::running_max_exponent(w, horizon / 2);
        r_quarter = detail::running_max_exponent(w, horizon / 4);
        scales_ok = r_quarter > 0 && r_half >= 2 * r_quarter && r_full >= 2 * r_half;
    }

    v.witness["records"] = detail::record_events_json(table);
    v.witness["records_truncated"] = table.truncated;
    v.witness["max_exponent"] = to_decimal(r_full);
    v.witness["doubling_steps"] = steps;
    v.witness["max_at_half"] = to_decimal(r_half);
    v.witness["max_at_quarter"] = to_decimal(r_quarter);

    if (steps >= 3 || scales_ok) {
        v.status = VerdictStatus::EvidenceFor;
        v.narrative = "running max of M_1^n doubled at " +
                      std::to_string(std::max(steps, 3)) +
                      "+ scales (exponent reaches " + to_decimal(r_full) + ")";
    } else if (r_full <= 0) {
        v.status = VerdictStatus::EvidenceAgainst;
        v.narrative = "M_1^n never exceeds 1 up to the horizon";
    } else if (horizon >= 4 && r_full == r_half) {
        v.status = VerdictStatus::EvidenceAgainst;
        v.narrative = "running max stagnant at 2^" + to_decimal(r_full) +
                      " across the upper half of the horizon";
    } else {
        v.status = VerdictStatus::Inconclusive;
        v.narrative = "growth present but below the doubling-at-3-scales bar";
    }
    return v;
}

inline Verdict check_mixing(const RunLengthWeights& w, const BigInt& horizon,
                            const ClassifierPolicy& policy = {}) {
    detail::require_horizon(w, horizon);
    Verdict v;
    v.horizon = horizon;

    // Witnesses of non-divergence: n with M_1^n <= 1, i.e. P(n+1) <= P(1).
    BigInt p1 = w.exponent_at(0);
    auto scan = rle::collect_prefix_le(w.root(), p1, 2, horizon + 1, policy.max_witnesses);

    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : scan.first_positions) {
        BigInt n = p - 1;
        BigInt e = w.prefix_exponent(n + 1) - p1;
        arr.push_back({{"n", to_decimal(n)}, {"exponent", to_decimal(e)}});
    }
    v.witness["witnesses"] = arr;
    v.witness["witness_count"] = to_decimal(scan.count);
    v.witness["count_exact"] = scan.exact;
    if (scan.last_position)
        v.witness["last_witness"] = to_decimal(*scan.last_position - 1);

    if (scan.count > 0) {
        BigInt last_n = *scan.last_position - 1;
        if (2 * last_n >= horizon) {
            v.status = VerdictStatus::EvidenceAgainst;
            v.narrative = "M_1^n <= 1 still happens at n = " + to_decimal(last_n) +
                          ", in the upper half of the horizon";
            return v;
        }
        BigInt late_from = std::max(BigInt(last_n + 1), BigInt(horizon / 2));
        BigInt late_min = detail::late_min_exponent(w, late_from, horizon);
        v.witness["late_min_exponent"] = to_decimal(late_min);
        if (late_min >= 1) {
            v.status = VerdictStatus::EvidenceFor;
            v.narrative = "all returns to 1 are early; M_1^n >= 2 from n = " +
                          to_decimal(late_from) + " on";
        } else {
            v.status = VerdictStatus::Inconclusive;
            v.narrative = "products dip near 1 late in the horizon without returning to it";
        }
        return v;
    }

    BigInt late_from = std::max(BigInt(1), BigInt(horizon / 2));
    BigInt late_min = detail::late_min_exponent(w, late_from, horizon);
    v.witness["late_min_exponent"] = to_decimal(late_min);
    if (late_min >= 1) {
        v.status = VerdictStatus::EvidenceFor;
        v.narrative = "M_1^n stays >= 2 across the upper half of the horizon";
    } else {
        v.status = VerdictStatus::Inconclusive;
        v.narrative = "no returns to 1, but late products hover at 1";
    }
    return v;
}

inline Verdict check_hypermixing_condition(const RunLengthWeights& w, const BigInt& horizon,
                                           const ClassifierPolicy& policy = {}) {
    detail::require_horizon(w, horizon);
    Verdict v;
    v.horizon = horizon;

    // inf over windows M_n^j (n >= 1, n+j-1 <= horizon) as a min-subarray of
    // exponents over indices [1, horizon].
    rle::WindowStats st = w.window_stats(1, horizon + 1);
    BigInt m = st.min_sub;
    BigInt win_start = 1 + st.min_sub_start;
    BigInt win_len = st.min_sub_len;
    v.witness["min_window"] = {{"n", to_decimal(win_start)},
                               {"length", to_decimal(win_len)},
                               {"exponent", to_decimal(m)}};

    Verdict trans = check_transitive(w, horizon, policy);
    v.witness["transitive_status"] = verdict_status_name(trans.status);
    if (trans.status != VerdictStatus::EvidenceFor) {
        v.status = VerdictStatus::EvidenceAgainst;
        v.narrative = "first conjunct lacks evidence: sup M_1^n shows no unbounded growth";
        return v;
    }

    BigInt single_min = rle::min_entry_in_range(w.root().get(), 1, horizon + 1);
    v.witness["single_entry_floor"] = to_decimal(single_min);
    if (m == single_min) {
        v.status = VerdictStatus::EvidenceFor;
        v.narrative = "no window undercuts the single-entry floor 2^" + to_decimal(m) +
                      "; window infimum shows no compounding decay";
        return v;
    }

    // Compounding windows exist. Decide "inf -> 0" by recurrence: does a
    // window at half the record depth appear again after the first one ends?
    // A genuine positive infimum yields one deepest dip that never recurs;
    // decaying constructions redevelop half-depth windows indefinitely.
    BigInt thr = floor_div(m, 2);
    BigInt lo = 1, hi = horizon;  // first end position q with min_sub([1,q]) <= thr
    while (lo < hi) {
        BigInt mid = (lo + hi) / 2;
        if (w.window_stats(1, mid + 1).min_sub <= thr)
            hi = mid;
        else
            lo = mid + 1;
    }
    BigInt q = lo;
    std::optional<BigInt> recurrence;
    if (q < horizon) {
        BigInt after = w.window_stats(q + 1, horizon + 1).min_sub;
        if (after <= thr) recurrence = after;
    }
    v.witness["half_depth"] = to_decimal(thr);
    v.witness["first_half_depth_end"] = to_decimal(q);
    if (recurrence) {
        v.witness["recurrence_exponent"] = to_decimal(*recurrence);
        v.status = VerdictStatus::EvidenceAgainst;
        v.narrative = "windows of depth 2^" + to_decimal(thr) +
                      " recur after the first one ends (inf -> 0)";
    } else {
        v.status = VerdictStatus::EvidenceFor;
        v.narrative = "one-off dip to 2^" + to_decimal(m) +
                      " with no half-depth recurrence; window infimum looks positive";
    }
    return v;
}

inline Verdict strong_transitivity_evidence(const RunLengthWeights& w, const SparseVector& x,
                                            const BigInt& horizon,
                                            const ScaledRational& tol = ScaledRational::pow2(-20),
                                            const SpaceNorm& space = SpaceNorm::sup(),
                                            const ClassifierPolicy& policy = {}) {
    if (x.is_zero()) throw ZeroVector("strong transitivity evidence needs x != 0");
    if (horizon < 1) throw PreconditionViolation("horizon must be >= 1");
    if (tol.sign() <= 0) throw PreconditionViolation("tolerance must be positive");
    if (is_surjective_shift(w).status == VerdictStatus::EvidenceAgainst)
        throw PreconditionViolation("surjectivity evidence is negative for these weights");

    BigInt scan_to = std::min(horizon, policy.strong_scan_cap);
    if (x.max_support() + scan_to >= w.total_length())
        throw InsufficientDepth("horizon pushes the support past the materialized weights");

    NormValue base = norm(x, space);
    if (!base.exact)
        throw PreconditionViolation("norm of x is not exactly representable in this space");

    // Per-entry exponent accumulators A_i(n) with streaming weight lookups:
    // coefficient of S^n x at i+n is x_i * 2^{-A_i(n)},
    // A_i(n) = P(i+1+n) - P(i+1).
    struct Lane {
        ScaledRational coeff_abs;
        BigInt acc = 0;
        rle::RunCursor cur;
        BigInt seg_exp = 0;
        BigInt seg_rem = 0;
    };
    std::vector<Lane> lanes;
    lanes.reserve(x.support_size());
    for (const auto& [i, c] : x.entries())
        lanes.push_back({c.abs(), 0, w.cursor(i + 1), 0, 0});

    auto step = [&](Lane& lane) {
        if (lane.seg_rem == 0) {
            auto seg = lane.cur.next(scan_to);
            lane.seg_exp = seg->exponent;
            lane.seg_rem = seg->length;
        }
        lane.acc += lane.seg_exp;
        --lane.seg_rem;
    };
    auto shifted_norm = [&]() {
        std::vector<SparseVector::Entry> entries;
        entries.reserve(lanes.size());
        BigInt idx = 0;
        for (const auto& lane : lanes)
            entries.emplace_back(idx++, lane.coeff_abs * ScaledRational::pow2(-lane.acc));
        return norm(SparseVector::from_entries(std::move(entries)), space);
    };

    struct Event {
        BigInt n;
        ScaledRational value;
    };
    std::vector<Event> events;
    ScaledRational prev_ref = base.exact_value;
    std::optional<Event> candidate;
    ScaledRational half = ScaledRational::pow2(-1);

    ScaledRational v_n;
    for (BigInt n = 1; n <= scan_to; ++n) {
        for (auto& lane : lanes) step(lane);
        NormValue nv = shifted_norm();
        if (!nv.exact)
            throw PreconditionViolation("norm not exactly representable during the scan");
        ScaledRational value = nv.exact_value;
        bool rebound_pending = n > 1 && candidate && value.compare(v_n) > 0;
        if (rebound_pending) {
            events.push_back(*candidate);
            prev_ref = candidate->value;
            candidate.reset();
        }
        ScaledRational gate = prev_ref * half;
        if (value.compare(gate) < 0 && (!candidate || value.compare(candidate->value) < 0))
            candidate = Event{n, value};
        v_n = value;
    }
    if (candidate) events.push_back(*candidate);  // end of scan counts as a rebound

    Verdict v;
    v.horizon = scan_to;
    nlohmann::json times = nlohmann::json::array();
    for (const auto& ev : events)
        times.push_back({{"n", to_decimal(ev.n)}, {"norm", ev.value.to_exact_string()}});
    v.witness["times"] = times;
    v.witness["norm_kind"] = space.name();
    v.witness["base_norm"] = base.exact_value.to_exact_string();
    if (scan_to < horizon) v.witness["scan_capped_at"] = to_decimal(scan_to);

    ScaledRational target = tol * base.exact_value;
    if (!events.empty() && events.back().value.compare(target) <= 0) {
        v.status = VerdictStatus::EvidenceFor;
        v.narrative = "found " + std::to_string(events.size()) +
                      " strictly halving norm minima, the last below tol*||x||";
    } else {
        v.status = VerdictStatus::Inconclusive;
        v.narrative = events.empty()
                          ? "no halving norm minima up to the scanned horizon"
                          : "norm minima found but none reaches tol*||x||";
    }
    return v;
}

// --- General (non-dyadic) weights: float mode ------------------------------

namespace detail {

inline void require_horizon_general(const GeneralWeights& g, std::size_t horizon) {
    if (horizon < 1) throw PreconditionViolation("horizon must be >= 1");
    if (horizon + 1 > g.declared_horizon())
        throw InsufficientDepth("horizon " + std::to_string(horizon) +
                                " beyond declared weights (" +
                                std::to_string(g.declared_horizon()) + ")");
}

}  // namespace detail

inline Verdict check_transitive(const GeneralWeights& g, std::size_t horizon) {
    detail::require_horizon_general(g, horizon);
    Verdict v;
    v.horizon = BigInt(horizon);

    double r_full = -std::numeric_limits<double>::infinity();
    double r_half = r_full, r_quarter = r_full;
    int steps = 0;
    double cur = 0;
    bool have_cur = false;
    nlohmann::json records = nlohmann::json::array();
    double running = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n <= horizon; ++n) {
        double e = g.log2_partial(1, n);
        if (e > running) {
            running = e;
            if (records.size() < 64)
                records.push_back({{"n", std::to_string(n)}, {"exponent", e}});
            if (!have_cur) {
                if (e >= 1.0) {
                    cur = e;
                    have_cur = true;
                }
            } else if (e >= 2.0 * cur) {
                ++steps;
                cur = e;
            }
        }
        if (n == horizon / 4) r_quarter = running;
        if (n == horizon / 2) r_half = running;
        if (n == horizon) r_full = running;
    }
    double slack = g.err_bound(1, horizon) + 1e-12;
    bool scales_ok = horizon >= 4 && r_quarter > slack && r_half >= 2.0 * r_quarter - slack &&
                     r_full >= 2.0 * r_half - slack;

    v.witness["records"] = records;
    v.witness["max_exponent"] = r_full;
    v.witness["doubling_steps"] = steps;
    if (steps >= 3 || scales_ok) {
        v.status = VerdictStatus::EvidenceFor;
        v.narrative = "running max of M_1^n doubled at 3+ scales (float mode)";
    } else if (r_full <= slack) {
        v.status = VerdictStatus::EvidenceAgainst;
        v.narrative = "M_1^n never exceeds 1 (within float error) up to the horizon";
    } else if (horizon >= 4 && r_full <= r_half + slack) {
        v.status = VerdictStatus::EvidenceAgainst;
        v.narrative = "running max stagnant across the upper half of the horizon";
    } else {
        v.status = VerdictStatus::Inconclusive;
        v.narrative = "growth present but below the doubling-at-3-scales bar";
    }
    return v;
}

inline Verdict check_mixing(const GeneralWeights& g, std::size_t horizon) {
    detail::require_horizon_general(g, horizon);
    Verdict v;
    v.horizon = BigInt(horizon);

    nlohmann::json arr = nlohmann::json::array();
    std::size_t count = 0;
    std::size_t last_n = 0;
    for (std::size_t n = 1; n <= horizon; ++n) {
        double e = g.log2_partial(1, n);
        if (e <= g.err_bound(1, n) + 1e-12) {
            ++count;
            last_n = n;
            if (arr.size() < 64) arr.push_back({{"n", std::to_string(n)}, {"exponent", e}});
        }
    }
    v.witness["witnesses"] = arr;
    v.witness["witness_count"] = std::to_string(count);

    auto late_min = [&](std::size_t from) {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t n = from; n <= horizon; ++n)
            m = std::min(m, g.log2_partial(1, n));
        return m;
    };
    if (count > 0) {
        v.witness["last_witness"] = std::to_string(last_n);
        if (2 * last_n >= horizon) {
            v.status = VerdictStatus::EvidenceAgainst;
            v.narrative = "M_1^n <= 1 still happens in the upper half of the horizon";
            return v;
        }
        double m = late_min(std::max(last_n + 1, horizon / 2));
        v.witness["late_min_exponent"] = m;
        v.status = m >= 1.0 ? VerdictStatus::EvidenceFor : VerdictStatus::Inconclusive;
        v.narrative = m >= 1.0 ? "all returns to 1 are early; late products stay >= 2"
                               : "products dip near 1 late in the horizon";
        return v;
    }
    double m = late_min(std::max<std::size_t>(1, horizon / 2));
    v.witness["late_min_exponent"] = m;
    v.status = m >= 1.0 ? VerdictStatus::EvidenceFor : VerdictStatus::Inconclusive;
    v.narrative = m >= 1.0 ? "M_1^n stays >= 2 across the upper half of the horizon"
                           : "no returns to 1, but late products hover at 1";
    return v;
}

inline Verdict check_hypermixing_condition(const GeneralWeights& g, std::size_t horizon) {
    detail::require_horizon_general(g, horizon);
    Verdict v;
    v.horizon = BigInt(horizon);

    // Kadane over log2 weights w_1..w_horizon for the minimum window.
    auto min_window = [&](std::size_t from, std::size_t to, std::size_t* out_start,
                          std::size_t* out_len) {
        double best = std::numeric_limits<double>::infinity();
        double cur = 0;
        std::size_t cur_start = from, best_start = from, best_end = from;
        for (std::size_t n = from; n <= to; ++n) {
            double e = g.log2_partial(n, 1);
            if (cur > 0) {
                cur = e;
                cur_start = n;
            } else {
                cur += e;
            }
            if (cur < best) {
                best = cur;
                best_start = cur_start;
                best_end = n;
            }
        }
        if (out_start) *out_start = best_start;
        if (out_len) *out_len = best_end - best_start + 1;
        return best;
    };

    std::size_t w_start = 0, w_len = 0;
    double m = min_window(1, horizon, &w_start, &w_len);
    v.witness["min_window"] = {{"n", std::to_string(w_start)},
                               {"length", std::to_string(w_len)},
                               {"exponent", m}};

    Verdict trans = check_transitive(g, horizon);
    v.witness["transitive_status"] = verdict_status_name(trans.status);
    if (trans.status != VerdictStatus::EvidenceFor) {
        v.status = VerdictStatus::EvidenceAgainst;
        v.narrative = "first conjunct lacks evidence: sup M_1^n shows no unbounded growth";
        return v;
    }

    double single_min = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n <= horizon; ++n)
        single_min = std::min(single_min, g.log2_partial(n, 1));
    v.witness["single_entry_floor"] = single_min;
    double slack = g.err_bound(1, horizon) + 1e-12;
    if (m >= single_min - slack) {
        v.status = VerdictStatus::EvidenceFor;
        v.narrative = "no window undercuts the single-entry floor; no compounding decay";
        return v;
    }

    double thr = m / 2.0;
    std::size_t q = horizon;
    {
        double cur = 0, best = std::numeric_limits<double>::infinity();
        for (std::size_t n = 1; n <= horizon; ++n) {
            double e = g.log2_partial(n, 1);
            cur = (cur > 0 ? e : cur + e);
            best = std::min(best, cur);
            if (best <= thr) {
                q = n;
                break;
            }
        }
    }
    std::optional<double> recurrence;
    if (q < horizon) {
        double after = min_window(q + 1, horizon, nullptr, nullptr);
        if (after <= thr) recurrence = after;
    }
    if (recurrence) {
        v.witness["recurrence_exponent"] = *recurrence;
        v.status = VerdictStatus::EvidenceAgainst;
        v.narrative = "half-depth windows recur after the first one ends (inf -> 0)";
    } else {
        v.status = VerdictStatus::EvidenceFor;
        v.narrative = "one-off dip with no half-depth recurrence; infimum looks positive";
    }
    return v;
}

inline Verdict strong_transitivity_evidence(const GeneralWeights& g, const SparseVector& x,
                                            std::size_t horizon, double tol = 1e-6) {
    if (x.is_zero()) throw ZeroVector("strong transitivity evidence needs x != 0");
    if (horizon < 1) throw PreconditionViolation("horizon must be >= 1");
    if (!(tol > 0)) throw PreconditionViolation("tolerance must be positive");
    if (is_surjective_shift(g).status == VerdictStatus::EvidenceAgainst)
        throw PreconditionViolation("surjectivity evidence is negative for these weights");

    auto support_max = to_i64(x.max_support());
    if (!support_max || static_cast<std::size_t>(*support_max) + horizon + 1 >
                            g.declared_horizon())
        throw InsufficientDepth("horizon pushes the support past the declared weights");

    // sup-norm in log2 domain.
    std::vector<std::pair<std::size_t, double>> lanes;
    for (const auto& [i, c] : x.entries())
        lanes.emplace_back(static_cast<std::size_t>(*to_i64(i)), detail::log2_abs(c));
    auto norm_log2 = [&](std::size_t n) {
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& [i, l] : lanes) m = std::max(m, l - g.log2_partial(i + 1, n));
        return m;
    };
    double base = norm_log2(0);

    struct Event {
        std::size_t n;
        double value;
    };
    std::vector<Event> events;
    double prev_ref = base;
    std::optional<Event> candidate;
    double v_prev = base;
    for (std::size_t n = 1; n <= horizon; ++n) {
        double value = norm_log2(n);
        if (n > 1 && candidate && value > v_prev) {
            events.push_back(*candidate);
            prev_ref = candidate->value;
            candidate.reset();
        }
        if (value < prev_ref - 1.0 && (!candidate || value < candidate->value))
            candidate = Event{n, value};
        v_prev = value;
    }
    if (candidate) events.push_back(*candidate);

    Verdict v;
    v.horizon = BigInt(horizon);
    nlohmann::json times = nlohmann::json::array();
    for (const auto& ev : events)
        times.push_back({{"n", std::to_string(ev.n)}, {"log2_norm", ev.value}});
    v.witness["times"] = times;
    v.witness["norm_kind"] = "sup";
    v.witness["base_log2_norm"] = base;

    if (!events.empty() && events.back().value <= base + std::log2(tol)) {
        v.status = VerdictStatus::EvidenceFor;
        v.narrative = "found strictly halving norm minima, the last below tol*||x||";
    } else {
        v.status = VerdictStatus::Inconclusive;
        v.narrative = events.empty() ? "no halving norm minima up to the horizon"
                                     : "norm minima found but none reaches tol*||x||";
    }
    return v;
}

inline nlohmann::json classifier_report_json(const std::string& criterion, const Verdict& v) {
    nlohmann::json j;
    j["criterion"] = criterion;
    j["status"] = verdict_status_name(v.status);
    j["horizon"] = to_decimal(v.horizon);
    j["witness"] = v.witness;
    j["narrative"] = v.narrative;
    return j;
}

}  // namespace shiftlab
