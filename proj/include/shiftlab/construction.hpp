#pragma once

// The recursive block weight sequence and its verifiers.
//
// Blocks (values; exponents in braces):
//   b1 = 1/2 {-1}      b2 = 2 {+1}      b3 = 1/2 {-1}
//   even n >= 4: b_n = 2^(s_{n-1}), a single run of +1 exponents
//   odd  n >= 5: b_n = 1/2, then (s_{n-2} - 1) repetitions of
//                [1 x s_{n-1}, 1/2]
// with s_n = sum_{i=2}^n |b_i|. Odd blocks are kept as O(1) repeat
// descriptors; expanding them is impossible past depth 12.
//
// Global indexing: w_0 = b1; block b_m (m >= 2) occupies indices
// [1 + s_{m-1}, s_m] with s_1 = 0. Total length at depth N is 1 + s_N.

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "shiftlab/bigmath.hpp"
#include "shiftlab/errors.hpp"
#include "shiftlab/rle.hpp"
#include "shiftlab/verdict.hpp"
#include "shiftlab/weights.hpp"

namespace shiftlab {

struct BlockSpec {
    enum class Kind { Seed, Even, Odd };
    int n = 0;
    Kind kind = Kind::Seed;
    BigInt length;
    rle::NodePtr pattern;
};

inline const char* block_kind_name(BlockSpec::Kind k) {
    switch (k) {
        case BlockSpec::Kind::Seed: return "seed";
        case BlockSpec::Kind::Even: return "even";
        case BlockSpec::Kind::Odd: return "odd";
    }
    return "?";
}

struct BuildBudget {
    std::size_t memory_mb = 512;
    int max_depth = 512;
};

struct ConstructionState {
    int depth = 0;
    std::vector<BlockSpec> blocks;  // blocks[m-1] = b_m
    std::vector<BigInt> s_table;    // s_table[n] = s_n for 2 <= n <= depth; [0],[1] = 0
    RunLengthWeights concatenated;

    const BigInt& s(int n) const {
        if (n < 2 || n > depth)
            throw InsufficientDepth("s_" + std::to_string(n) + " needs depth >= " +
                                    std::to_string(n) + ", have " + std::to_string(depth));
        return s_table[static_cast<std::size_t>(n)];
    }

    // First global index of block b_m.
    BigInt block_start(int m) const {
        if (m < 1 || m > depth) throw InsufficientDepth("no block " + std::to_string(m));
        if (m == 1) return 0;
        return 1 + (m == 2 ? BigInt(0) : s(m - 1));
    }

    // Last global index of block b_m (inclusive).
    BigInt block_end(int m) const {
        if (m < 1 || m > depth) throw InsufficientDepth("no block " + std::to_string(m));
        if (m == 1) return 0;
        return s(m);
    }
};

inline ConstructionState build_construction(int depth, const BuildBudget& budget = {}) {
    if (depth < 3) throw PreconditionViolation("construction depth must be >= 3");
    if (depth > budget.max_depth)
        throw DepthTooLarge("depth " + std::to_string(depth) + " over hard cap " +
                            std::to_string(budget.max_depth));

    ConstructionState st;
    st.depth = depth;
    st.s_table.assign(static_cast<std::size_t>(depth) + 1, BigInt(0));

    auto push = [&](int n, BlockSpec::Kind kind, rle::NodePtr pattern) {
        BlockSpec b;
        b.n = n;
        b.kind = kind;
        b.length = pattern->stats.len;
        b.pattern = std::move(pattern);
        st.blocks.push_back(std::move(b));
        if (n >= 2)
            st.s_table[static_cast<std::size_t>(n)] =
                st.s_table[static_cast<std::size_t>(n - 1)] + st.blocks.back().length;
    };

    push(1, BlockSpec::Kind::Seed, rle::make_run(-1, 1));
    push(2, BlockSpec::Kind::Seed, rle::make_run(1, 1));
    push(3, BlockSpec::Kind::Seed, rle::make_run(-1, 1));

    for (int n = 4; n <= depth; ++n) {
        const BigInt& s1 = st.s_table[static_cast<std::size_t>(n - 1)];
        const BigInt& s2 = st.s_table[static_cast<std::size_t>(n - 2)];
        if (n % 2 == 0) {
            push(n, BlockSpec::Kind::Even, rle::make_run(1, s1));
        } else {
            std::vector<rle::NodePtr> unit;
            unit.push_back(rle::make_run(0, s1));
            unit.push_back(rle::make_run(-1, 1));
            std::vector<rle::NodePtr> parts;
            parts.push_back(rle::make_run(-1, 1));
            parts.push_back(rle::make_repeat(rle::make_seq(std::move(unit)), s2 - 1));
            push(n, BlockSpec::Kind::Odd, rle::make_seq(std::move(parts)));
        }
        // s-values roughly square every two levels; the working set is a few
        // dozen numbers of comparable size plus per-node stats, so budget on
        // the bit length of the newest one with a generous constant.
        std::size_t bits = bit_length(st.s_table[static_cast<std::size_t>(n)]);
        std::size_t est_bytes = (bits / 8 + 64) * 64 * static_cast<std::size_t>(depth);
        if (est_bytes > budget.memory_mb * (std::size_t(1) << 20))
            throw DepthTooLarge("depth " + std::to_string(depth) +
                                " exceeds the memory budget of " +
                                std::to_string(budget.memory_mb) + " MB at level " +
                                std::to_string(n));
    }

    std::vector<rle::NodePtr> all;
    all.reserve(st.blocks.size());
    for (const auto& b : st.blocks) all.push_back(b.pattern);
    st.concatenated = RunLengthWeights::from_tree(rle::make_seq(std::move(all)));
    return st;
}

struct RecoveryTimes {
    std::vector<BigInt> values;  // values[k-1] = n_k = s_{2k+2}

    int k_max() const { return static_cast<int>(values.size()); }
    const BigInt& at(int k) const {
        if (k < 1 || k > k_max())
            throw InsufficientDepth("recovery time n_" + std::to_string(k) + " not computed");
        return values[static_cast<std::size_t>(k - 1)];
    }
};

inline RecoveryTimes recovery_times(const ConstructionState& st, int k_max) {
    if (k_max < 1) throw PreconditionViolation("k_max must be >= 1");
    if (st.depth < 2 * k_max + 2)
        throw InsufficientDepth("recovery times up to k=" + std::to_string(k_max) +
                                " need depth >= " + std::to_string(2 * k_max + 2) +
                                ", have " + std::to_string(st.depth));
    RecoveryTimes rt;
    rt.values.reserve(static_cast<std::size_t>(k_max));
    for (int k = 1; k <= k_max; ++k) rt.values.push_back(st.s(2 * k + 2));
    return rt;
}

// Exponent of M_i^j = w_i ... w_{i+j-1} on the concatenated sequence.
inline BigInt product_exponent(const ConstructionState& st, const BigInt& i, const BigInt& j) {
    auto pv = partial_product(st.concatenated, i, j);
    return std::get<ExactPow2>(pv).exponent;
}

inline Verdict verify_balance(const ConstructionState& st, int k) {
    if (k < 1) throw PreconditionViolation("balance index k must be >= 1");
    if (st.depth < 2 * k + 1)
        throw InsufficientDepth("balance at k=" + std::to_string(k) + " needs depth >= " +
                                std::to_string(2 * k + 1));
    const BigInt& len = st.s(2 * k + 1);
    BigInt e = product_exponent(st, 1, len);
    Verdict v;
    v.horizon = len;
    if (e == 0) {
        v.status = VerdictStatus::HoldsExactly;
        v.narrative = "product of the first " + to_decimal(len) + " weights (from index 1) is 1";
    } else {
        v.status = VerdictStatus::FailsWithWitness;
        v.witness["exponent"] = to_decimal(e);
        v.narrative = "balance broken: exponent " + to_decimal(e);
    }
    return v;
}

struct ScanPolicy {
    BigInt exhaustive_cutoff = 1000000;
    std::size_t min_samples = 10000;
    std::uint64_t seed = 0x5eedbeefcafef00dULL;
};

struct IndexRange {
    BigInt lo;
    BigInt hi;  // inclusive
};

namespace detail {

// Exact minimum of E(i) = P(i+n) - P(i) over i in [lo, hi] by walking the
// constant segments under both cursors; E is linear between segment
// boundaries, so only endpoints need checking.
struct SegmentScanResult {
    BigInt min_value;
    BigInt argmin;
    BigInt positions;  // number of i values covered (all of them)
};

inline SegmentScanResult segment_scan_min(const RunLengthWeights& w, const BigInt& n,
                                          const BigInt& lo, const BigInt& hi) {
    BigInt e_cur = w.prefix_exponent(lo + n) - w.prefix_exponent(lo);
    SegmentScanResult res{e_cur, lo, hi - lo + 1};

    rle::RunCursor cur_lo = w.cursor(lo);
    rle::RunCursor cur_hi = w.cursor(lo + n);
    BigInt i = lo;
    BigInt rem_lo = 0, rem_hi = 0;
    BigInt e_lo = 0, e_hi = 0;
    while (i < hi) {
        if (rem_lo == 0) {
            auto seg = cur_lo.next(hi - i);
            e_lo = seg->exponent;
            rem_lo = seg->length;
        }
        if (rem_hi == 0) {
            auto seg = cur_hi.next(hi - i);
            e_hi = seg->exponent;
            rem_hi = seg->length;
        }
        BigInt r = std::min(std::min(rem_lo, rem_hi), BigInt(hi - i));
        BigInt slope = e_hi - e_lo;
        e_cur += slope * r;
        i += r;
        rem_lo -= r;
        rem_hi -= r;
        if (e_cur < res.min_value) {
            res.min_value = e_cur;
            res.argmin = i;
        }
    }
    return res;
}

// Deterministic stratified sample of [lo, hi] plus every block boundary +-1
// inside it (the estimates are tight at boundaries).
inline std::vector<BigInt> stratified_indices(const ConstructionState& st, const BigInt& lo,
                                              const BigInt& hi, const ScanPolicy& policy) {
    std::vector<BigInt> out;
    BigInt span = hi - lo + 1;
    SplitMix64 rng(policy.seed);
    std::size_t strata = policy.min_samples;
    for (std::size_t t = 0; t < strata; ++t) {
        BigInt a = lo + span * t / strata;
        BigInt b = lo + span * (t + 1) / strata;  // exclusive
        if (b <= a) continue;
        BigInt width = b - a;
        BigInt offset;
        if (width <= BigInt(std::numeric_limits<std::uint64_t>::max())) {
            offset = BigInt(rng.below(to_u64_clamped(width)));
        } else {
            std::size_t words = (bit_length(width) + 63) / 64;
            BigInt draw = 0;
            for (std::size_t j = 0; j < words; ++j) draw = (draw << 64) | BigInt(rng.next());
            offset = draw % width;
        }
        out.push_back(a + offset);
    }
    for (int m = 2; m <= st.depth; ++m) {
        for (const BigInt& edge : {st.block_start(m), st.block_end(m)}) {
            for (int d = -1; d <= 1; ++d) {
                BigInt i = edge + d;
                if (i >= lo && i <= hi) out.push_back(i);
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Shared body of the two product-estimate verifiers: check
// exponent(M_i^{n_k}) >= bound for all i in [lo, hi].
inline Verdict verify_product_bound(const ConstructionState& st, const BigInt& n_k,
                                    const BigInt& lo, const BigInt& hi, const BigInt& bound,
                                    const ScanPolicy& policy) {
    const RunLengthWeights& w = st.concatenated;
    Verdict v;
    v.horizon = hi;

    BigInt min_value;
    BigInt argmin;
    BigInt checked;
    bool exhaustive = hi - lo + 1 <= policy.exhaustive_cutoff;
    if (exhaustive) {
        auto res = segment_scan_min(w, n_k, lo, hi);
        min_value = res.min_value;
        argmin = res.argmin;
        checked = res.positions;
    } else {
        auto indices = stratified_indices(st, lo, hi, policy);
        min_value = product_exponent(st, indices.front(), n_k);
        argmin = indices.front();
        for (const BigInt& i : indices) {
            BigInt e = product_exponent(st, i, n_k);
            if (e < min_value) {
                min_value = e;
                argmin = i;
            }
        }
        checked = BigInt(indices.size());
    }

    v.witness["min_exponent"] = to_decimal(min_value);
    v.witness["argmin"] = to_decimal(argmin);
    v.witness["indices_checked"] = to_decimal(checked);
    v.witness["exhaustive"] = exhaustive;
    if (min_value < bound) {
        v.status = VerdictStatus::FailsWithWitness;
        v.witness["i"] = to_decimal(argmin);
        v.narrative = "exponent " + to_decimal(min_value) + " at i=" + to_decimal(argmin) +
                      " is below the bound " + to_decimal(bound);
    } else if (exhaustive) {
        v.status = VerdictStatus::HoldsExactly;
        v.narrative = "all " + to_decimal(checked) + " window products meet the bound 2^" +
                      to_decimal(bound);
    } else {
        v.status = VerdictStatus::HoldsUpToHorizon;
        v.narrative = to_decimal(checked) +
                      " stratified samples (all block boundaries included) meet the bound 2^" +
                      to_decimal(bound);
    }
    return v;
}

}  // namespace detail

// Easy estimate: M_i^{n_k} >= 1/2 for i > s_{2k+1}. Range endpoints are
// inclusive; pass std::nullopt to scan the full valid window.
inline Verdict verify_easy_estimate(const ConstructionState& st, int k,
                                    std::optional<IndexRange> i_range = std::nullopt,
                                    const ScanPolicy& policy = {}) {
    if (k < 2) throw RangeViolatesPrecondition("easy estimate requires k >= 2");
    if (st.depth < 2 * k + 2)
        throw InsufficientDepth("easy estimate at k=" + std::to_string(k) +
                                " needs depth >= " + std::to_string(2 * k + 2));
    const BigInt& n_k = st.s(2 * k + 2);
    const BigInt& lo_bound = st.s(2 * k + 1);
    BigInt hi_bound = st.s(st.depth) - n_k + 1;  // last i with i + n_k - 1 materialized
    IndexRange r = i_range.value_or(IndexRange{lo_bound + 1, hi_bound});
    if (r.lo > r.hi) throw RangeViolatesPrecondition("empty index range");
    if (r.lo <= lo_bound)
        throw RangeViolatesPrecondition("easy estimate needs i > " + to_decimal(lo_bound) +
                                        ", got i=" + to_decimal(r.lo));
    if (r.hi > hi_bound)
        throw RangeViolatesPrecondition("window reaches past materialized length at i=" +
                                        to_decimal(r.hi));
    return detail::verify_product_bound(st, n_k, r.lo, r.hi, BigInt(-1), policy);
}

// Hard estimate: M_i^{n_k} >= 2^k for 1 <= i <= s_{2k+1}.
inline Verdict verify_hard_estimate(const ConstructionState& st, int k,
                                    std::optional<IndexRange> i_range = std::nullopt,
                                    const ScanPolicy& policy = {}) {
    if (k < 2) throw RangeViolatesPrecondition("hard estimate requires k >= 2");
    if (st.depth < 2 * k + 2)
        throw InsufficientDepth("hard estimate at k=" + std::to_string(k) +
                                " needs depth >= " + std::to_string(2 * k + 2));
    const BigInt& n_k = st.s(2 * k + 2);
    const BigInt& hi_bound = st.s(2 * k + 1);
    IndexRange r = i_range.value_or(IndexRange{BigInt(1), hi_bound});
    if (r.lo > r.hi) throw RangeViolatesPrecondition("empty index range");
    if (r.lo < 1 || r.hi > hi_bound)
        throw RangeViolatesPrecondition("hard estimate needs 1 <= i <= " +
                                        to_decimal(hi_bound));
    // i + n_k - 1 <= s_{2k+1} + s_{2k+2} - 1 < s_{2k+3} when depth >= 2k+3;
    // at depth exactly 2k+2 the window still fits: s_{2k+1} + n_k - 1 <= s_{2k+2}
    // fails in general, so check against the materialized length directly.
    if (r.hi + n_k - 1 > st.s(st.depth))
        throw InsufficientDepth("window i + n_k - 1 reaches past materialized length; "
                                "build one level deeper");
    return detail::verify_product_bound(st, n_k, r.lo, r.hi, BigInt(k), policy);
}

struct BlockEntryCounts {
    BigInt halves;
    BigInt ones;
    BigInt twos;
};

inline BlockEntryCounts count_block_entries(const ConstructionState& st, int n) {
    if (n < 1) throw PreconditionViolation("block index must be >= 1");
    if (n > st.depth)
        throw InsufficientDepth("block " + std::to_string(n) + " beyond depth " +
                                std::to_string(st.depth));
    if (n == 1 || n == 3) return {1, 0, 0};
    if (n == 2) return {0, 0, 1};
    if (n % 2 == 0) return {0, 0, st.s(n - 1)};
    const BigInt& s1 = st.s(n - 1);
    const BigInt& s2 = st.s(n - 2);
    return {s2, (s2 - 1) * s1, 0};
}

// Structural invariants of the stored blocks: seed values, even runs, odd
// begin/end entries, zero-run lengths, the length recursion, and the count
// identity halves(b_n) = |b_{n-1}| for odd n >= 5.
inline Verdict verify_block_structure(const ConstructionState& st) {
    Verdict v;
    v.horizon = st.s(st.depth);
    auto fail = [&](int n, const std::string& what) {
        v.status = VerdictStatus::FailsWithWitness;
        v.witness["block"] = n;
        v.witness["violation"] = what;
        v.narrative = "block " + std::to_string(n) + ": " + what;
        return v;
    };

    for (const BlockSpec& b : st.blocks) {
        const rle::Node* p = b.pattern.get();
        if (b.n <= 3) {
            BigInt want = (b.n == 2) ? 1 : -1;
            if (p->kind != rle::Node::Kind::Run || p->run_length != 1 ||
                p->run_exponent != want)
                return fail(b.n, "seed block is not the single expected entry");
            continue;
        }
        if (b.n % 2 == 0) {
            if (p->kind != rle::Node::Kind::Run || p->run_exponent != 1 ||
                p->run_length != st.s(b.n - 1))
                return fail(b.n, "even block is not a +1 run of length s_{n-1}");
            if (b.length != st.s(b.n - 1)) return fail(b.n, "even block length recursion");
            continue;
        }
        const BigInt& s1 = st.s(b.n - 1);
        const BigInt& s2 = st.s(b.n - 2);
        if (b.length != s2 + (s2 - 1) * s1) return fail(b.n, "odd block length recursion");
        if (rle::exponent_at(p, 0) != -1 || rle::exponent_at(p, b.length - 1) != -1)
            return fail(b.n, "odd block must begin and end with exponent -1");
        // Zero runs: positions 1 + t*(s1+1) .. open a run of exactly s1 zeros.
        for (const BigInt& t : {BigInt(0), BigInt(s2 - 2)}) {
            if (t < 0) continue;
            BigInt start = 1 + t * (s1 + 1);
            if (rle::exponent_at(p, start) != 0) return fail(b.n, "zero run misplaced");
            if (rle::exponent_at(p, start + s1 - 1) != 0) return fail(b.n, "zero run short");
            if (rle::exponent_at(p, start + s1) != -1) return fail(b.n, "zero run overlong");
        }
        auto counts = count_block_entries(st, b.n);
        if (counts.halves != st.blocks[static_cast<std::size_t>(b.n - 2)].length)
            return fail(b.n, "half-count does not match previous block length");
        if (counts.halves + counts.ones != b.length) return fail(b.n, "entry counts vs length");
    }

    // Balance across b_2..b_{2k+1} for every representable k.
    for (int k = 1; 2 * k + 1 <= st.depth; ++k) {
        BigInt e = product_exponent(st, 1, st.s(2 * k + 1));
        if (e != 0) return fail(2 * k + 1, "exponent balance " + to_decimal(e) + " != 0");
    }

    v.status = VerdictStatus::HoldsExactly;
    v.narrative = "all block invariants hold through depth " + std::to_string(st.depth);
    return v;
}

inline nlohmann::json construction_check_json(int k, const std::string& check,
                                              const Verdict& v) {
    nlohmann::json j;
    j["k"] = k;
    j["check"] = check;
    j["verdict"] = verdict_status_name(v.status);
    j["witness"] = v.witness;
    j["horizon"] = to_decimal(v.horizon);
    j["narrative"] = v.narrative;
    if (v.witness.contains("min_exponent")) j["min_exponent"] = v.witness["min_exponent"];
    if (v.witness.contains("indices_checked"))
        j["indices_checked"] = v.witness["indices_checked"];
    return j;
}

}  // namespace shiftlab
