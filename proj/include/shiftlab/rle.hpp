#pragma once

// Run-compressed exponent-sequence engine.
//
// A weight sequence with power-of-two values is stored as a tree of nodes:
//   Run(e, L)      L copies of exponent e
//   Seq(c1..cm)    concatenation
//   Repeat(b, t)   t copies of b
// Repeat keeps deep constructions O(1) per block: the eleventh block of the
// recursive construction alone would need ~3·10^10 flat runs.
//
// Every node caches WindowStats: exact sum, min/max prefix, min suffix and
// min subarray of its exponent sequence, each with one deterministic witness
// position. Stats compose associatively, so range queries assemble O(depth)
// cached pieces and Repeat raises stats by binary exponentiation.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "shiftlab/bigmath.hpp"
#include "shiftlab/errors.hpp"

namespace shiftlab::rle {

struct WindowStats {
    BigInt len;
    BigInt sum;
    // min over nonempty prefixes; witness = smallest prefix length attaining
    BigInt min_prefix, min_prefix_len;
    // min over nonempty suffixes; witness = smallest start offset attaining
    BigInt min_suffix, min_suffix_start;
    // min over nonempty subarrays; witness = one minimizer (smallest start,
    // then smallest length, chosen consistently at every composition)
    BigInt min_sub, min_sub_start, min_sub_len;
    // max over nonempty prefixes; witness = smallest prefix length attaining
    BigInt max_prefix, max_prefix_len;
};

inline WindowStats run_stats(const BigInt& e, const BigInt& len) {
    WindowStats s;
    s.len = len;
    s.sum = e * len;
    if (e < 0) {
        s.min_prefix = s.sum;
        s.min_prefix_len = len;
        s.min_suffix = s.sum;
        s.min_suffix_start = 0;
        s.min_sub = s.sum;
        s.min_sub_start = 0;
        s.min_sub_len = len;
        s.max_prefix = e;
        s.max_prefix_len = 1;
    } else {
        s.min_prefix = e;
        s.min_prefix_len = 1;
        s.min_suffix = (e > 0) ? e : 0;
        s.min_suffix_start = (e > 0) ? BigInt(len - 1) : BigInt(0);
        s.min_sub = e;
        s.min_sub_start = 0;
        s.min_sub_len = 1;
        s.max_prefix = (e > 0) ? s.sum : e;
        s.max_prefix_len = (e > 0) ? len : 1;
    }
    return s;
}

inline WindowStats compose(const WindowStats& a, const WindowStats& b) {
    WindowStats s;
    s.len = a.len + b.len;
    s.sum = a.sum + b.sum;

    BigInt b_side_prefix = a.sum + b.min_prefix;
    if (a.min_prefix <= b_side_prefix) {
        s.min_prefix = a.min_prefix;
        s.min_prefix_len = a.min_prefix_len;
    } else {
        s.min_prefix = b_side_prefix;
        s.min_prefix_len = a.len + b.min_prefix_len;
    }

    BigInt a_side_suffix = a.min_suffix + b.sum;
    if (a_side_suffix <= b.min_suffix) {
        s.min_suffix = a_side_suffix;
        s.min_suffix_start = a.min_suffix_start;
    } else {
        s.min_suffix = b.min_suffix;
        s.min_suffix_start = a.len + b.min_suffix_start;
    }

    // Subarray minimum: inside a, spanning the seam, or inside b.
    BigInt cross = a.min_suffix + b.min_prefix;
    s.min_sub = a.min_sub;
    s.min_sub_start = a.min_sub_start;
    s.min_sub_len = a.min_sub_len;
    BigInt cross_start = a.min_suffix_start;
    BigInt cross_len = (a.len - a.min_suffix_start) + b.min_prefix_len;
    if (cross < s.min_sub || (cross == s.min_sub && (cross_start < s.min_sub_start ||
                                                     (cross_start == s.min_sub_start &&
                                                      cross_len < s.min_sub_len)))) {
        s.min_sub = cross;
        s.min_sub_start = cross_start;
        s.min_sub_len = cross_len;
    }
    BigInt b_start = a.len + b.min_sub_start;
    if (b.min_sub < s.min_sub) {
        s.min_sub = b.min_sub;
        s.min_sub_start = b_start;
        s.min_sub_len = b.min_sub_len;
    }

    BigInt b_side_max = a.sum + b.max_prefix;
    if (a.max_prefix >= b_side_max) {
        s.max_prefix = a.max_prefix;
        s.max_prefix_len = a.max_prefix_len;
    } else {
        s.max_prefix = b_side_max;
        s.max_prefix_len = a.len + b.max_prefix_len;
    }
    return s;
}

// Stats of `times` concatenated copies, by binary exponentiation.
inline WindowStats repeat_stats(const WindowStats& one, const BigInt& times) {
    WindowStats acc = one;
    BigInt remaining = times - 1;
    WindowStats sq = one;
    while (remaining > 0) {
        if ((remaining & 1) != 0) acc = compose(acc, sq);
        remaining >>= 1;
        if (remaining > 0) sq = compose(sq, sq);
    }
    return acc;
}

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum class Kind { Run, Seq, Repeat };
    Kind kind;

    BigInt run_exponent;
    BigInt run_length;

    std::vector<NodePtr> children;
    std::vector<BigInt> cum_len;  // size children+1, cum_len[0] = 0
    std::vector<BigInt> cum_sum;

    NodePtr body;
    BigInt times;

    WindowStats stats;
    BigInt abs_sum;  // Σ |e|·len, bounds every partial sum in magnitude

    // int64 mirror for the hot prefix-sum path
    bool fits64 = false;
    std::int64_t len64 = 0;
    std::int64_t sum64 = 0;
    std::int64_t exp64 = 0;
    std::vector<std::int64_t> cum_len64;
    std::vector<std::int64_t> cum_sum64;
};

namespace detail64 {
constexpr std::int64_t kSafe = std::int64_t(1) << 62;
}

inline NodePtr make_run(const BigInt& exponent, const BigInt& length) {
    if (length <= 0) throw PreconditionViolation("run length must be >= 1");
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Run;
    n->run_exponent = exponent;
    n->run_length = length;
    n->stats = run_stats(exponent, length);
    n->abs_sum = boost::multiprecision::abs(exponent) * length;
    if (n->abs_sum < detail64::kSafe && length < detail64::kSafe) {
        n->fits64 = true;
        n->len64 = static_cast<std::int64_t>(length);
        n->exp64 = static_cast<std::int64_t>(exponent);
        n->sum64 = static_cast<std::int64_t>(n->stats.sum);
    }
    return n;
}

inline NodePtr make_seq(std::vector<NodePtr> children) {
    if (children.empty()) throw PreconditionViolation("empty sequence node");
    if (children.size() == 1) return children[0];
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Seq;
    n->children = std::move(children);
    n->cum_len.reserve(n->children.size() + 1);
    n->cum_sum.reserve(n->children.size() + 1);
    n->cum_len.push_back(0);
    n->cum_sum.push_back(0);
    n->abs_sum = 0;
    bool first = true;
    for (const auto& c : n->children) {
        n->cum_len.push_back(n->cum_len.back() + c->stats.len);
        n->cum_sum.push_back(n->cum_sum.back() + c->stats.sum);
        n->abs_sum += c->abs_sum;
        n->stats = first ? c->stats : compose(n->stats, c->stats);
        first = false;
    }
    if (n->abs_sum < detail64::kSafe && n->stats.len < detail64::kSafe) {
        bool ok = true;
        for (const auto& c : n->children) ok = ok && c->fits64;
        if (ok) {
            n->fits64 = true;
            n->len64 = static_cast<std::int64_t>(n->stats.len);
            n->sum64 = static_cast<std::int64_t>(n->stats.sum);
            n->cum_len64.reserve(n->cum_len.size());
            n->cum_sum64.reserve(n->cum_sum.size());
            for (const auto& v : n->cum_len) n->cum_len64.push_back(static_cast<std::int64_t>(v));
            for (const auto& v : n->cum_sum) n->cum_sum64.push_back(static_cast<std::int64_t>(v));
        }
    }
    return n;
}

inline NodePtr make_repeat(NodePtr body, const BigInt& times) {
    if (times <= 0) throw PreconditionViolation("repeat count must be >= 1");
    if (times == 1) return body;
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Repeat;
    n->body = std::move(body);
    n->times = times;
    n->stats = repeat_stats(n->body->stats, times);
    n->abs_sum = n->body->abs_sum * times;
    if (n->abs_sum < detail64::kSafe && n->stats.len < detail64::kSafe && n->body->fits64) {
        n->fits64 = true;
        n->len64 = static_cast<std::int64_t>(n->stats.len);
        n->sum64 = static_cast<std::int64_t>(n->stats.sum);
    }
    return n;
}

inline const BigInt& node_length(const NodePtr& n) { return n->stats.len; }

inline BigInt exponent_at(const Node* n, BigInt pos) {
    for (;;) {
        switch (n->kind) {
            case Node::Kind::Run:
                return n->run_exponent;
            case Node::Kind::Seq: {
                std::size_t lo = 0, hi = n->children.size();
                while (hi - lo > 1) {
                    std::size_t mid = (lo + hi) / 2;
                    if (n->cum_len[mid] <= pos)
                        lo = mid;
                    else
                        hi = mid;
                }
                pos -= n->cum_len[lo];
                n = n->children[lo].get();
                break;
            }
            case Node::Kind::Repeat: {
                pos %= n->body->stats.len;
                n = n->body.get();
                break;
            }
        }
    }
}

// Extreme single-entry exponents, found structurally. Repeat bodies are
// visited once, so this is O(nodes) regardless of the expanded length.
inline BigInt min_entry_exponent(const Node* n) {
    switch (n->kind) {
        case Node::Kind::Run:
            return n->run_exponent;
        case Node::Kind::Seq: {
            BigInt m = min_entry_exponent(n->children.front().get());
            for (std::size_t i = 1; i < n->children.size(); ++i) {
                BigInt c = min_entry_exponent(n->children[i].get());
                if (c < m) m = c;
            }
            return m;
        }
        case Node::Kind::Repeat:
        default:
            return min_entry_exponent(n->body.get());
    }
}

inline BigInt max_entry_exponent(const Node* n) {
    switch (n->kind) {
        case Node::Kind::Run:
            return n->run_exponent;
        case Node::Kind::Seq: {
            BigInt m = max_entry_exponent(n->children.front().get());
            for (std::size_t i = 1; i < n->children.size(); ++i) {
                BigInt c = max_entry_exponent(n->children[i].get());
                if (c > m) m = c;
            }
            return m;
        }
        case Node::Kind::Repeat:
        default:
            return max_entry_exponent(n->body.get());
    }
}

// Minimum single-entry exponent among positions [a, b) of n.
// Precondition: 0 <= a < b <= len.
inline BigInt min_entry_in_range(const Node* n, const BigInt& a, const BigInt& b) {
    if (a <= 0 && b >= n->stats.len) return min_entry_exponent(n);
    switch (n->kind) {
        case Node::Kind::Run:
            return n->run_exponent;
        case Node::Kind::Seq: {
            // First child overlapping [a, b): largest i with cum_len[i] <= a.
            std::size_t lo = 0, hi = n->children.size();
            while (hi - lo > 1) {
                std::size_t mid = (lo + hi) / 2;
                if (n->cum_len[mid] <= a)
                    lo = mid;
                else
                    hi = mid;
            }
            std::optional<BigInt> m;
            for (std::size_t i = lo; i < n->children.size() && n->cum_len[i] < b; ++i) {
                BigInt ca = a - n->cum_len[i];
                BigInt cb = b - n->cum_len[i];
                const BigInt& clen = n->children[i]->stats.len;
                if (ca < 0) ca = 0;
                if (cb > clen) cb = clen;
                BigInt c = min_entry_in_range(n->children[i].get(), ca, cb);
                if (!m || c < *m) m = c;
            }
            return *m;
        }
        case Node::Kind::Repeat:
        default: {
            const BigInt& blen = n->body->stats.len;
            BigInt first_rep = a / blen;
            BigInt last_rep = (b - 1) / blen;
            if (first_rep == last_rep)
                return min_entry_in_range(n->body.get(), a - first_rep * blen,
                                          b - first_rep * blen);
            BigInt m = min_entry_in_range(n->body.get(), a - first_rep * blen, blen);
            BigInt tail = min_entry_in_range(n->body.get(), 0, b - last_rep * blen);
            if (tail < m) m = tail;
            if (last_rep - first_rep >= 2) {
                BigInt mid = min_entry_exponent(n->body.get());
                if (mid < m) m = mid;
            }
            return m;
        }
    }
}

// Sum of the first `count` exponents of n. Precondition: 0 <= count <= len.
inline std::int64_t prefix_sum64(const Node* n, std::int64_t count) {
    std::int64_t acc = 0;
    while (count > 0) {
        switch (n->kind) {
            case Node::Kind::Run:
                return acc + n->exp64 * count;
            case Node::Kind::Seq: {
                std::size_t lo = 0, hi = n->children.size();
                while (hi - lo > 1) {
                    std::size_t mid = (lo + hi) / 2;
                    if (n->cum_len64[mid] < count)
                        lo = mid;
                    else
                        hi = mid;
                }
                // children [0, lo) are fully inside the prefix
                acc += n->cum_sum64[lo];
                count -= n->cum_len64[lo];
                n = n->children[lo].get();
                break;
            }
            case Node::Kind::Repeat: {
                std::int64_t blen = n->body->len64;
                std::int64_t q = count / blen;
                acc += q * n->body->sum64;
                count -= q * blen;
                n = n->body.get();
                break;
            }
        }
    }
    return acc;
}

inline BigInt prefix_sum(const Node* n, const BigInt& count_in) {
    if (n->fits64 && count_in <= n->len64)
        return BigInt(prefix_sum64(n, static_cast<std::int64_t>(count_in)));
    BigInt acc = 0;
    BigInt count = count_in;
    while (count > 0) {
        if (n->fits64) return acc + prefix_sum64(n, static_cast<std::int64_t>(count));
        switch (n->kind) {
            case Node::Kind::Run:
                return acc + n->run_exponent * count;
            case Node::Kind::Seq: {
                std::size_t lo = 0, hi = n->children.size();
                while (hi - lo > 1) {
                    std::size_t mid = (lo + hi) / 2;
                    if (n->cum_len[mid] < count)
                        lo = mid;
                    else
                        hi = mid;
                }
                acc += n->cum_sum[lo];
                count -= n->cum_len[lo];
                n = n->children[lo].get();
                break;
            }
            case Node::Kind::Repeat: {
                const BigInt& blen = n->body->stats.len;
                BigInt q = count / blen;
                acc += q * n->body->stats.sum;
                count -= q * blen;
                n = n->body.get();
                break;
            }
        }
    }
    return acc;
}

// Exact window statistics of positions [a, b) of node n. Precondition: a < b <= len.
// Witness offsets in the result are relative to a.
inline WindowStats range_stats(const Node* n, const BigInt& a, const BigInt& b) {
    if (a == 0 && b == n->stats.len) return n->stats;
    switch (n->kind) {
        case Node::Kind::Run:
            return run_stats(n->run_exponent, b - a);
        case Node::Kind::Seq: {
            std::optional<WindowStats> acc;
            for (std::size_t i = 0; i < n->children.size(); ++i) {
                const BigInt& lo = n->cum_len[i];
                const BigInt& hi = n->cum_len[i + 1];
                if (hi <= a) continue;
                if (lo >= b) break;
                BigInt ca = (a > lo) ? a - lo : BigInt(0);
                BigInt cb = (b < hi) ? b - lo : hi - lo;
                WindowStats piece = range_stats(n->children[i].get(), ca, cb);
                acc = acc ? compose(*acc, piece) : piece;
            }
            return *acc;
        }
        case Node::Kind::Repeat: {
            const BigInt& blen = n->body->stats.len;
            BigInt first_rep = a / blen;
            BigInt last_rep = (b - 1) / blen;  // inclusive
            if (first_rep == last_rep)
                return range_stats(n->body.get(), a - first_rep * blen, b - first_rep * blen);
            std::optional<WindowStats> acc;
            BigInt head_start = a - first_rep * blen;
            if (head_start != 0) {
                acc = range_stats(n->body.get(), head_start, blen);
                first_rep += 1;
            }
            BigInt tail_end = b - last_rep * blen;
            BigInt full_reps = last_rep - first_rep + ((tail_end == blen) ? 1 : 0);
            if (full_reps > 0) {
                WindowStats mid = (full_reps == 1) ? n->body->stats
                                                   : repeat_stats(n->body->stats, full_reps);
                acc = acc ? compose(*acc, mid) : mid;
            }
            if (tail_end != blen) {
                WindowStats tail = range_stats(n->body.get(), 0, tail_end);
                acc = acc ? compose(*acc, tail) : tail;
            }
            return *acc;
        }
    }
    throw PreconditionViolation("unreachable node kind");
}

struct Segment {
    BigInt exponent;
    BigInt length;
};

// Streams constant-exponent segments from a given start position. Segments
// are not merged across node boundaries; each yielded segment is constant.
class RunCursor {
  public:
    RunCursor(NodePtr root, const BigInt& start) : root_(std::move(root)) {
        if (start < root_->stats.len) descend(root_.get(), start);
    }

    // Next segment, at most max_len long. Returns nullopt at end of sequence.
    std::optional<Segment> next(const BigInt& max_len) {
        if (stack_.empty() || max_len <= 0) return std::nullopt;
        Frame& top = stack_.back();
        const Node* run = top.node;
        BigInt avail = run->run_length - top.offset;
        Segment seg{run->run_exponent, avail <= max_len ? avail : max_len};
        if (seg.length == avail)
            advance();
        else
            top.offset += seg.length;
        return seg;
    }

  private:
    struct Frame {
        const Node* node;
        std::size_t child_idx = 0;  // Seq
        BigInt reps_left = 0;       // Repeat
        BigInt offset = 0;          // Run
    };

    NodePtr root_;
    std::vector<Frame> stack_;

    void descend(const Node* n, BigInt pos) {
        for (;;) {
            Frame f;
            f.node = n;
            switch (n->kind) {
                case Node::Kind::Run:
                    f.offset = pos;
                    stack_.push_back(f);
                    return;
                case Node::Kind::Seq: {
                    std::size_t lo = 0, hi = n->children.size();
                    while (hi - lo > 1) {
                        std::size_t mid = (lo + hi) / 2;
                        if (n->cum_len[mid] <= pos)
                            lo = mid;
                        else
                            hi = mid;
                    }
                    f.child_idx = lo;
                    stack_.push_back(f);
                    pos -= n->cum_len[lo];
                    n = n->children[lo].get();
                    break;
                }
                case Node::Kind::Repeat: {
                    BigInt r = pos / n->body->stats.len;
                    f.reps_left = n->times - r;
                    stack_.push_back(f);
                    pos -= r * n->body->stats.len;
                    n = n->body.get();
                    break;
                }
            }
        }
    }

    void advance() {
        stack_.pop_back();  // finished Run frame
        while (!stack_.empty()) {
            Frame& f = stack_.back();
            if (f.node->kind == Node::Kind::Seq) {
                if (++f.child_idx < f.node->children.size()) {
                    descend(f.node->children[f.child_idx].get(), 0);
                    return;
                }
            } else {  // Repeat
                if (--f.reps_left > 0) {
                    descend(f.node->body.get(), 0);
                    return;
                }
            }
            stack_.pop_back();
        }
    }
};

// Compressed record table of the prefix-sum profile P(p) = Σ_{m<p} e_m for
// p in [p_lo, p_hi]. An event covers a contiguous range of record-setting
// positions with the final (largest) value reached at n_last.
struct RecordEvent {
    BigInt p_first, p_last;
    BigInt value;  // P(p_last), the running max after the event
};

namespace detail_scan {

struct RecordCtx {
    BigInt p_lo, p_hi;
    std::vector<RecordEvent>* out;
    std::size_t max_events;
    bool truncated = false;
    BigInt cur_max;
    bool have_max = false;

    void emit(const BigInt& first, const BigInt& last, const BigInt& value) {
        if (out->size() < max_events) {
            out->push_back({first, last, value});
        } else {
            truncated = true;
            out->back().p_last = last;  // extend final event instead of growing
            out->back().value = value;
        }
        cur_max = value;
        have_max = true;
    }
};

// base = positions (base, base+len] are covered by this node; h = P(base).
inline void records_walk(const Node* n, const BigInt& base, const BigInt& h, RecordCtx& ctx) {
    BigInt end = base + n->stats.len;
    if (end < ctx.p_lo || base >= ctx.p_hi) return;
    // Entirely skippable if nothing inside can beat the current max.
    if (ctx.have_max && h + n->stats.max_prefix <= ctx.cur_max) return;
    switch (n->kind) {
        case Node::Kind::Run: {
            const BigInt& e = n->run_exponent;
            BigInt q_lo = (ctx.p_lo > base + 1) ? ctx.p_lo - base : BigInt(1);
            BigInt q_hi = (ctx.p_hi <= end) ? ctx.p_hi - base - 1 : n->run_length;
            if (q_lo > q_hi) return;
            if (e <= 0) {
                BigInt v = h + e * q_lo;
                if (!ctx.have_max || v > ctx.cur_max) ctx.emit(base + q_lo, base + q_lo, v);
                return;
            }
            BigInt q_start = q_lo;
            if (ctx.have_max) {
                // smallest q with h + e q > cur_max
                BigInt need = floor_div(ctx.cur_max - h, e) + 1;
                if (need > q_start) q_start = need;
            }
            if (q_start > q_hi) return;
            ctx.emit(base + q_start, base + q_hi, h + e * q_hi);
            return;
        }
        case Node::Kind::Seq: {
            for (std::size_t i = 0; i < n->children.size(); ++i)
                records_walk(n->children[i].get(), base + n->cum_len[i], h + n->cum_sum[i], ctx);
            return;
        }
        case Node::Kind::Repeat: {
            const BigInt& blen = n->body->stats.len;
            const BigInt& bsum = n->body->stats.sum;
            if (bsum <= 0) {
                // Entry heights are non-increasing: after the first two
                // intersecting repetitions nothing new can be set.
                BigInt r0 = (ctx.p_lo > base) ? (ctx.p_lo - base - 1) / blen : BigInt(0);
                for (BigInt r = r0; r < n->times; ++r) {
                    BigInt rep_base = base + r * blen;
                    if (rep_base >= ctx.p_hi) break;
                    BigInt hr = h + r * bsum;
                    if (ctx.have_max && hr + n->body->stats.max_prefix <= ctx.cur_max) break;
                    records_walk(n->body.get(), rep_base, hr, ctx);
                }
                return;
            }
            // Rising repetition: process up to 64 repetitions explicitly,
            // then summarize the remainder as one compressed event (the
            // record table stays truthful about the final maximum).
            BigInt r0 = (ctx.p_lo > base) ? (ctx.p_lo - base - 1) / blen : BigInt(0);
            BigInt processed = 0;
            BigInt r = r0;
            for (; r < n->times && processed < 64; ++r, ++processed) {
                BigInt rep_base = base + r * blen;
                if (rep_base >= ctx.p_hi) return;
                records_walk(n->body.get(), rep_base, h + r * bsum, ctx);
            }
            if (r < n->times && base + r * blen < ctx.p_hi) {
                BigInt last_rep = (ctx.p_hi - base - 2) / blen;
                if (last_rep >= n->times) last_rep = n->times - 1;
                // Final repetition may be clipped; walk it exactly, after
                // summarizing the middle at its last full position.
                if (last_rep > r) {
                    BigInt mid_end_rep = last_rep - 1;
                    BigInt v = h + mid_end_rep * bsum + n->body->stats.max_prefix;
                    if (!ctx.have_max || v > ctx.cur_max) {
                        BigInt p = base + mid_end_rep * blen + n->body->stats.max_prefix_len;
                        ctx.emit(base + r * blen + 1, p, v);
                        ctx.truncated = true;
                    }
                }
                records_walk(n->body.get(), base + last_rep * blen, h + last_rep * bsum, ctx);
            }
            return;
        }
    }
}

struct ThresholdCtx {
    BigInt p_lo, p_hi;
    BigInt c;  // collect positions p with P(p) <= c
    BigInt count = 0;
    bool exact = true;
    std::size_t max_witnesses;
    std::vector<BigInt>* first_witnesses;
    std::optional<BigInt> last_witness;

    void found_range(const BigInt& p_first, const BigInt& p_last) {
        count += p_last - p_first + 1;
        if (first_witnesses->size() < max_witnesses) {
            BigInt p = p_first;
            while (p <= p_last &&
                   first_witnesses->size() < max_witnesses) {
                first_witnesses->push_back(p);
                ++p;
            }
        }
        last_witness = p_last;
    }
};

inline void threshold_walk(const Node* n, const BigInt& base, const BigInt& h, ThresholdCtx& ctx,
                           int depth_budget = 64) {
    BigInt end = base + n->stats.len;
    if (end < ctx.p_lo || base >= ctx.p_hi) return;
    if (h + n->stats.min_prefix > ctx.c) return;  // nothing qualifies inside
    bool whole_window = (base + 1 >= ctx.p_lo) && (end < ctx.p_hi);
    if (whole_window && h + n->stats.max_prefix <= ctx.c) {
        // every position inside qualifies
        ctx.found_range(base + 1, end);
        return;
    }
    switch (n->kind) {
        case Node::Kind::Run: {
            const BigInt& e = n->run_exponent;
            BigInt q_lo = (ctx.p_lo > base + 1) ? ctx.p_lo - base : BigInt(1);
            BigInt q_hi = (ctx.p_hi <= end) ? ctx.p_hi - base - 1 : n->run_length;
            if (q_lo > q_hi) return;
            if (e == 0) {
                if (h <= ctx.c) ctx.found_range(base + q_lo, base + q_hi);
                return;
            }
            if (e > 0) {
                // h + e q <= c  =>  q <= (c-h)/e
                BigInt q_max = floor_div(ctx.c - h, e);
                if (q_max < q_lo) return;
                if (q_max > q_hi) q_max = q_hi;
                ctx.found_range(base + q_lo, base + q_max);
            } else {
                // q >= (c-h)/e rounded up for negative e
                BigInt q_min = ceil_div(ctx.c - h, e);
                if (q_min > q_hi) return;
                if (q_min < q_lo) q_min = q_lo;
                ctx.found_range(base + q_min, base + q_hi);
            }
            return;
        }
        case Node::Kind::Seq: {
            for (std::size_t i = 0; i < n->children.size(); ++i)
                threshold_walk(n->children[i].get(), base + n->cum_len[i], h + n->cum_sum[i],
                               ctx, depth_budget);
            return;
        }
        case Node::Kind::Repeat: {
            const BigInt& blen = n->body->stats.len;
            const BigInt& bsum = n->body->stats.sum;
            BigInt r_first = (ctx.p_lo > base + 1) ? (ctx.p_lo - base - 1) / blen : BigInt(0);
            BigInt r_last =
                (ctx.p_hi <= end) ? BigInt((ctx.p_hi - base - 2) / blen) : BigInt(n->times - 1);
            if (r_last >= n->times) r_last = n->times - 1;
            if (r_last < r_first) return;
            if (bsum == 0) {
                // All repetitions behave identically modulo position shift.
                // Clipped edges are walked; full middle repetitions reuse one
                // walk's count (positions differ, count per rep is equal).
                for (BigInt r = r_first; r <= r_last;) {
                    BigInt rep_base = base + r * blen;
                    bool clipped = (rep_base + 1 < ctx.p_lo) || (rep_base + blen >= ctx.p_hi);
                    if (clipped) {
                        threshold_walk(n->body.get(), rep_base, h, ctx, depth_budget - 1);
                        ++r;
                        continue;
                    }
                    BigInt full_until = r_last;
                    if (base + (r_last + 1) * blen >= ctx.p_hi) full_until = r_last - 1;
                    BigInt reps_here = full_until - r + 1;
                    if (reps_here <= 0) {
                        threshold_walk(n->body.get(), rep_base, h, ctx, depth_budget - 1);
                        ++r;
                        continue;
                    }
                    ThresholdCtx one{ctx.p_lo, ctx.p_hi, ctx.c};
                    std::vector<BigInt> wits;
                    one.max_witnesses = ctx.max_witnesses;
                    one.first_witnesses = &wits;
                    threshold_walk(n->body.get(), rep_base, h, one, depth_budget - 1);
                    ctx.count += one.count * reps_here;
                    // Replicate rep-local witnesses across the batch until the
                    // cap fills; position order is repetition-major.
                    for (BigInt rep = 0; rep < reps_here; ++rep) {
                        if (ctx.first_witnesses->size() >= ctx.max_witnesses) break;
                        for (const auto& w : wits)
                            if (ctx.first_witnesses->size() < ctx.max_witnesses)
                                ctx.first_witnesses->push_back(w + rep * blen);
                    }
                    if (one.last_witness)
                        ctx.last_witness = *one.last_witness + (reps_here - 1) * blen;
                    ctx.exact = ctx.exact && one.exact;
                    r += reps_here;
                }
                return;
            }
            // Monotone entry heights: split repetitions into the all-qualify
            // zone (batched) and the transition band (walked per repetition).
            // Band width is bounded by prefix-spread / |bsum| + 2.
            const BigInt& minp = n->body->stats.min_prefix;
            const BigInt& maxp = n->body->stats.max_prefix;
            BigInt walked = 0;
            const BigInt walk_cap = 200000;
            for (BigInt r = r_first; r <= r_last; ++r) {
                BigInt hr = h + r * bsum;
                if (hr + minp > ctx.c) {
                    if (bsum > 0) break;  // later reps only higher
                    // Descending: jump to the first repetition that can qualify.
                    BigInt r_min = ceil_div(h + minp - ctx.c, -bsum);
                    if (r_min > r + 1) r = r_min - 1;
                    continue;
                }
                BigInt rep_base = base + r * blen;
                bool clipped = (rep_base + 1 < ctx.p_lo) || (rep_base + blen >= ctx.p_hi);
                if (!clipped && hr + maxp <= ctx.c) {
                    // whole repetition qualifies; batch all consecutive reps
                    // staying in this zone (monotone => contiguous range)
                    BigInt r_end = r;
                    if (bsum < 0) {
                        // stays fully-below until clipping at r_last
                        BigInt unclipped_last = r_last;
                        if (base + (r_last + 1) * blen >= ctx.p_hi) unclipped_last = r_last - 1;
                        r_end = unclipped_last;
                    } else {
                        // h rising: fully-below while hr+maxp <= c
                        BigInt r_zone = floor_div(ctx.c - h - maxp, bsum);
                        r_end = r_zone < r_last ? r_zone : r_last;
                        if (base + (r_end + 1) * blen >= ctx.p_hi) r_end -= 1;
                    }
                    if (r_end < r) r_end = r;
                    BigInt reps_here = r_end - r + 1;
                    ctx.count += blen * reps_here;
                    if (ctx.first_witnesses->size() < ctx.max_witnesses) {
                        BigInt p = rep_base + 1;
                        BigInt last_p = base + (r_end + 1) * blen;
                        while (ctx.first_witnesses->size() < ctx.max_witnesses &&
                               p <= last_p) {
                            ctx.first_witnesses->push_back(p);
                            ++p;
                        }
                    }
                    ctx.last_witness = base + (r_end + 1) * blen;
                    r = r_end;
                    continue;
                }
                threshold_walk(n->body.get(), rep_base, hr, ctx, depth_budget - 1);
                if (++walked > walk_cap) {
                    ctx.exact = false;  // transition band too wide to enumerate
                    return;
                }
            }
            return;
        }
    }
}

}  // namespace detail_scan

struct RecordScan {
    std::vector<RecordEvent> events;
    bool truncated = false;
};

inline RecordScan collect_records(const NodePtr& root, const BigInt& p_lo, const BigInt& p_hi,
                                  std::size_t max_events = 64) {
    RecordScan out;
    detail_scan::RecordCtx ctx;
    ctx.p_lo = p_lo;
    ctx.p_hi = p_hi + 1;  // walk uses half-open upper bound on positions
    ctx.out = &out.events;
    ctx.max_events = max_events;
    detail_scan::records_walk(root.get(), 0, 0, ctx);
    out.truncated = ctx.truncated;
    return out;
}

struct ThresholdScan {
    BigInt count = 0;
    bool exact = true;
    std::vector<BigInt> first_positions;
    std::optional<BigInt> last_position;
};

// Positions p in [p_lo, p_hi] with prefix sum P(p) <= c.
inline ThresholdScan collect_prefix_le(const NodePtr& root, const BigInt& c, const BigInt& p_lo,
                                       const BigInt& p_hi, std::size_t max_witnesses = 64) {
    ThresholdScan out;
    detail_scan::ThresholdCtx ctx{p_lo, p_hi + 1, c};
    ctx.max_witnesses = max_witnesses;
    ctx.first_witnesses = &out.first_positions;
    detail_scan::threshold_walk(root.get(), 0, 0, ctx);
    out.count = ctx.count;
    out.exact = ctx.exact;
    out.last_position = ctx.last_witness;
    return out;
}

}  // namespace shiftlab::rle
