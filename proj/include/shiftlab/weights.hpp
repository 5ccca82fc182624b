#pragma once

// Weight sequences with power-of-two values, exact partial products via
// exponent prefix sums, and a log-space fallback for arbitrary positive
// rational weights.
//
// Indexing convention: concatenated weights occupy indices 0, 1, 2, …; w_0 is
// the first weight. Products M_i^j = w_i w_{i+1} ⋯ w_{i+j−1} require i >= 1;
// index 0 is materialized but inert in every product identity.

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "shiftlab/bigmath.hpp"
#include "shiftlab/errors.hpp"
#include "shiftlab/rle.hpp"
#include "shiftlab/verdict.hpp"

namespace shiftlab {

struct DyadicExponent {
    BigInt e;  // weight value is 2^e
};

struct DyadicRun {
    BigInt exponent;
    BigInt length;
};

struct ExactPow2 {
    BigInt exponent;  // denotes exactly 2^exponent
};

struct LogSpace {
    double log2_value;
    double rel_err_bound;
};

using ProductValue = std::variant<ExactPow2, LogSpace>;

// A dyadic weight sequence. Flat user input materializes its runs and prefix
// tables; deep recursive constructions wrap a repeat-compressed tree and
// expose the same queries through a virtual flattening (runs() streaming via
// cursor), since materializing them is impossible beyond modest depths.
class RunLengthWeights {
  public:
    static RunLengthWeights from_runs(std::vector<DyadicRun> runs) {
        if (runs.empty()) throw PreconditionViolation("weight sequence needs at least one run");
        RunLengthWeights w;
        w.runs_ = std::move(runs);
        std::vector<rle::NodePtr> nodes;
        nodes.reserve(w.runs_.size());
        w.prefix_counts_.reserve(w.runs_.size() + 1);
        w.prefix_exponents_.reserve(w.runs_.size() + 1);
        w.prefix_counts_.push_back(0);
        w.prefix_exponents_.push_back(0);
        for (const auto& r : w.runs_) {
            if (r.length <= 0) throw PreconditionViolation("run length must be >= 1");
            nodes.push_back(rle::make_run(r.exponent, r.length));
            w.prefix_counts_.push_back(w.prefix_counts_.back() + r.length);
            w.prefix_exponents_.push_back(w.prefix_exponents_.back() + r.exponent * r.length);
        }
        w.root_ = rle::make_seq(std::move(nodes));
        w.flat_ = true;
        return w;
    }

    static RunLengthWeights from_tree(rle::NodePtr root) {
        RunLengthWeights w;
        w.root_ = std::move(root);
        w.flat_ = false;
        return w;
    }

    const BigInt& total_length() const { return root_->stats.len; }

    // Flat-input accessors; a tree-backed sequence answers through flatten().
    bool is_flat() const { return flat_; }
    const std::vector<DyadicRun>& runs() const {
        require_flat();
        return runs_;
    }
    const std::vector<BigInt>& prefix_counts() const {
        require_flat();
        return prefix_counts_;
    }
    const std::vector<BigInt>& prefix_exponents() const {
        require_flat();
        return prefix_exponents_;
    }

    // Materializes the run list of any sequence. Throws DepthTooLarge when
    // more than max_runs segments would be needed.
    std::vector<DyadicRun> flatten(std::size_t max_runs = 1u << 20) const {
        if (flat_) {
            if (runs_.size() > max_runs)
                throw DepthTooLarge("sequence has " + std::to_string(runs_.size()) +
                                    " runs, over the export budget of " +
                                    std::to_string(max_runs));
            return runs_;
        }
        std::vector<DyadicRun> out;
        rle::RunCursor cur(root_, 0);
        BigInt remaining = total_length();
        while (remaining > 0) {
            auto seg = cur.next(remaining);
            if (!seg) break;
            remaining -= seg->length;
            if (!out.empty() && out.back().exponent == seg->exponent)
                out.back().length += seg->length;
            else {
                if (out.size() == max_runs)
                    throw DepthTooLarge("flattened run count exceeds the export budget of " +
                                        std::to_string(max_runs));
                out.push_back({seg->exponent, seg->length});
            }
        }
        return out;
    }

    BigInt exponent_at(const BigInt& n) const {
        if (n < 0 || n >= total_length())
            throw IndexBeyondMaterialized("index " + to_decimal(n) +
                                          " outside materialized length " +
                                          to_decimal(total_length()));
        return rle::exponent_at(root_.get(), n);
    }

    // Sum of exponents of w_0 … w_{n−1}. n may equal the total length.
    BigInt prefix_exponent(const BigInt& n) const {
        if (n < 0 || n > total_length())
            throw IndexBeyondMaterialized("prefix end " + to_decimal(n) +
                                          " outside materialized length " +
                                          to_decimal(total_length()));
        return rle::prefix_sum(root_.get(), n);
    }

    // Exact window statistics over indices [a, b).
    rle::WindowStats window_stats(const BigInt& a, const BigInt& b) const {
        if (!(0 <= a && a < b && b <= total_length()))
            throw PreconditionViolation("bad stats window [" + to_decimal(a) + ", " +
                                        to_decimal(b) + ")");
        return rle::range_stats(root_.get(), a, b);
    }

    rle::RunCursor cursor(const BigInt& start) const { return rle::RunCursor(root_, start); }

    const rle::NodePtr& root() const { return root_; }

  private:
    rle::NodePtr root_;
    bool flat_ = false;
    std::vector<DyadicRun> runs_;
    std::vector<BigInt> prefix_counts_;
    std::vector<BigInt> prefix_exponents_;

    void require_flat() const {
        if (!flat_)
            throw DepthTooLarge(
                "run table is repeat-compressed; use flatten() within an explicit budget");
    }
};

inline DyadicExponent weight_at(const RunLengthWeights& w, const BigInt& n) {
    return DyadicExponent{w.exponent_at(n)};
}

// M_i^j = w_i ⋯ w_{i+j−1} as an exact power of two. j = 0 gives the empty
// product. i = 0 is rejected: products in every sequence identity start at 1.
inline ProductValue partial_product(const RunLengthWeights& w, const BigInt& i, const BigInt& j) {
    if (i < 1) throw PreconditionViolation("partial products require i >= 1");
    if (j < 0) throw PreconditionViolation("negative product length");
    if (j == 0) return ExactPow2{0};
    if (i + j > w.total_length())
        throw IndexBeyondMaterialized("product reaches index " + to_decimal(i + j - 1) +
                                      ", beyond materialized length " +
                                      to_decimal(w.total_length()));
    return ExactPow2{w.prefix_exponent(i + j) - w.prefix_exponent(i)};
}

// Positive rational weights without dyadic structure; products live in log
// space with a propagated error bound.
class GeneralWeights {
  public:
    static GeneralWeights from_values(std::vector<Rational> values) {
        if (values.empty()) throw PreconditionViolation("weight list must be nonempty");
        GeneralWeights g;
        g.values_ = std::move(values);
        g.log2_prefix_.reserve(g.values_.size() + 1);
        g.abs_log2_prefix_.reserve(g.values_.size() + 1);
        g.log2_prefix_.push_back(0.0);
        g.abs_log2_prefix_.push_back(0.0);
        for (const auto& v : g.values_) {
            if (v <= 0) throw PreconditionViolation("weights must be strictly positive");
            double lg = std::log2(static_cast<double>(v));
            g.log2_prefix_.push_back(g.log2_prefix_.back() + lg);
            g.abs_log2_prefix_.push_back(g.abs_log2_prefix_.back() + std::fabs(lg));
        }
        return g;
    }

    std::size_t declared_horizon() const { return values_.size(); }
    const std::vector<Rational>& values() const { return values_; }

    const Rational& value_at(std::size_t n) const {
        if (n >= values_.size())
            throw IndexBeyondMaterialized("index " + std::to_string(n) +
                                          " beyond declared horizon " +
                                          std::to_string(values_.size()));
        return values_[n];
    }

    double log2_partial(std::size_t i, std::size_t j) const {
        return log2_prefix_[i + j] - log2_prefix_[i];
    }

    double err_bound(std::size_t i, std::size_t j) const {
        double mass = abs_log2_prefix_[i + j] - abs_log2_prefix_[i];
        return (mass + static_cast<double>(j)) * std::numeric_limits<double>::epsilon();
    }

  private:
    std::vector<Rational> values_;
    std::vector<double> log2_prefix_;
    std::vector<double> abs_log2_prefix_;
};

inline ProductValue partial_product_general(const GeneralWeights& w, std::size_t i,
                                            std::size_t j) {
    if (i < 1) throw PreconditionViolation("partial products require i >= 1");
    if (j > 0 && i + j > w.declared_horizon())
        throw IndexBeyondMaterialized("product reaches index " + std::to_string(i + j - 1) +
                                      ", beyond declared horizon " +
                                      std::to_string(w.declared_horizon()));
    if (j == 0) return LogSpace{0.0, 0.0};
    return LogSpace{w.log2_partial(i, j), w.err_bound(i, j)};
}

// Surjectivity criterion: B_w is surjective iff sup 1/w_n < ∞, i.e. the
// weights are bounded below. Finite data can only bound the materialized
// stretch, so the verdict is horizon-qualified; the construction overload in
// construction.hpp upgrades to HoldsExactly via the block-value invariant.
inline Verdict is_surjective_shift(const RunLengthWeights& w) {
    Verdict v;
    BigInt min_e = rle::min_entry_exponent(w.root().get());
    v.status = VerdictStatus::HoldsUpToHorizon;
    v.horizon = w.total_length();
    v.witness["min_exponent"] = to_decimal(min_e);
    v.witness["sup_inverse_weight_log2"] = to_decimal(-min_e);
    v.narrative = "weights bounded below by 2^" + to_decimal(min_e) +
                  " on the materialized range";
    return v;
}

inline Verdict is_surjective_shift(const GeneralWeights& w) {
    Verdict v;
    std::size_t argmin = 0;
    std::size_t first_half_argmin = 0;
    for (std::size_t n = 1; n < w.declared_horizon(); ++n) {
        if (w.values()[n] < w.values()[argmin]) argmin = n;
        if (n < w.declared_horizon() / 2 && w.values()[n] < w.values()[first_half_argmin])
            first_half_argmin = n;
    }
    const Rational& m = w.values()[argmin];
    v.horizon = BigInt(w.declared_horizon());
    v.witness["min_value"] = format_rational(m);
    v.witness["argmin"] = std::to_string(argmin);
    v.witness["finite_horizon"] = true;
    bool still_sinking = argmin >= (w.declared_horizon() * 3) / 4 &&
                         m < w.values()[first_half_argmin];
    if (still_sinking) {
        v.status = VerdictStatus::EvidenceAgainst;
        v.narrative = "weights keep decreasing through the horizon; inf may be 0";
    } else {
        v.status = VerdictStatus::HoldsUpToHorizon;
        v.narrative = "weights bounded below by " + format_rational(m) + " up to the horizon";
    }
    return v;
}

// --- JSON file formats -----------------------------------------------------
// Weight sequence: {"kind": "dyadic_runs", "runs": [[e, len], …]}
//               or {"kind": "general", "values": ["p/q", …]}
// Numbers may be JSON integers or decimal strings (big values need strings).

inline BigInt parse_big_json(const nlohmann::json& j, const char* what) {
    if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
    if (j.is_string()) return parse_big(j.get<std::string>());
    throw ParseError(std::string("expected integer or decimal string for ") + what);
}

struct WeightsFile {
    std::variant<RunLengthWeights, GeneralWeights> seq;

    bool is_dyadic() const { return std::holds_alternative<RunLengthWeights>(seq); }
    const RunLengthWeights& dyadic() const { return std::get<RunLengthWeights>(seq); }
    const GeneralWeights& general() const { return std::get<GeneralWeights>(seq); }
};

inline WeightsFile weights_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw ParseError("weight file must be an object with a \"kind\" field");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "dyadic_runs") {
        if (!j.contains("runs") || !j.at("runs").is_array())
            throw ParseError("dyadic_runs file needs a \"runs\" array");
        std::vector<DyadicRun> runs;
        for (const auto& item : j.at("runs")) {
            if (!item.is_array() || item.size() != 2)
                throw ParseError("each run must be a [exponent, length] pair");
            BigInt e = parse_big_json(item[0], "run exponent");
            BigInt len = parse_big_json(item[1], "run length");
            if (len <= 0) throw ParseError("run length must be >= 1");
            runs.push_back({e, len});
        }
        return WeightsFile{RunLengthWeights::from_runs(std::move(runs))};
    }
    if (kind == "general") {
        if (!j.contains("values") || !j.at("values").is_array())
            throw ParseError("general weight file needs a \"values\" array");
        std::vector<Rational> values;
        for (const auto& item : j.at("values")) {
            if (item.is_number_integer())
                values.emplace_back(BigInt(item.get<std::int64_t>()));
            else if (item.is_string())
                values.push_back(parse_rational(item.get<std::string>()));
            else
                throw ParseError("weights must be rational strings or integers");
        }
        return WeightsFile{GeneralWeights::from_values(std::move(values))};
    }
    throw ParseError("unknown weight file kind: '" + kind + "'");
}

inline nlohmann::json runs_to_json(const std::vector<DyadicRun>& runs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : runs)
        arr.push_back({to_decimal(r.exponent), to_decimal(r.length)});
    return nlohmann::json{{"kind", "dyadic_runs"}, {"runs", arr}};
}

inline nlohmann::json weights_to_json(const RunLengthWeights& w,
                                      std::size_t max_runs = 1u << 20) {
    return runs_to_json(w.flatten(max_runs));
}

inline nlohmann::json weights_to_json(const GeneralWeights& w) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& v : w.values()) arr.push_back(format_rational(v));
    return nlohmann::json{{"kind", "general"}, {"values", arr}};
}

}  // namespace shiftlab
