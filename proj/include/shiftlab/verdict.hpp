#pragma once

#include <string>

#include <json.hpp>

#include "shiftlab/bigmath.hpp"

namespace shiftlab {

// Every checkable claim returns one of these, never a bare bool: exact
// finite claims either hold exactly or fail with a witness, horizon-bounded
// claims say so, and asymptotic claims only ever earn evidence language.
enum class VerdictStatus {
    HoldsExactly,
    HoldsUpToHorizon,
    FailsWithWitness,
    EvidenceFor,
    EvidenceAgainst,
    Inconclusive,
};

inline const char* verdict_status_name(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::HoldsExactly: return "HoldsExactly";
        case VerdictStatus::HoldsUpToHorizon: return "HoldsUpToHorizon";
        case VerdictStatus::FailsWithWitness: return "FailsWithWitness";
        case VerdictStatus::EvidenceFor: return "EvidenceFor";
        case VerdictStatus::EvidenceAgainst: return "EvidenceAgainst";
        case VerdictStatus::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

struct Verdict {
    VerdictStatus status = VerdictStatus::Inconclusive;
    // Largest index/time the claim was checked to; 0 when not horizon-bound.
    BigInt horizon = 0;
    // Structured payload: witnesses, extrema, record tables. Shape is stable
    // per producing operation and documented alongside it.
    nlohmann::json witness = nlohmann::json::object();
    std::string narrative;

    bool failed() const { return status == VerdictStatus::FailsWithWitness; }
    bool holds() const {
        return status == VerdictStatus::HoldsExactly || status == VerdictStatus::HoldsUpToHorizon;
    }
};

}  // namespace shiftlab
