#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sospex/lp.hpp"
#include "sospex/predicate.hpp"

namespace sospex {

// min over t-wise uniform mu of the mass mu places outside P's satisfying
// set, together with an attaining witness. Equals the total-variation
// distance from P to supporting a t-wise uniform distribution: a supported
// sigma can always match mu on the satisfying assignments.
struct DeltaResult {
    Rat value;
    RationalDistribution witness;
    std::vector<int> basis;  // optimal simplex basis, the dual-side certificate
    long pivots = 0;
};

DeltaResult delta(const Predicate& P, int t);

struct SupportResult {
    bool feasible = false;               // <=> delta value is exactly 0
    RationalDistribution witness;        // valid when feasible
    Rat delta_value;                     // positive optimum certifies infeasibility
    std::vector<int> basis;
};

SupportResult supports_twise(const Predicate& P, int t);

struct ComplexityResult {
    std::optional<int> value;            // min tau in [3,k] failing, or none
    std::vector<int> failures_below_3;   // informational: t in {1,2} already failing
};

// Scans tau = 3..k; requires a nontrivial predicate.
ComplexityResult complexity(const Predicate& P);

struct TwiseRecord {
    int t = 0;
    bool feasible = false;
    Rat delta_value;
    std::optional<RationalDistribution> witness;
    std::vector<int> basis;
};

struct TwiseReport {
    std::string predicate_json;
    std::vector<TwiseRecord> records;    // t = 1..k
    ComplexityResult complexity;
};

TwiseReport analyze_predicate(const Predicate& P);
std::string twise_report_to_json(const TwiseReport& rep);

// The LP behind delta(P, t), exposed for cross-checks in tests.
LinearProgram delta_lp(const Predicate& P, int t);

}  // namespace sospex
