#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sospex/instance.hpp"
#include "sospex/subgraph.hpp"

namespace sospex {

struct TwiseViolation {
    std::vector<int> coords;  // offending t-subset
    std::vector<int> cell;    // cell whose mass is wrong
    Rat mass;                 // observed (expected q^-t)
};

// Exact check over all C(k,t) * q^t marginal cells; nullopt means t-wise
// uniform.
std::optional<TwiseViolation> twise_check(const RationalDistribution& mu, int t);

struct OptResult {
    Rat opt;                   // max fraction of satisfied constraints
    std::vector<int> argmax;   // witnessing assignment
    std::string method;
};

// Exhaustive maximum over all q^n assignments. The parallel kernel splits
// the assignment space into blocks; ties broken toward the smallest
// assignment index, so the result is independent of the thread count.
OptResult brute_opt(const Instance& inst, std::uint64_t budget = (1ULL << 26));
// Serial reference walking assignments in Gray-code order with incremental
// constraint re-evaluation; kept for testing the parallel kernel against.
OptResult brute_opt_serial(const Instance& inst, std::uint64_t budget = (1ULL << 26));

// Gaussian elimination over GF(q), q prime; requires every constraint to be
// an affine equation (detected from the predicate tables).
bool xor_satisfiable(const Instance& inst);

// Exact marginal of the planted distribution on H over the variables T, by
// direct enumeration of all weighted suggestion tuples. Independent oracle
// for planted_marginal.
RationalDistribution marginal_bruteforce(const Instance& inst, const Subgraph& H,
                                         const std::vector<int>& T, long budget = 10000000L);

}  // namespace sospex
