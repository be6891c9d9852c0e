#pragma once

#include <string>
#include <vector>

#include "sospex/rational.hpp"

namespace sospex {

// Construction parameters. The theorem-regime constraints (K <= zeta*SMALL,
// D <= zeta*SMALL/3, SMALL <= n/2) are surfaced by theorem_violations();
// suggest_parameters enforces them, hand-built desk-scale parameter sets may
// violate them knowingly.
struct Params {
    int tau = 3;
    Rat zeta;
    long SMALL = 0;
    int D = 0;
    Rat beta;
    Rat eps;   // refutation-strength slack; dyadic approximation unless exact
    int K = 3; // max constraint arity
    // The analysis hides an unspecified O(1) exponent; we compute SMALL
    // directly from the counting inequality instead, so this is surfaced
    // only for reporting.
    int gamma_exponent_constant = 1;

    int lambda() const { return tau - 2; }
    Rat degree_cap() const { return zeta * Rat(SMALL); }  // multilinear-degree cap
    std::vector<std::string> theorem_violations(long n) const;
    void validate_basic() const;  // tau >= 3, 0 < zeta, SMALL >= 1, D >= 0
};

// Exact check of the counting inequality
//   20^K * Delta * (K c / n)^((lambda - zeta)/2)  <=  beta / 50^K
// by clearing the rational exponent: both sides are raised to twice the
// denominator of (lambda - zeta) and compared as exact rationals.
bool weirdness_holds(long c, long n, const Rat& delta, int K, int lambda, const Rat& zeta,
                     const Rat& beta);

// floor(scale * log2(x)) computed exactly by integer comparisons.
long floor_scaled_log2(const Rat& x, long scale);

// 2^(log2 n / (2 log2 Delta)) / sqrt(n): exact when an integer power
// relation ties n to Delta and n is a perfect square, dyadic approximation
// otherwise (advisory).
Rat eps_estimate(long n, const Rat& delta);

enum class ParamMode { General, LargeLambda };

// mode General: zeta ~ 1/log2(Delta) (a small-denominator rational
// approximation, kept exact thereafter); mode LargeLambda: zeta = lambda/2.
// SMALL is the largest value for which the counting inequality holds at
// c = 2*SMALL, clamped to n/2; D = floor(zeta*SMALL/3);
// eps = 2^(log2 n/(2 log2 Delta)) / sqrt(n), exact when n is a perfect
// square and an integer power relation ties n to Delta, dyadic otherwise.
Params suggest_parameters(long n, const Rat& delta, int K, int tau, const Rat& beta,
                          ParamMode mode);

std::string params_to_json(const Params& p);
Params params_from_json(const std::string& text);

}  // namespace sospex
