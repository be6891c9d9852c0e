#pragma once

#include <vector>

#include "sospex/poly.hpp"
#include "sospex/subgraph.hpp"

namespace sospex {

// The planted distribution on a subgraph H: each constraint of H draws a
// suggestion from mu_f; condition on all suggestions agreeing at the edges
// of H; variables outside H are uniform. Operations here are exact.

// Pr[suggestions consistent] = q^(v - e). With debug_enumerate the same
// value is recomputed by enumerating weighted suggestion tuples and the two
// results are asserted equal.
Rat consistency_probability(const Instance& inst, const Subgraph& H, bool debug_enumerate = false,
                            long budget = 10000000L);

// Exact marginal of eta_H on the variables T (strictly increasing), computed
// by sequential variable elimination over the per-constraint edge factors.
RationalDistribution planted_marginal(const Instance& inst, const Subgraph& H,
                                      const std::vector<int>& T, long budget = 10000000L);

// E_{eta_H}[p] for a polynomial over indicator monomials.
Rat planted_expectation(const Instance& inst, const Subgraph& H, const Polynomial& p,
                        long budget = 10000000L);

// Rejection sampler from eta_H; the Monte Carlo oracle for marginals.
// Throws after max_rejections with the observed acceptance-rate estimate.
std::vector<int> sample_planted(const Instance& inst, const Subgraph& H, Rng& rng,
                                long max_rejections = 1000000L);

}  // namespace sospex
