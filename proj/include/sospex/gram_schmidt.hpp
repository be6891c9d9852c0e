#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "sospex/pexp.hpp"

namespace sospex {

struct GSOptions {
    bool track_witnesses = false;
    long support_cap = 500000;    // total monomial count across basis polynomials
    long witness_budget = 200000; // closure extensions during witness tracking
};

// State of the modified orthogonalization under <p,q> = E~[pq]. Square roots
// never appear: each stage keeps the unnormalized y_S plus its pseudo-norm
// n_S = E~[y_S^2], and projections use E~[y.y_T]/n_T. The formally
// normalized z_S = y_S/sqrt(n_S) exists only on paper.
struct GSState {
    std::vector<MonomialIndex> order;                 // stage order, degree <= D
    std::map<MonomialIndex, Polynomial> y;
    std::map<MonomialIndex, Rat> norm2;
    std::set<MonomialIndex> pvz;                      // stages with E~[y^2] = 0
    std::map<MonomialIndex, std::vector<MonomialIndex>> projected_onto;  // nonzero coefficients
    std::map<MonomialIndex, Subgraph> witness;        // per-stage witness when tracked
    bool success = true;
    std::string failure;                              // first positive-definiteness problem
    std::vector<std::string> witness_violations;      // empirical bound failures
    long substages = 0;
    int D = 0;
};

// Runs every substage in order. A positive-definiteness problem is
// E~[y^2] < 0 at any substage, or a projection onto a pseudovariance-zero
// stage with nonzero coefficient; problems are recorded and the run
// continues so the trace is complete.
GSState gs_run(PseudoExpectation& pe, int D, const GSOptions& opts = {});

// Exact verification: pairwise E~[y_S y_T] = 0, recomputed norms match,
// norms are >= 0 with PvZ exactly the zero set, and each y_S is x^S minus a
// combination of strictly earlier monomials (unit triangular change of
// basis, which gives span equality).
bool gs_orthogonality_check(const GSState& st, PseudoExpectation& pe,
                            std::string* first_violation = nullptr);

// W union cl(vbls+(W) union T); records revenue/size bound violations into
// the supplied list rather than failing (they would contradict the
// correlation-witness lemma, so tests watch for them).
Subgraph witness_extend(const Subgraph& W, const std::set<int>& T, PseudoExpectation& pe,
                        int D, std::vector<std::string>* violations = nullptr);

}  // namespace sospex
