#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "sospex/closure.hpp"
#include "sospex/params.hpp"
#include "sospex/planted.hpp"
#include "sospex/poly.hpp"

namespace sospex {

struct PexpOptions {
    long closure_budget = 5000000L;
    long planted_budget = 10000000L;
    bool enforce_degree_cap = true;  // reject monomials with more than zeta*SMALL variables
};

// The pseudoexpectation: E~[M] = E_{cl(vbls(M))}[M] on multilinear monomials,
// extended linearly. Values are cached; the cache is safe for concurrent
// use (idempotent recomputation, locked map).
class PseudoExpectation {
public:
    PseudoExpectation(const Instance& inst, Params params, PexpOptions opts = {});

    const Instance& instance() const { return *inst_; }
    const FactorGraph& graph() const { return graph_; }
    const Params& params() const { return params_; }
    ClosureCache& closures() { return closure_cache_; }

    Rat monomial(const MonomialIndex& M);
    Rat eval(const Polynomial& p);
    // Cross-check path: evaluate the whole polynomial under the single joint
    // closure cl(vbls(p)) instead of per-monomial closures.
    Rat eval_joint(const Polynomial& p);

    long cache_size() const;
    // Fault injection for the verification tests: overwrite one cached value.
    void override_cached_value(const MonomialIndex& M, const Rat& value);

private:
    const Instance* inst_;
    FactorGraph graph_;
    Params params_;
    PexpOptions opts_;
    ClosureCache closure_cache_;
    mutable std::mutex mu_;
    std::map<MonomialIndex, Rat> cache_;
};

struct MomentMatrix {
    std::vector<MonomialIndex> index;        // degree <= D, stage order
    std::vector<std::vector<Rat>> entries;   // symmetric; (i,j) = E~[x^Si * x^Sj]
    int D = 0;
};

// All monomial indices of degree <= D over the values 1..q-1, in stage
// order. Value 0 is expressible through sum_c x^{=c} = 1, an identity the
// pseudoexpectation satisfies exactly, so positivity over this index set is
// positivity over all degree-D polynomials.
std::vector<MonomialIndex> moment_index_set(int n, int q, int D);

// Conflicting row pairs appear as distinct rows with zero products.
MomentMatrix moment_matrix(PseudoExpectation& pe, int D, bool parallel = true);
MomentMatrix moment_matrix_serial(PseudoExpectation& pe, int D);

struct PsdResult {
    bool psd = false;
    // L D L^T factorization certificate (unit lower triangular L, pivots).
    std::vector<std::vector<Rat>> L;
    std::vector<Rat> pivots;
    // When not PSD: an exact vector with v^T M v < 0.
    std::vector<Rat> counterexample;
    Rat counterexample_value;
};

// Exact rational LDL^T; accepts iff all pivots are >= 0 and any zero pivot
// has an all-zero row at its elimination step.
PsdResult psd_check_exact(const MomentMatrix& M);

struct PsdFloatResult {
    bool psd_advisory = false;
    double min_pivot = 0.0;
};

// Double-precision advisory check for matrices too large to factor exactly.
PsdFloatResult psd_check_float(const MomentMatrix& M, double tol = 1e-9);

struct IdentityReport {
    bool passed = true;
    long identities_checked = 0;
    long products_checked = 0;
    std::string first_violation;
    Rat first_residual;
};

// Verifies, for every q with deg(p) + deg(q) <= D:
//   sum_c x_i^{=c} = 1 for all i, x^2 = x (syntactic under multilinear
//   storage, checked via squared evaluations), and the constraint-support
//   identities s_f = 1.
IdentityReport identity_check(PseudoExpectation& pe, int D);

struct SatFraction {
    Rat value;              // E~[fraction of satisfied constraints]
    long census = 0;        // #{f : cl(N(f)) != H_f}
    Rat delta_max;          // max_f mass of mu_f off f's satisfying set
    Rat bound;              // 1 - delta - census/m
    bool inequality_holds = false;
};

SatFraction satisfied_fraction(PseudoExpectation& pe);

std::string moment_matrix_to_json(const MomentMatrix& M);
std::string moment_matrix_to_csv(const MomentMatrix& M);  // float advisory export

}  // namespace sospex
