#pragma once

#include <vector>

#include "sospex/rational.hpp"

namespace sospex {

enum class Rel { Le, Eq, Ge };
enum class LpStatus { Optimal, Infeasible, Unbounded };

// min c^T x  subject to  A x {<=,=,>=} b,  x >= 0, all coefficients rational.
struct LinearProgram {
    int num_vars = 0;
    std::vector<std::vector<Rat>> rows;
    std::vector<Rel> rels;
    std::vector<Rat> rhs;
    std::vector<Rat> objective;

    void add_row(std::vector<Rat> coeffs, Rel rel, Rat b);
    void validate() const;
};

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Rat optimum;
    std::vector<Rat> primal;   // length num_vars when Optimal
    // Infeasible: multipliers y on the original rows, with y_i <= 0 for Le
    // rows, >= 0 for Ge rows, free for Eq rows, such that the aggregated
    // constraint y^T A x >= y^T b has y^T A <= 0 componentwise and y^T b > 0.
    std::vector<Rat> farkas;
    std::vector<int> basis;    // optimal basis, structural-variable indices < num_vars
    long pivots = 0;
};

// Exact two-phase simplex with Bland's rule; no floating point anywhere.
LpResult lp_solve(const LinearProgram& lp, long max_pivots = 2000000);

// Check a Farkas certificate against the original constraints.
bool farkas_valid(const LinearProgram& lp, const std::vector<Rat>& y);

}  // namespace sospex
