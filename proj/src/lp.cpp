#include "sospex/lp.hpp"

#include <stdexcept>

namespace sospex {

void LinearProgram::add_row(std::vector<Rat> coeffs, Rel rel, Rat b) {
    if (static_cast<int>(coeffs.size()) != num_vars)
        throw std::invalid_argument("LinearProgram::add_row: wrong width");
    rows.push_back(std::move(coeffs));
    rels.push_back(rel);
    rhs.push_back(std::move(b));
}

void LinearProgram::validate() const {
    if (static_cast<int>(objective.size()) != num_vars)
        throw std::invalid_argument("LinearProgram: bad objective width");
    if (rows.size() != rels.size() || rows.size() != rhs.size())
        throw std::invalid_argument("LinearProgram: inconsistent row data");
    for (const auto& r : rows)
        if (static_cast<int>(r.size()) != num_vars)
            throw std::invalid_argument("LinearProgram: bad row width");
}

namespace {

// Dense two-phase tableau. Columns: structural | slack/surplus | artificial
// (one artificial per row). Basic columns are kept as unit columns.
struct Tableau {
    int m;       // rows
    int nstruct; // structural columns
    int nslack;
    int ncols;   // total columns excluding rhs
    std::vector<std::vector<Rat>> t;  // m rows of ncols+1 (last = rhs)
    std::vector<Rat> obj;             // reduced costs, ncols+1 (last = value)
    std::vector<int> basis;           // per row, basic column
    std::vector<bool> flipped;        // row sign-normalized?
    long pivots = 0;
    long max_pivots;

    explicit Tableau(const LinearProgram& lp, long cap) : max_pivots(cap) {
        m = static_cast<int>(lp.rows.size());
        nstruct = lp.num_vars;
        nslack = 0;
        for (Rel r : lp.rels)
            if (r != Rel::Eq) ++nslack;
        ncols = nstruct + nslack + m;
        t.assign(m, std::vector<Rat>(ncols + 1, Rat(0)));
        flipped.assign(m, false);
        int slack_at = nstruct;
        for (int i = 0; i < m; ++i) {
            Rat b = lp.rhs[i];
            Rel rel = lp.rels[i];
            bool flip = b < 0;
            flipped[i] = flip;
            for (int j = 0; j < nstruct; ++j) t[i][j] = flip ? -lp.rows[i][j] : lp.rows[i][j];
            if (flip) {
                b = -b;
                if (rel == Rel::Le) rel = Rel::Ge;
                else if (rel == Rel::Ge) rel = Rel::Le;
            }
            if (rel != Rel::Eq) {
                t[i][slack_at] = (rel == Rel::Le) ? Rat(1) : Rat(-1);
                ++slack_at;
            }
            t[i][nstruct + nslack + i] = 1;  // artificial
            t[i][ncols] = b;
        }
        basis.resize(m);
        for (int i = 0; i < m; ++i) basis[i] = nstruct + nslack + i;
    }

    bool is_artificial(int col) const { return col >= nstruct + nslack; }

    void pivot(int r, int s) {
        if (++pivots > max_pivots) throw std::runtime_error("lp_solve: iteration cap exceeded");
        Rat inv = 1 / t[r][s];
        for (int j = 0; j <= ncols; ++j) t[r][j] *= inv;
        for (int i = 0; i < m; ++i) {
            if (i == r || t[i][s] == 0) continue;
            Rat f = t[i][s];
            for (int j = 0; j <= ncols; ++j) t[i][j] -= f * t[r][j];
        }
        if (obj[s] != 0) {
            Rat f = obj[s];
            for (int j = 0; j <= ncols; ++j) obj[j] -= f * t[r][j];
        }
        basis[r] = s;
    }

    // Bland's rule: smallest eligible entering index; among tied leaving rows,
    // the one whose basic variable has the smallest index. Prevents cycling.
    // Returns false when the objective is unbounded below.
    bool run(bool allow_artificial_entering) {
        while (true) {
            int s = -1;
            for (int j = 0; j < ncols; ++j) {
                if (!allow_artificial_entering && is_artificial(j)) continue;
                if (obj[j] < 0) { s = j; break; }
            }
            if (s < 0) return true;
            int r = -1;
            Rat best;
            for (int i = 0; i < m; ++i) {
                if (t[i][s] <= 0) continue;
                Rat ratio = t[i][ncols] / t[i][s];
                if (r < 0 || ratio < best || (ratio == best && basis[i] < basis[r])) {
                    r = i;
                    best = ratio;
                }
            }
            if (r < 0) return false;
            pivot(r, s);
        }
    }

    // Reduced costs for cost vector c over all columns (artificials cost 0),
    // given the current basis.
    void set_objective(const std::vector<Rat>& cost) {
        obj.assign(ncols + 1, Rat(0));
        for (int j = 0; j < ncols; ++j) obj[j] = j < static_cast<int>(cost.size()) ? cost[j] : Rat(0);
        obj[ncols] = 0;
        for (int i = 0; i < m; ++i) {
            Rat cb = basis[i] < static_cast<int>(cost.size()) ? cost[basis[i]] : Rat(0);
            if (cb == 0) continue;
            for (int j = 0; j <= ncols; ++j) obj[j] -= cb * t[i][j];
        }
    }
};

}  // namespace

LpResult lp_solve(const LinearProgram& lp, long max_pivots) {
    lp.validate();
    LpResult res;
    Tableau tab(lp, max_pivots);
    int m = tab.m;

    // Phase 1: minimize the sum of artificials.
    std::vector<Rat> phase1_cost(tab.ncols, Rat(0));
    for (int j = tab.nstruct + tab.nslack; j < tab.ncols; ++j) phase1_cost[j] = 1;
    tab.set_objective(phase1_cost);
    tab.run(true);
    Rat infeas = -tab.obj[tab.ncols];  // current phase-1 objective value

    if (infeas > 0) {
        res.status = LpStatus::Infeasible;
        // Multipliers come off the artificial columns: reduced cost there is
        // 1 - y_i for the sign-normalized system.
        res.farkas.resize(m);
        for (int i = 0; i < m; ++i) {
            Rat y = 1 - tab.obj[tab.nstruct + tab.nslack + i];
            res.farkas[i] = tab.flipped[i] ? -y : y;
        }
        res.pivots = tab.pivots;
        return res;
    }

    // Drive any artificial still basic (at value 0) out of the basis; a row
    // with no non-artificial pivot candidate is redundant and can stay.
    for (int i = 0; i < m; ++i) {
        if (!tab.is_artificial(tab.basis[i])) continue;
        for (int j = 0; j < tab.nstruct + tab.nslack; ++j) {
            if (tab.t[i][j] != 0) {
                tab.pivot(i, j);
                break;
            }
        }
    }

    // Phase 2 on the real objective; artificials are barred from entering.
    std::vector<Rat> cost(tab.ncols, Rat(0));
    for (int j = 0; j < tab.nstruct; ++j) cost[j] = lp.objective[j];
    tab.set_objective(cost);
    if (!tab.run(false)) {
        res.status = LpStatus::Unbounded;
        res.pivots = tab.pivots;
        return res;
    }

    res.status = LpStatus::Optimal;
    res.optimum = -tab.obj[tab.ncols];
    res.primal.assign(tab.nstruct, Rat(0));
    for (int i = 0; i < m; ++i) {
        if (tab.basis[i] < tab.nstruct) res.primal[tab.basis[i]] = tab.t[i][tab.ncols];
        if (!tab.is_artificial(tab.basis[i])) res.basis.push_back(tab.basis[i]);
    }
    res.pivots = tab.pivots;
    return res;
}

bool farkas_valid(const LinearProgram& lp, const std::vector<Rat>& y) {
    if (y.size() != lp.rows.size()) return false;
    for (size_t i = 0; i < y.size(); ++i) {
        if (lp.rels[i] == Rel::Le && y[i] > 0) return false;
        if (lp.rels[i] == Rel::Ge && y[i] < 0) return false;
    }
    // y^T A <= 0 componentwise and y^T b > 0 makes Ax R b, x >= 0 impossible.
    for (int j = 0; j < lp.num_vars; ++j) {
        Rat col(0);
        for (size_t i = 0; i < y.size(); ++i) col += y[i] * lp.rows[i][j];
        if (col > 0) return false;
    }
    Rat yb(0);
    for (size_t i = 0; i < y.size(); ++i) yb += y[i] * lp.rhs[i];
    return yb > 0;
}

}  // namespace sospex
