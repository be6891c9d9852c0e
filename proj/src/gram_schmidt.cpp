#include "sospex/gram_schmidt.hpp"

#include <algorithm>
#include <stdexcept>

namespace sospex {

namespace {

long poly_support(const Polynomial& p) { return static_cast<long>(p.coef.size()); }

Subgraph isolated_witness(const std::set<int>& vars) {
    Subgraph W;
    for (int v : vars) W.add_isolated(v);
    return W;
}

struct WitnessTracker {
    PseudoExpectation* pe;
    const GSState* st;
    int D;
    long budget;
    long used = 0;
    std::vector<std::string>* violations;

    // Walk the recorded projection chain of stage T, growing W.
    Subgraph extend_through_stage(const MonomialIndex& T, Subgraph W) {
        auto it = st->projected_onto.find(T);
        if (it == st->projected_onto.end()) return W;
        for (const MonomialIndex& T2 : it->second) {
            W = witness_extend(W, T2.var_set(), *pe, D, violations);
            if (++used > budget) throw std::runtime_error("gs witness tracking: budget exceeded");
            W = extend_through_stage(T2, W);
        }
        return W;
    }
};

}  // namespace

Subgraph witness_extend(const Subgraph& W, const std::set<int>& T, PseudoExpectation& pe, int D,
                        std::vector<std::string>* violations) {
    std::set<int> S = W.vbls_plus();
    S.insert(T.begin(), T.end());
    ClosureResult cl = pe.closures().get_or_compute(pe.graph(), S, pe.params().tau,
                                                    pe.params().SMALL, pe.params().zeta);
    Subgraph out = Subgraph::unite(W, cl.cl);
    Accounting acc = account(out, pe.params().tau, pe.params().zeta);
    if (violations) {
        if (acc.revenue > Rat(2 * D))
            violations->push_back("witness revenue " + rat_to_string(acc.revenue) + " > 2D after " +
                                  out.to_string());
        if (out.cons_count() > pe.params().SMALL)
            violations->push_back("witness has " + std::to_string(out.cons_count()) +
                                  " constraints > SMALL");
    }
    return out;
}

GSState gs_run(PseudoExpectation& pe, int D, const GSOptions& opts) {
    GSState st;
    st.D = D;
    st.order = moment_index_set(pe.instance().n, pe.instance().q, D);

    long total_support = 0;
    auto note_problem = [&](const std::string& msg) {
        if (st.success) {
            st.success = false;
            st.failure = msg;
        }
    };

    for (size_t si = 0; si < st.order.size(); ++si) {
        const MonomialIndex& S = st.order[si];
        Polynomial y;
        Rat n2;
        if (S.degree() == 0) {
            y = Polynomial::constant(Rat(1));
            n2 = 1;
        } else {
            // Substage (S, empty): center the monomial.
            y = Polynomial::monomial(S) - Polynomial::constant(pe.monomial(S));
            n2 = pe.eval(y * y);
            if (n2 < 0)
                note_problem("E~[y^2] < 0 at substage (" + S.to_string() + ", 1)");
            ++st.substages;
            for (size_t ti = 1; ti < si; ++ti) {
                const MonomialIndex& T = st.order[ti];
                ++st.substages;
                Rat inner = pe.eval(y * st.y.at(T));
                if (st.pvz.count(T)) {
                    if (inner != 0)
                        note_problem("pseudovariance-zero problem: E~[y_{" + S.to_string() +
                                     "} y_{" + T.to_string() + "}] = " + rat_to_string(inner));
                    continue;  // z_T = y_T, no projection possible
                }
                if (inner == 0) continue;
                Rat coef = inner / st.norm2.at(T);
                y = y - st.y.at(T) * coef;
                st.projected_onto[S].push_back(T);
                n2 = pe.eval(y * y);
                if (n2 < 0)
                    note_problem("E~[y^2] < 0 at substage (" + S.to_string() + ", " +
                                 T.to_string() + ")");
                total_support += poly_support(y);
                if (total_support > opts.support_cap)
                    throw std::runtime_error("gs_run: support cap exceeded");
            }
        }
        st.y[S] = y;
        st.norm2[S] = n2;
        if (n2 == 0 && S.degree() > 0) st.pvz.insert(S);
    }

    if (opts.track_witnesses) {
        WitnessTracker tracker{&pe, &st, D, opts.witness_budget, 0, &st.witness_violations};
        for (const MonomialIndex& S : st.order) {
            if (S.degree() == 0) continue;
            Subgraph W = isolated_witness(S.var_set());
            auto it = st.projected_onto.find(S);
            if (it != st.projected_onto.end()) {
                for (const MonomialIndex& T : it->second) {
                    W = witness_extend(W, T.var_set(), pe, D, &st.witness_violations);
                    if (++tracker.used > tracker.budget)
                        throw std::runtime_error("gs witness tracking: budget exceeded");
                    W = tracker.extend_through_stage(T, W);
                }
            }
            // The witness must cover the support of the finished polynomial.
            std::set<int> got = W.vbls_plus();
            for (int v : st.y.at(S).vbls()) {
                if (!got.count(v)) {
                    st.witness_violations.push_back("witness for " + S.to_string() +
                                                    " misses variable " + std::to_string(v));
                    break;
                }
            }
            st.witness[S] = std::move(W);
        }
    }
    return st;
}

bool gs_orthogonality_check(const GSState& st, PseudoExpectation& pe,
                            std::string* first_violation) {
    auto fail = [&](const std::string& msg) {
        if (first_violation) *first_violation = msg;
        return false;
    };
    for (size_t i = 0; i < st.order.size(); ++i) {
        const MonomialIndex& S = st.order[i];
        const Polynomial& yS = st.y.at(S);
        // Triangularity: leading coefficient 1 on x^S, all other monomials
        // strictly earlier. Unit triangular change of basis gives
        // span(x^{S'} : S' <= S) = span(y_{S'} : S' <= S).
        if (S.degree() > 0) {
            auto it = yS.coef.find(S);
            if (it == yS.coef.end() || it->second != 1)
                return fail("y_" + S.to_string() + " lacks unit leading coefficient");
        }
        for (const auto& [m, c] : yS.coef) {
            (void)c;
            if (S < m) return fail("y_" + S.to_string() + " contains later monomial " + m.to_string());
        }
        Rat n2 = pe.eval(yS * yS);
        if (n2 != st.norm2.at(S))
            return fail("recorded norm2 of y_" + S.to_string() + " is stale");
        if (n2 < 0) return fail("negative pseudo-norm at " + S.to_string());
        if ((n2 == 0) != (st.pvz.count(S) > 0 || (S.degree() == 0 && false)))
            return fail("PvZ bookkeeping wrong at " + S.to_string());
        for (size_t j = i + 1; j < st.order.size(); ++j) {
            Rat inner = pe.eval(yS * st.y.at(st.order[j]));
            if (inner != 0)
                return fail("E~[y_" + S.to_string() + " y_" + st.order[j].to_string() +
                            "] = " + rat_to_string(inner));
        }
    }
    return true;
}

}  // namespace sospex
