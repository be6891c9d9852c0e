#pragma once

// Test-only oracles, independent of the production search and evaluation
// paths they cross-check.

#include <optional>
#include <vector>

#include "sospex/instance.hpp"
#include "sospex/lp.hpp"
#include "sospex/oracle.hpp"
#include "sospex/poly.hpp"
#include "sospex/subgraph.hpp"

namespace sospex::testing {

inline std::vector<std::pair<int, int>> all_edges(const Instance& inst) {
    std::vector<std::pair<int, int>> edges;  // (f, scope position)
    for (int f = 0; f < inst.m(); ++f)
        for (int pos = 0; pos < inst.constraints[f].arity(); ++pos) edges.emplace_back(f, pos);
    return edges;
}

// Every edge-induced subgraph via bitmask; only for instances with few edges.
template <typename Fn>
void for_each_subgraph(const Instance& inst, Fn&& fn) {
    auto edges = all_edges(inst);
    if (edges.size() > 20) throw std::runtime_error("for_each_subgraph: too many edges");
    for (std::uint32_t mask = 0; mask < (1u << edges.size()); ++mask) {
        Subgraph H;
        for (size_t i = 0; i < edges.size(); ++i)
            if (mask & (1u << i))
                H.add_edge(edges[i].first, inst.constraints[edges[i].first].scope[edges[i].second]);
        fn(H);
    }
}

// Minimum income over all nonempty tau-subgraphs with at most c_max
// constraints, by exhaustive enumeration.
inline std::optional<Rat> naive_min_income(const Instance& inst, int tau, const Rat& zeta,
                                           int c_max) {
    std::optional<Rat> best;
    for_each_subgraph(inst, [&](const Subgraph& H) {
        if (H.empty() || !is_tau_subgraph(H, tau) || H.cons_count() > c_max) return;
        Rat inc = account(H, tau, zeta).income;
        if (!best || inc < *best) best = inc;
    });
    return best;
}

// True when H contains no nonempty emptyset-closed tau-subgraph: peel H to
// its maximal leafless core. This is the hypothesis under which the
// suggestion-consistency probability collapses to q^(v-e).
inline bool has_no_closed_core(const Instance& inst, const Subgraph& H, int tau) {
    (void)inst;
    std::map<int, std::vector<int>> edges = H.edges;
    bool changed = true;
    while (changed) {
        changed = false;
        std::map<int, int> deg;
        for (const auto& [f, vars] : edges)
            for (int v : vars) ++deg[v];
        for (auto it = edges.begin(); it != edges.end();) {
            auto& [f, vars] = *it;
            std::vector<int> keep;
            for (int v : vars)
                if (deg[v] >= 2) keep.push_back(v);
            if (static_cast<int>(keep.size()) < tau) {
                it = edges.erase(it);
                changed = true;
            } else {
                if (keep.size() != vars.size()) changed = true;
                vars = std::move(keep);
                ++it;
            }
        }
    }
    return edges.empty();
}

// Union of all S-closed tau-subgraphs with at most SMALL constraints, by
// definition.
inline Subgraph naive_closure(const Instance& inst, const std::set<int>& S, int tau, long SMALL) {
    Subgraph acc;
    for_each_subgraph(inst, [&](const Subgraph& H) {
        if (!is_tau_subgraph(H, tau) || H.cons_count() > SMALL) return;
        for (const auto& [v, d] : H.var_degrees())
            if (d == 1 && !S.count(v)) return;  // leaf outside S
        acc = Subgraph::unite(acc, H);
    });
    return acc;
}

// delta_P(t) by its two-distribution definition: minimize the total
// variation distance between a t-wise uniform mu and a sigma supported on
// satisfying assignments. Independent of the single-LP reduction.
inline Rat delta_two_distribution_lp(const Predicate& P, int t) {
    int q = P.q();
    std::uint64_t N = table_size(q, P.k);
    // variables: mu (N), sigma (N), d (N) with d_z >= |mu_z - sigma_z|
    LinearProgram lp;
    lp.num_vars = static_cast<int>(3 * N);
    lp.objective.assign(3 * N, Rat(0));
    for (std::uint64_t z = 0; z < N; ++z) lp.objective[2 * N + z] = make_rat(1, 2);

    auto unit_row = [&](std::initializer_list<std::pair<std::uint64_t, Rat>> entries) {
        std::vector<Rat> row(3 * N, Rat(0));
        for (const auto& [idx, v] : entries) row[idx] = v;
        return row;
    };

    // d_z >= mu_z - sigma_z and d_z >= sigma_z - mu_z
    for (std::uint64_t z = 0; z < N; ++z) {
        lp.add_row(unit_row({{z, Rat(1)}, {N + z, Rat(-1)}, {2 * N + z, Rat(-1)}}), Rel::Le, Rat(0));
        lp.add_row(unit_row({{z, Rat(-1)}, {N + z, Rat(1)}, {2 * N + z, Rat(-1)}}), Rel::Le, Rat(0));
    }
    // normalization
    {
        std::vector<Rat> row(3 * N, Rat(0));
        for (std::uint64_t z = 0; z < N; ++z) row[z] = 1;
        lp.add_row(row, Rel::Eq, Rat(1));
        std::vector<Rat> row2(3 * N, Rat(0));
        for (std::uint64_t z = 0; z < N; ++z) row2[N + z] = 1;
        lp.add_row(row2, Rel::Eq, Rat(1));
    }
    // sigma supported on satisfying assignments
    for (std::uint64_t z = 0; z < N; ++z)
        if (!P.sat(z)) lp.add_row(unit_row({{N + z, Rat(1)}}), Rel::Eq, Rat(0));
    // mu t-wise uniform: every t-subset marginal cell
    std::vector<int> comb(t);
    auto rec = [&](auto&& self, int start, int depth) -> void {
        if (depth == t) {
            std::uint64_t cells = table_size(q, t);
            for (std::uint64_t a = 0; a < cells; ++a) {
                std::vector<int> av = index_to_tuple(a, q, t);
                std::vector<Rat> row(3 * N, Rat(0));
                for (std::uint64_t z = 0; z < N; ++z) {
                    std::vector<int> zv = index_to_tuple(z, q, P.k);
                    bool match = true;
                    for (int i = 0; i < t; ++i)
                        if (zv[comb[i]] != av[i]) { match = false; break; }
                    if (match) row[z] = 1;
                }
                lp.add_row(std::move(row), Rel::Eq, qpow(q, -t));
            }
            return;
        }
        for (int i = start; i < P.k; ++i) {
            comb[depth] = i;
            self(self, i + 1, depth + 1);
        }
    };
    rec(rec, 0, 0);

    LpResult r = lp_solve(lp);
    if (r.status != LpStatus::Optimal) throw std::runtime_error("two-distribution LP not optimal");
    return r.optimum;
}

// The subgraph-expansion formula for the unnormalized T-marginal of the
// planted distribution: q^(v_H - e_H - |T|) * sum over T-closed H' <= H of
// E_w E_{x|x_T} prod over edges of (q*1[w=x] - 1). Exponential in edges; for
// tiny H only.
inline Rat planted_marginal_expansion(const Instance& inst, const Subgraph& H,
                                      const std::vector<int>& T, const std::vector<int>& xT) {
    int q = inst.q;
    std::vector<std::pair<int, int>> hedges;  // (f, scope position)
    for (const auto& [f, vars] : H.edges)
        for (int v : vars) {
            int pos = -1;
            const auto& scope = inst.constraints[f].scope;
            for (size_t p = 0; p < scope.size(); ++p)
                if (scope[p] == v) pos = static_cast<int>(p);
            hedges.emplace_back(f, pos);
        }
    if (hedges.size() > 16) throw std::runtime_error("expansion: too many edges");

    std::set<int> hv = H.vbls();
    long v_H = static_cast<long>(hv.size());
    long e_H = static_cast<long>(hedges.size());

    Rat total(0);
    for (std::uint32_t mask = 0; mask < (1u << hedges.size()); ++mask) {
        // H' must be a tau-subgraph that is T-closed; tau-ness is enforced
        // implicitly by the vanishing of non-tau terms, so summing over all
        // T-closed edge subsets is also correct, but we keep the full sum
        // restricted the same way the derivation does: over T-closed subsets
        // with every constraint of positive degree.
        std::map<int, std::vector<int>> sel;  // f -> positions
        std::map<int, int> var_deg;
        for (size_t i = 0; i < hedges.size(); ++i) {
            if (!(mask & (1u << i))) continue;
            auto [f, pos] = hedges[i];
            sel[f].push_back(pos);
            ++var_deg[inst.constraints[f].scope[pos]];
        }
        bool t_closed = true;
        for (const auto& [v, d] : var_deg) {
            if (d == 1 && std::find(T.begin(), T.end(), v) == T.end()) {
                t_closed = false;
                break;
            }
        }
        if (!t_closed) continue;

        // E_w E_{x | x_T} prod (q*1[w_{f,i} = x_i] - 1): expand by
        // enumerating suggestions and the free x coordinates.
        std::vector<int> free_vars;
        for (const auto& [v, d] : var_deg) {
            (void)d;
            if (std::find(T.begin(), T.end(), v) == T.end()) free_vars.push_back(v);
        }
        Rat term(0);
        // enumerate suggestions per involved constraint over supp(mu_f)
        std::vector<int> fs;
        for (const auto& [f, poss] : sel) {
            (void)poss;
            fs.push_back(f);
        }
        std::vector<std::vector<std::uint64_t>> supp;
        for (int f : fs) {
            std::vector<std::uint64_t> s;
            const auto& mu = inst.constraints[f].mu;
            for (std::uint64_t idx = 0; idx < mu.probs.size(); ++idx)
                if (mu.probs[idx] > 0) s.push_back(idx);
            supp.push_back(std::move(s));
        }
        std::vector<std::uint64_t> pick(fs.size(), 0);
        auto rec2 = [&](auto&& self, size_t fi, Rat w) -> void {
            if (fi == fs.size()) {
                // enumerate free x coordinates uniformly
                Rat inner(0);
                std::map<int, int> xval;
                for (size_t ti = 0; ti < T.size(); ++ti) xval[T[ti]] = xT[ti];
                std::vector<int> fv = free_vars;
                auto rec3 = [&](auto&& self3, size_t vi, Rat wx) -> void {
                    if (vi == fv.size()) {
                        Rat prod(1);
                        for (size_t fj = 0; fj < fs.size(); ++fj) {
                            int f = fs[fj];
                            std::vector<int> wf =
                                index_to_tuple(pick[fj], q, inst.constraints[f].arity());
                            for (int pos : sel[f]) {
                                int var = inst.constraints[f].scope[pos];
                                prod *= (wf[pos] == xval[var]) ? Rat(q - 1) : Rat(-1);
                            }
                        }
                        inner += wx * prod;
                        return;
                    }
                    for (int c = 0; c < q; ++c) {
                        xval[fv[vi]] = c;
                        self3(self3, vi + 1, wx * make_rat(1, q));
                    }
                    xval.erase(fv[vi]);
                    return;
                };
                rec3(rec3, 0, Rat(1));
                term += w * inner;
                return;
            }
            for (std::uint64_t widx : supp[fi]) {
                pick[fi] = widx;
                self(self, fi + 1, w * inst.constraints[fs[fi]].mu.probs[widx]);
            }
        };
        rec2(rec2, 0, Rat(1));
        total += term;
    }
    return qpow(q, v_H - e_H - static_cast<long>(T.size())) * total;
}

}  // namespace sospex::testing
