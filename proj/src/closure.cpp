#include "sospex/closure.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace sospex {

namespace {

// Peel working state: per-constraint alive edge flags over scope positions.
struct PeelState {
    const FactorGraph* G;
    std::vector<std::vector<char>> alive;  // [f][pos]
    std::vector<int> cons_deg;
    std::vector<int> var_deg;

    PeelState(const FactorGraph& g, const std::vector<char>& cons_allowed) : G(&g) {
        int m = g.m();
        alive.resize(m);
        cons_deg.assign(m, 0);
        var_deg.assign(g.n(), 0);
        for (int f = 0; f < m; ++f) {
            if (!cons_allowed.empty() && !cons_allowed[f]) {
                alive[f].assign(g.scope(f).size(), 0);
                continue;
            }
            alive[f].assign(g.scope(f).size(), 1);
            cons_deg[f] = static_cast<int>(g.scope(f).size());
            for (int v : g.scope(f)) ++var_deg[v];
        }
    }

    void drop_edge(int f, int pos) {
        if (!alive[f][pos]) return;
        alive[f][pos] = 0;
        --cons_deg[f];
        --var_deg[G->scope(f)[pos]];
    }

    Subgraph result() const {
        Subgraph H;
        for (int f = 0; f < G->m(); ++f)
            for (size_t pos = 0; pos < alive[f].size(); ++pos)
                if (alive[f][pos]) H.add_edge(f, G->scope(f)[pos]);
        return H;
    }
};

Subgraph peel(const FactorGraph& G, const std::set<int>& S, int tau,
              const std::vector<char>& cons_allowed) {
    PeelState st(G, cons_allowed);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int f = 0; f < G.m(); ++f) {
            if (st.cons_deg[f] > 0 && st.cons_deg[f] < tau) {
                for (size_t pos = 0; pos < st.alive[f].size(); ++pos) st.drop_edge(f, static_cast<int>(pos));
                changed = true;
            }
        }
        for (int f = 0; f < G.m(); ++f) {
            for (size_t pos = 0; pos < st.alive[f].size(); ++pos) {
                if (!st.alive[f][pos]) continue;
                int v = G.scope(f)[pos];
                if (st.var_deg[v] == 1 && !S.count(v)) {
                    st.drop_edge(f, static_cast<int>(pos));
                    changed = true;
                }
            }
        }
    }
    return st.result();
}

}  // namespace

Subgraph max_closed(const FactorGraph& G, const std::set<int>& S, int tau) {
    return peel(G, S, tau, {});
}

ClosureResult closure(const FactorGraph& G, const std::set<int>& S, int tau, long SMALL,
                      const Rat& zeta, bool assume_plausible, long budget) {
    ClosureResult res;
    res.S = S;
    Subgraph M = max_closed(G, S, tau);
    if (M.cons_count() <= SMALL) {
        res.cl = M;
        res.method = "peel";
        res.revenue = account(res.cl, tau, zeta).revenue;
        res.explored = 1;
        return res;
    }

    // Slow path: repair-driven branch and bound inside the fixpoint. Every
    // edge of cl(S) lies in a minimal small S-closed subgraph, and a minimal
    // subgraph can be grown from any of its constraints so that each step
    // either repairs the smallest deficient leaf (a degree-1 variable
    // outside S) by a constraint through it, or deletes a deletable edge
    // into it. States evolve monotonically, so the search terminates; the
    // revenue bound caps the constraint count when the host is plausible.
    res.method = "search";
    long c_limit = SMALL;
    if (assume_plausible && zeta > 0) {
        long by_revenue = rat_floor_long(Rat(static_cast<long>(S.size())) / zeta);
        c_limit = std::min(c_limit, by_revenue);
    }
    int K = 3;
    for (const auto& [f, vars] : M.edges) K = std::max(K, static_cast<int>(vars.size()));

    std::map<int, std::vector<int>> var_to_cons;  // within M
    for (const auto& [f, vars] : M.edges)
        for (int v : vars) var_to_cons[v].push_back(f);

    Subgraph acc;
    long explored = 0;
    auto rec = [&](auto&& self, Subgraph& H) -> void {
        if (++explored > budget)
            throw std::runtime_error("closure: search budget exceeded after " +
                                     std::to_string(explored) + " states");
        std::vector<int> deficient;
        long hard = 0;  // leaves only repairable by adding a constraint
        for (const auto& [v, d] : H.var_degrees()) {
            if (d != 1 || S.count(v)) continue;
            deficient.push_back(v);
            bool droppable = false;
            for (const auto& [f, vars] : H.edges)
                if (static_cast<int>(vars.size()) > tau &&
                    std::binary_search(vars.begin(), vars.end(), v)) {
                    droppable = true;
                    break;
                }
            if (!droppable) ++hard;
        }
        if (deficient.empty()) {
            acc = Subgraph::unite(acc, H);
            return;
        }
        if (H.cons_count() + (hard + K - 1) / K > c_limit) return;
        if (H.cons_count() > c_limit) return;
        int v = deficient.front();
        // repair: every constraint of M through v that is not yet present
        for (int g : var_to_cons[v]) {
            if (H.edges.count(g)) continue;
            Subgraph next = H;
            for (int w : M.edges.at(g)) next.add_edge(g, w);
            self(self, next);
        }
        // or delete a deletable edge into v (only when its constraint keeps
        // degree >= tau)
        for (const auto& [f, vars] : H.edges) {
            if (!std::binary_search(vars.begin(), vars.end(), v)) continue;
            if (static_cast<int>(vars.size()) <= tau) continue;
            Subgraph next = H;
            auto& nv = next.edges[f];
            nv.erase(std::lower_bound(nv.begin(), nv.end(), v));
            self(self, next);
        }
    };
    for (const auto& [seed, vars] : M.edges) {
        (void)vars;
        Subgraph start;
        for (int w : M.edges.at(seed)) start.add_edge(seed, w);
        rec(rec, start);
    }
    res.cl = acc;
    res.revenue = account(res.cl, tau, zeta).revenue;
    res.explored = explored;
    return res;
}

bool constraint_closure_trivial(const FactorGraph& G, int f, int tau, long SMALL, const Rat& zeta,
                                long budget) {
    const auto& scope = G.scope(f);
    std::set<int> S(scope.begin(), scope.end());
    ClosureResult r = closure(G, S, tau, SMALL, zeta, false, budget);
    return r.cl == Subgraph::full_neighborhood(*G.inst, f);
}

std::optional<ClosureResult> ClosureCache::get(const std::set<int>& S) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = map_.find(S);
    if (it == map_.end()) return std::nullopt;
    return it->second;
}

void ClosureCache::put(const std::set<int>& S, const ClosureResult& r) {
    std::lock_guard<std::mutex> lock(mu_);
    map_.emplace(S, r);  // idempotent: first writer wins, values agree anyway
}

ClosureResult ClosureCache::get_or_compute(const FactorGraph& G, const std::set<int>& S, int tau,
                                           long SMALL, const Rat& zeta, long budget) {
    if (auto hit = get(S)) return *hit;
    ClosureResult r = closure(G, S, tau, SMALL, zeta, false, budget);
    put(S, r);
    return r;
}

long ClosureCache::size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return static_cast<long>(map_.size());
}

}  // namespace sospex
