#include "sospex/subgraph.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sospex {

long Subgraph::edge_count() const {
    long e = 0;
    for (const auto& [f, vars] : edges) e += static_cast<long>(vars.size());
    return e;
}

std::set<int> Subgraph::vbls() const {
    std::set<int> out;
    for (const auto& [f, vars] : edges) out.insert(vars.begin(), vars.end());
    return out;
}

std::set<int> Subgraph::vbls_plus() const {
    std::set<int> out = vbls();
    out.insert(isolated.begin(), isolated.end());
    return out;
}

std::map<int, int> Subgraph::var_degrees() const {
    std::map<int, int> deg;
    for (const auto& [f, vars] : edges)
        for (int v : vars) ++deg[v];
    return deg;
}

void Subgraph::add_edge(int f, int v) {
    auto& vars = edges[f];
    auto it = std::lower_bound(vars.begin(), vars.end(), v);
    if (it != vars.end() && *it == v) return;
    vars.insert(it, v);
    isolated.erase(v);
}

void Subgraph::add_isolated(int v) {
    if (!vbls().count(v)) isolated.insert(v);
}

bool Subgraph::has_edge(int f, int v) const {
    auto it = edges.find(f);
    if (it == edges.end()) return false;
    return std::binary_search(it->second.begin(), it->second.end(), v);
}

bool Subgraph::contains(const Subgraph& other) const {
    for (const auto& [f, vars] : other.edges) {
        auto it = edges.find(f);
        if (it == edges.end()) return false;
        for (int v : vars)
            if (!std::binary_search(it->second.begin(), it->second.end(), v)) return false;
    }
    return true;
}

Subgraph Subgraph::unite(const Subgraph& a, const Subgraph& b) {
    Subgraph u = a;
    for (const auto& [f, vars] : b.edges)
        for (int v : vars) u.add_edge(f, v);
    std::set<int> ep = u.vbls();
    for (int v : a.isolated)
        if (!ep.count(v)) u.isolated.insert(v);
    for (int v : b.isolated)
        if (!ep.count(v)) u.isolated.insert(v);
    return u;
}

Subgraph Subgraph::full_neighborhood(const Instance& inst, int f) {
    Subgraph H;
    for (int v : inst.constraints[f].scope) H.add_edge(f, v);
    return H;
}

std::string Subgraph::to_string() const {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (const auto& [f, vars] : edges) {
        for (int v : vars) {
            if (!first) os << " ";
            os << "(" << f << "," << v << ")";
            first = false;
        }
    }
    for (int v : isolated) {
        if (!first) os << " ";
        os << "[" << v << "]";
        first = false;
    }
    os << "}";
    return os.str();
}

Accounting account(const Subgraph& H, int tau, const Rat& zeta) {
    if (tau < 3) throw std::invalid_argument("account: tau < 3");
    if (zeta <= 0) throw std::invalid_argument("account: zeta <= 0");
    Accounting a;
    for (const auto& [v, d] : H.var_degrees()) {
        (void)v;
        if (d == 1) ++a.credits;
        if (d > 2) a.excess_var += d - 2;
    }
    a.credits += 2 * static_cast<long>(H.isolated.size());
    for (const auto& [f, vars] : H.edges) {
        (void)f;
        int d = static_cast<int>(vars.size());
        if (d > tau) a.excess_cons += d - tau;
    }
    a.revenue = Rat(a.credits - a.excess_var - a.excess_cons);
    a.cost = zeta * Rat(H.cons_count());
    a.income = a.revenue - a.cost;
    return a;
}

bool is_tau_subgraph(const Subgraph& H, int tau) {
    for (const auto& [f, vars] : H.edges) {
        (void)f;
        if (static_cast<int>(vars.size()) < tau) return false;
    }
    return true;
}

bool accounting_identity_holds(const Subgraph& H, int tau, const Rat& zeta) {
    if (!is_tau_subgraph(H, tau)) throw std::invalid_argument("accounting_identity: not a tau-subgraph");
    Accounting a = account(H, tau, zeta);
    Rat lhs(H.edge_count());
    Rat c(H.cons_count());
    Rat v(static_cast<long>(H.vbls_plus().size()));
    Rat rhs = (Rat(tau) - zeta) / 2 * c + v - a.income / 2;
    return lhs == rhs;
}

namespace {

// Largest span size any implausible subgraph with <= c_max constraints can
// have: income < 0 forces v < (2*K - tau + zeta) * c / 2.
int max_span(const Instance& inst, int tau, const Rat& zeta, int c_max) {
    int K = 0;
    for (const auto& c : inst.constraints) K = std::max(K, c.arity());
    Rat bound = (Rat(2 * K - tau) + zeta) * Rat(c_max) / 2;
    long v = rat_floor_long(bound);
    if (Rat(v) == bound) --v;  // strict inequality
    return static_cast<int>(std::min<long>(v, inst.n));
}

struct SpanHit {
    Rat income;
    std::vector<int> vars;
    std::vector<int> constraints;
};

// Evaluate one candidate span: take the eligible constraints of largest
// degree-into-W, all their W-edges. A violating subgraph with span W can
// only have higher income than this.
std::optional<SpanHit> eval_span(const FactorGraph& G, const std::vector<std::uint64_t>& scope_mask,
                                 std::uint64_t W, const std::vector<int>& wvars, int tau,
                                 const Rat& zeta, int c_max) {
    std::vector<std::pair<int, int>> eligible;  // (-a_f, f) for stable sort
    for (int f = 0; f < G.m(); ++f) {
        int a = __builtin_popcountll(scope_mask[f] & W);
        if (a >= tau) eligible.emplace_back(-a, f);
    }
    if (eligible.empty()) return std::nullopt;
    std::sort(eligible.begin(), eligible.end());
    int c = std::min<int>(c_max, static_cast<int>(eligible.size()));
    long asum = 0;
    for (int i = 0; i < c; ++i) asum -= eligible[i].first;
    Rat income = (Rat(tau) - zeta) * Rat(c) - Rat(2 * asum) + Rat(2 * static_cast<long>(wvars.size()));
    if (income >= 0) return std::nullopt;
    SpanHit hit;
    hit.income = income;
    hit.vars = wvars;
    for (int i = 0; i < c; ++i) hit.constraints.push_back(eligible[i].second);
    std::sort(hit.constraints.begin(), hit.constraints.end());
    return hit;
}

Subgraph hit_to_subgraph(const FactorGraph& G, const SpanHit& hit) {
    std::uint64_t W = 0;
    for (int v : hit.vars) W |= 1ULL << v;
    Subgraph H;
    for (int f : hit.constraints)
        for (int v : G.scope(f))
            if (W & (1ULL << v)) H.add_edge(f, v);
    return H;
}

// Drop constraints (ascending id) while the subgraph stays an implausible
// tau-subgraph; the result is minimal under constraint removal.
Subgraph trim_witness(Subgraph H, int tau, const Rat& zeta) {
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<int> fs;
        for (const auto& [f, vars] : H.edges) {
            (void)vars;
            fs.push_back(f);
        }
        for (int f : fs) {
            Subgraph cand = H;
            cand.edges.erase(f);
            if (cand.cons_count() > 0 && is_tau_subgraph(cand, tau) &&
                account(cand, tau, zeta).income < 0) {
                H = cand;
                changed = true;
                break;
            }
        }
    }
    return H;
}

}  // namespace

namespace {

// Exact search over connected constraint sets. Sound and complete because
// (a) an implausible subgraph has an implausible connected component, and
// (b) for a fixed constraint set, extending every member to its full edge
// set only lowers income: an added edge contributes -2 when its variable is
// already in the span and 0 otherwise.
std::optional<Subgraph> implausible_connected_scan(const FactorGraph& G, int tau, const Rat& zeta,
                                                   int c_max, std::atomic<long>& explored,
                                                   long budget) {
    const Instance& inst = *G.inst;
    std::vector<int> usable;
    for (int f = 0; f < G.m(); ++f)
        if (inst.constraints[f].arity() >= tau) usable.push_back(f);
    // constraint adjacency through shared variables
    std::map<int, std::vector<int>> adj;
    for (int v = 0; v < G.n(); ++v) {
        const auto& fs = G.var_adj[v];
        for (const auto& [f1, p1] : fs)
            for (const auto& [f2, p2] : fs) {
                (void)p1;
                (void)p2;
                if (f1 != f2) adj[f1].push_back(f2);
            }
    }
    for (auto& [f, nb] : adj) {
        (void)f;
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }

    for (int seed : usable) {
        std::set<int> chosen{seed};
        std::optional<Subgraph> found;
        auto income_of = [&](const std::set<int>& F) {
            Subgraph H;
            for (int f : F)
                for (int v : G.scope(f)) H.add_edge(f, v);
            return std::make_pair(account(H, tau, zeta).income, H);
        };
        // frontier enumeration: each connected subset with minimum element
        // `seed` is visited once
        auto rec = [&](auto&& self, std::vector<int> frontier, std::set<int> banned) -> bool {
            if (explored.fetch_add(1) + 1 > budget)
                throw std::runtime_error(
                    "find_implausible_exact: budget exceeded after exploring " +
                    std::to_string(explored.load()) + " candidates");
            auto [inc, H] = income_of(chosen);
            if (inc < 0) {
                found = H;
                return true;
            }
            if (static_cast<int>(chosen.size()) >= c_max) return false;
            for (size_t i = 0; i < frontier.size(); ++i) {
                int f = frontier[i];
                chosen.insert(f);
                std::vector<int> next(frontier.begin() + i + 1, frontier.end());
                std::set<int> banned2 = banned;
                for (size_t j = 0; j < i; ++j) banned2.insert(frontier[j]);
                for (int g : adj[f]) {
                    if (g <= seed || chosen.count(g) || banned2.count(g)) continue;
                    if (std::find(next.begin(), next.end(), g) == next.end()) next.push_back(g);
                }
                if (self(self, std::move(next), banned2)) return true;
                chosen.erase(f);
            }
            return false;
        };
        std::vector<int> frontier;
        for (int g : adj[seed])
            if (g > seed) frontier.push_back(g);
        if (rec(rec, std::move(frontier), {})) return found;
    }
    return std::nullopt;
}

}  // namespace

std::optional<Subgraph> find_implausible_exact(const FactorGraph& G, int tau, const Rat& zeta,
                                               int c_max, SearchStats* stats, long budget) {
    const Instance& inst = *G.inst;

    // Strategy selection: the span scan costs ~sum_{v<=V} C(n,v); when that
    // blows up (large n), fall back to connected constraint-set growth,
    // which wins on sparse instances.
    {
        int vmax_est = max_span(inst, tau, zeta, c_max);
        double spans = 0, binom = 1;
        for (int v = 1; v <= vmax_est; ++v) {
            binom = binom * (G.n() - v + 1) / v;
            spans += binom;
            if (spans > 5e7) break;
        }
        if (G.n() > 64 || spans > 5e7) {
            std::atomic<long> explored{0};
            auto res = implausible_connected_scan(G, tau, zeta, c_max, explored, budget);
            if (stats) stats->explored = explored.load();
            if (res) {
                *res = trim_witness(*res, tau, zeta);
                if (stats) stats->budget_exceeded = false;
            }
            return res;
        }
    }

    int vmax = max_span(inst, tau, zeta, c_max);
    std::vector<std::uint64_t> scope_mask(G.m(), 0);
    for (int f = 0; f < G.m(); ++f)
        for (int v : G.scope(f)) scope_mask[f] |= 1ULL << v;

    std::atomic<long> explored{0};
    std::atomic<bool> over_budget{false};
    int n = G.n();
    std::vector<std::optional<SpanHit>> branch_hit(n);

    // Branch b enumerates, in lexicographic order, every span whose smallest
    // variable is b; the merged result therefore matches a serial lex scan.
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int b = 0; b < n; ++b) {
        std::vector<int> wvars{b};
        std::uint64_t W = 1ULL << b;
        long local = 0;
        std::optional<SpanHit> found;
        auto rec = [&](auto&& self, int next) -> bool {
            if (++local % 8192 == 0) {
                if (explored.fetch_add(8192) + 8192 > budget) over_budget.store(true);
            }
            if (over_budget.load(std::memory_order_relaxed)) return true;
            if (auto hit = eval_span(G, scope_mask, W, wvars, tau, zeta, c_max)) {
                found = hit;
                return true;
            }
            if (static_cast<int>(wvars.size()) >= vmax) return false;
            for (int v = next; v < n; ++v) {
                wvars.push_back(v);
                W |= 1ULL << v;
                bool stop = self(self, v + 1);
                W &= ~(1ULL << v);
                wvars.pop_back();
                if (stop) return true;
            }
            return false;
        };
        rec(rec, b + 1);
        explored.fetch_add(local % 8192);
        branch_hit[b] = found;
    }

    if (stats) {
        stats->explored = explored.load();
        stats->budget_exceeded = over_budget.load();
    }
    // A found violation is sound even on a truncated scan.
    for (int b = 0; b < n; ++b) {
        if (branch_hit[b]) {
            Subgraph H = trim_witness(hit_to_subgraph(G, *branch_hit[b]), tau, zeta);
            return H;
        }
    }
    if (over_budget.load())
        throw std::runtime_error("find_implausible_exact: budget exceeded after exploring " +
                                 std::to_string(explored.load()) + " spans");
    return std::nullopt;
}

std::optional<Subgraph> find_implausible_heuristic(const FactorGraph& G, int tau, const Rat& zeta,
                                                   int c_max, std::uint64_t seed, long iterations) {
    const Instance& inst = *G.inst;
    std::vector<int> usable;
    for (int f = 0; f < G.m(); ++f)
        if (inst.constraints[f].arity() >= tau) usable.push_back(f);
    if (usable.empty()) return std::nullopt;

    Rng rng(seed);
    std::set<int> current;
    auto income_of = [&](const std::set<int>& F) {
        Subgraph H;
        for (int f : F)
            for (int v : G.scope(f)) H.add_edge(f, v);
        return std::make_pair(account(H, tau, zeta).income, H);
    };

    size_t restart_at = 0;
    auto restart = [&]() {
        current.clear();
        current.insert(usable[restart_at % usable.size()]);
        ++restart_at;
    };
    restart();

    // Random walk over constraint sets with a greedy bias; any state with
    // negative income is a verified violation, so the policy only affects
    // how fast one is found, never soundness.
    for (long it = 0; it < iterations; ++it) {
        auto [inc, H] = income_of(current);
        if (inc < 0) return trim_witness(H, tau, zeta);
        if (it % 500 == 499) {
            restart();
            continue;
        }
        std::uint64_t move = rng.below(10);
        std::set<int> span = H.vbls();
        std::vector<int> touching;
        for (int f : usable) {
            if (current.count(f)) continue;
            for (int v : G.scope(f))
                if (span.count(v)) {
                    touching.push_back(f);
                    break;
                }
        }
        if (static_cast<int>(current.size()) >= c_max || touching.empty()) move = 9;
        if (move < 4) {
            // greedy: the touching constraint whose addition minimizes income
            int best_f = -1;
            Rat best_inc;
            for (int f : touching) {
                std::set<int> cand = current;
                cand.insert(f);
                Rat ci = income_of(cand).first;
                if (best_f < 0 || ci < best_inc) {
                    best_f = f;
                    best_inc = ci;
                }
            }
            current.insert(best_f);
        } else if (move < 7) {
            current.insert(touching[rng.below(touching.size())]);
        } else if (move < 9 && current.size() > 1) {
            auto it2 = current.begin();
            std::advance(it2, rng.below(current.size()));
            current.erase(it2);
        } else if (current.size() > 1 && rng.below(2) == 0) {
            auto it2 = current.begin();
            std::advance(it2, rng.below(current.size()));
            current.erase(it2);
        }
    }
    return std::nullopt;
}

namespace {

void census_rec(const FactorGraph& G, int tau, const Rat& zeta, int c_max, const Rat& cap,
                int f, Subgraph& H, CensusResult& out, long budget) {
    if (++out.explored > budget)
        throw std::runtime_error("low_income_census: budget exceeded after " +
                                 std::to_string(out.explored) + " nodes");
    if (f == G.m()) {
        if (!H.empty() && account(H, tau, zeta).income <= cap) {
            ++out.count;
            if (out.samples.size() < 10) out.samples.push_back(H);
        }
        return;
    }
    // Skip constraint f.
    census_rec(G, tau, zeta, c_max, cap, f + 1, H, out, budget);
    if (H.cons_count() >= c_max) return;
    // Include f with each edge subset of size >= tau.
    const auto& scope = G.scope(f);
    int k = static_cast<int>(scope.size());
    if (k < tau) return;
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
        if (__builtin_popcount(mask) < tau) continue;
        std::vector<int> vars;
        for (int i = 0; i < k; ++i)
            if (mask & (1u << i)) vars.push_back(scope[i]);
        std::sort(vars.begin(), vars.end());
        H.edges[f] = vars;
        census_rec(G, tau, zeta, c_max, cap, f + 1, H, out, budget);
        H.edges.erase(f);
    }
}

}  // namespace

CensusResult low_income_census(const FactorGraph& G, int tau, const Rat& zeta, int c_max,
                               const Rat& income_cap, long budget) {
    CensusResult out;
    Subgraph H;
    census_rec(G, tau, zeta, c_max, income_cap, 0, H, out, budget);
    return out;
}

}  // namespace sospex
