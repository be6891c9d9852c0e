#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sospex/instance.hpp"
#include "sospex/rational.hpp"

namespace sospex {

// Edge-induced bipartite subgraph of a factor graph, plus an optional set of
// isolated variable-vertices (the "+" extension used by witness tracking).
// Edges are stored per constraint as sorted variable lists N_H(f).
struct Subgraph {
    std::map<int, std::vector<int>> edges;  // f -> sorted vars
    std::set<int> isolated;                 // disjoint from vbls of the edges

    bool empty() const { return edges.empty() && isolated.empty(); }
    int cons_count() const { return static_cast<int>(edges.size()); }
    long edge_count() const;
    std::set<int> vbls() const;             // edge endpoints only
    std::set<int> vbls_plus() const;        // including isolated vertices
    std::map<int, int> var_degrees() const;

    void add_edge(int f, int v);
    void add_isolated(int v);               // no-op if v already an endpoint
    bool has_edge(int f, int v) const;
    bool contains(const Subgraph& other) const;

    static Subgraph unite(const Subgraph& a, const Subgraph& b);
    // Full neighborhood H_f of one constraint.
    static Subgraph full_neighborhood(const Instance& inst, int f);

    bool operator==(const Subgraph& other) const = default;
    std::string to_string() const;
};

struct Accounting {
    long credits = 0;      // leaves, plus 2 per isolated vertex
    long excess_var = 0;
    long excess_cons = 0;
    Rat revenue;           // credits - (excess_var + excess_cons)
    Rat cost;              // zeta * |cons|
    Rat income;            // revenue - cost
    bool plausible() const { return income >= 0; }
};

Accounting account(const Subgraph& H, int tau, const Rat& zeta);

bool is_tau_subgraph(const Subgraph& H, int tau);

// e = (tau-zeta)/2 * c + v - I/2 must hold for every tau-subgraph; isolated
// vertices keep the identity intact (they add 1 to v and 2 to I).
bool accounting_identity_holds(const Subgraph& H, int tau, const Rat& zeta);

struct SearchStats {
    long explored = 0;
    bool budget_exceeded = false;
};

// Exact search for an implausible tau-subgraph with at most c_max
// constraints. Scans candidate variable-spans; complete because an
// implausible subgraph stays implausible after extending each member
// constraint to all of its edges inside the span, and per-constraint income
// contributions only drop when swapping in higher-degree constraints.
// Returns a violating subgraph minimal under constraint removal, or nullopt.
std::optional<Subgraph> find_implausible_exact(const FactorGraph& G, int tau, const Rat& zeta,
                                               int c_max, SearchStats* stats = nullptr,
                                               long budget = 200000000L);

// Randomized local search minimizing income; sound when it reports a
// violation, makes no completeness claim.
std::optional<Subgraph> find_implausible_heuristic(const FactorGraph& G, int tau, const Rat& zeta,
                                                   int c_max, std::uint64_t seed,
                                                   long iterations = 20000);

struct CensusResult {
    long count = 0;
    std::vector<Subgraph> samples;  // up to 10 witnesses
    long explored = 0;
};

// Number of nonempty tau-subgraphs with at most c_max constraints and income
// at most income_cap; exhaustive over per-constraint edge subsets.
CensusResult low_income_census(const FactorGraph& G, int tau, const Rat& zeta, int c_max,
                               const Rat& income_cap, long budget = 50000000L);

}  // namespace sospex
