#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sospex/subgraph.hpp"

namespace sospex {

struct ClosureResult {
    std::set<int> S;
    Subgraph cl;
    Rat revenue;          // R(cl) under the tau/zeta in force
    std::string method;   // "peel" or "search"
    long explored = 0;
};

// The unique maximal S-closed tau-subgraph: peel to fixpoint, repeatedly
// deleting all edges of any constraint of degree < tau and the edge of any
// degree-1 variable outside S. Every deleted edge lies in no S-closed
// subgraph (a constraint of an S-closed H keeps degree >= tau among
// surviving edges, and a degree-1 variable of H outside S would be a leaf
// outside S), so the fixpoint contains every S-closed subgraph of G; the
// fixpoint itself is S-closed by the stopping condition.
Subgraph max_closed(const FactorGraph& G, const std::set<int>& S, int tau);

// cl(S): the union of all S-closed tau-subgraphs with at most SMALL
// constraints. Fast path: when the peel fixpoint has <= SMALL constraints it
// equals cl(S). Slow path: exhaustive union of the maximal S-closed
// subgraphs of every connected constraint subset of the fixpoint with at
// most c_limit members, where c_limit = min(SMALL, floor(|S|/zeta)) if the
// host is assumed plausible (an S-closed subgraph has at most |S| credits).
ClosureResult closure(const FactorGraph& G, const std::set<int>& S, int tau, long SMALL,
                      const Rat& zeta, bool assume_plausible = false, long budget = 5000000L);

// cl(N(f)) == H_f, the full neighborhood of f?
bool constraint_closure_trivial(const FactorGraph& G, int f, int tau, long SMALL, const Rat& zeta,
                                long budget = 5000000L);

// Results keyed by frozen S; concurrent reads, idempotent writes.
class ClosureCache {
public:
    std::optional<ClosureResult> get(const std::set<int>& S) const;
    void put(const std::set<int>& S, const ClosureResult& r);
    ClosureResult get_or_compute(const FactorGraph& G, const std::set<int>& S, int tau, long SMALL,
                                 const Rat& zeta, long budget = 5000000L);
    long size() const;

private:
    mutable std::mutex mu_;
    std::map<std::set<int>, ClosureResult> map_;
};

}  // namespace sospex
