#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sospex/predicate.hpp"

namespace sospex {

// One constraint-vertex: an ordered scope of distinct variables plus the
// constraint distribution attached to it. The predicate reference and
// literal pattern are carried along when the instance arises from a CSP, so
// that "satisfied" is well defined for the oracles.
struct Constraint {
    std::vector<int> scope;
    RationalDistribution mu;
    std::optional<Predicate> pred;
    std::optional<LiteralPattern> lits;

    int arity() const { return static_cast<int>(scope.size()); }
    // Predicate as seen on the raw variables, literals already applied.
    std::optional<Predicate> effective_predicate() const;
    bool satisfied_by(const std::vector<int>& assignment) const;
};

struct InstanceMeta {
    std::uint64_t seed = 0;
    std::string family;
    std::string delta;  // m/n as "num/den"
};

struct Instance {
    int n = 0;
    int q = 2;
    int tau = 3;
    std::vector<Constraint> constraints;
    InstanceMeta meta;

    int m() const { return static_cast<int>(constraints.size()); }
    // Structural checks plus exact (tau-1)-wise uniformity of every mu_f.
    void validate(const Caps& caps = Caps{}) const;
};

// Bipartite adjacency view of an instance.
struct FactorGraph {
    const Instance* inst = nullptr;
    // per variable: (constraint id, position in scope)
    std::vector<std::vector<std::pair<int, int>>> var_adj;
    long edge_count = 0;

    explicit FactorGraph(const Instance& instance);
    int n() const { return inst->n; }
    int m() const { return inst->m(); }
    const std::vector<int>& scope(int f) const { return inst->constraints[f].scope; }
    int var_degree(int v) const { return static_cast<int>(var_adj[v].size()); }
};

// m i.i.d. constraints (sampled with replacement): uniformly random ordered
// scope of k distinct variables, uniformly random literal pattern l_f, and
// mu_f = shift_distribution(base, l_f). Default base is the delta(P, tau-1)
// LP witness. Fully deterministic given the seed.
Instance generate(int n, int m, const Predicate& P, int tau, std::uint64_t seed,
                  const std::optional<RationalDistribution>& base = std::nullopt);

// Hand-coded instances: "block" (two 5-constraint XOR components on 16
// variables) and "star:<arms>:<bseed>" (arms constraints x0 x_i y_i = b_i).
Instance build_fixture(const std::string& name);

// Replace every constraint distribution, revalidating exact (tau-1)-wise
// uniformity; the error message names the offending constraint and subset.
Instance attach_distributions(Instance inst, const std::vector<RationalDistribution>& mus);

std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text, const Caps& caps = Caps{});
void store_instance(const Instance& inst, const std::string& path);
Instance load_instance(const std::string& path, const Caps& caps = Caps{});

// q=2 k-SAT import; clauses become OR predicates with literal patterns.
Instance instance_from_dimacs(const std::string& text, int tau = 3, const Caps& caps = Caps{});

}  // namespace sospex
