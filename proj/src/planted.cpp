#include "sospex/planted.hpp"

#include <algorithm>
#include <stdexcept>

#include "sospex/oracle.hpp"

namespace sospex {

namespace {

// Table over an ordered list of variables; probs indexed base-q with the
// first listed variable most significant.
struct Factor {
    std::vector<int> vars;
    std::vector<Rat> table;
};

// Pr over w_f ~ mu_f of "suggestions at the H-edges of f equal x": the
// marginal of mu_f onto the in-H scope positions, as a factor.
Factor edge_factor(const Instance& inst, int f, const std::vector<int>& hvars) {
    const Constraint& c = inst.constraints[f];
    std::vector<int> coords;  // scope positions with an H-edge, increasing
    for (int pos = 0; pos < c.arity(); ++pos)
        if (std::binary_search(hvars.begin(), hvars.end(), c.scope[pos])) coords.push_back(pos);
    RationalDistribution m = c.mu.marginal(coords);
    Factor fac;
    for (int pos : coords) fac.vars.push_back(c.scope[pos]);
    fac.table = m.probs;
    return fac;
}

Factor multiply(const Factor& a, const Factor& b, int q, long budget) {
    Factor r;
    r.vars = a.vars;
    for (int v : b.vars)
        if (std::find(r.vars.begin(), r.vars.end(), v) == r.vars.end()) r.vars.push_back(v);
    std::uint64_t size = 1;
    for (size_t i = 0; i < r.vars.size(); ++i) {
        size *= static_cast<std::uint64_t>(q);
        if (size > static_cast<std::uint64_t>(budget))
            throw std::runtime_error("planted: elimination table exceeds budget");
    }
    r.table.assign(size, Rat(0));
    // positions of a.vars and b.vars inside r.vars
    auto positions = [&](const std::vector<int>& vs) {
        std::vector<int> pos;
        for (int v : vs)
            pos.push_back(static_cast<int>(std::find(r.vars.begin(), r.vars.end(), v) - r.vars.begin()));
        return pos;
    };
    std::vector<int> pa = positions(a.vars), pb = positions(b.vars);
    std::vector<int> z(r.vars.size());
    for (std::uint64_t idx = 0; idx < size; ++idx) {
        std::uint64_t rest = idx;
        for (int i = static_cast<int>(r.vars.size()) - 1; i >= 0; --i) {
            z[i] = static_cast<int>(rest % q);
            rest /= q;
        }
        std::uint64_t ia = 0, ib = 0;
        for (int p : pa) ia = ia * q + z[p];
        for (int p : pb) ib = ib * q + z[p];
        Rat prod = a.table[ia] * b.table[ib];
        if (prod != 0) r.table[idx] = prod;
    }
    return r;
}

Factor sum_out(const Factor& a, int var, int q) {
    auto it = std::find(a.vars.begin(), a.vars.end(), var);
    if (it == a.vars.end()) return a;
    int pos = static_cast<int>(it - a.vars.begin());
    Factor r;
    r.vars = a.vars;
    r.vars.erase(r.vars.begin() + pos);
    std::uint64_t size = a.table.size() / q;
    r.table.assign(size, Rat(0));
    int tail = static_cast<int>(a.vars.size()) - 1 - pos;  // digits after pos
    std::uint64_t tail_span = 1;
    for (int i = 0; i < tail; ++i) tail_span *= q;
    for (std::uint64_t idx = 0; idx < a.table.size(); ++idx) {
        if (a.table[idx] == 0) continue;
        std::uint64_t high = idx / (tail_span * q);
        std::uint64_t low = idx % tail_span;
        r.table[high * tail_span + low] += a.table[idx];
    }
    return r;
}

// Multiply all factors and eliminate every variable outside keep; returns
// the unnormalized joint table over (vars(H) intersect keep).
Factor eliminate(const Instance& inst, const Subgraph& H, const std::set<int>& keep, long budget) {
    int q = inst.q;
    std::vector<int> hvars_all;
    {
        auto s = H.vbls();
        hvars_all.assign(s.begin(), s.end());
    }
    std::vector<Factor> factors;
    for (const auto& [f, vars] : H.edges) {
        (void)vars;
        factors.push_back(edge_factor(inst, f, H.edges.at(f)));
    }
    std::vector<int> to_eliminate;
    for (int v : hvars_all)
        if (!keep.count(v)) to_eliminate.push_back(v);

    // Greedy order: repeatedly eliminate the variable whose merged factor
    // is smallest.
    while (!to_eliminate.empty()) {
        int best_var = -1;
        size_t best_size = SIZE_MAX;
        for (int v : to_eliminate) {
            std::set<int> merged;
            for (const Factor& fac : factors)
                if (std::find(fac.vars.begin(), fac.vars.end(), v) != fac.vars.end())
                    merged.insert(fac.vars.begin(), fac.vars.end());
            size_t sz = merged.empty() ? 0 : merged.size();
            if (sz < best_size) {
                best_size = sz;
                best_var = v;
            }
        }
        // Merge all factors containing best_var, then sum it out.
        Factor acc;
        acc.vars = {};
        acc.table = {Rat(1)};
        std::vector<Factor> rest;
        for (Factor& fac : factors) {
            if (std::find(fac.vars.begin(), fac.vars.end(), best_var) != fac.vars.end())
                acc = multiply(acc, fac, q, budget);
            else
                rest.push_back(std::move(fac));
        }
        rest.push_back(sum_out(acc, best_var, q));
        factors = std::move(rest);
        to_eliminate.erase(std::find(to_eliminate.begin(), to_eliminate.end(), best_var));
    }
    Factor acc;
    acc.vars = {};
    acc.table = {Rat(1)};
    for (const Factor& fac : factors) acc = multiply(acc, fac, q, budget);
    return acc;
}

}  // namespace

Rat consistency_probability(const Instance& inst, const Subgraph& H, bool debug_enumerate,
                            long budget) {
    long v = static_cast<long>(H.vbls().size());
    long e = H.edge_count();
    Rat closed_form = qpow(inst.q, v - e);
    if (debug_enumerate) {
        Factor total = eliminate(inst, H, {}, budget);
        if (total.table.at(0) != closed_form)
            throw std::logic_error("consistency_probability: enumeration disagrees with q^(v-e)");
    }
    return closed_form;
}

RationalDistribution planted_marginal(const Instance& inst, const Subgraph& H,
                                      const std::vector<int>& T, long budget) {
    for (size_t i = 0; i + 1 < T.size(); ++i)
        if (T[i] >= T[i + 1]) throw std::invalid_argument("planted_marginal: T must be increasing");
    int q = inst.q;
    std::set<int> keep(T.begin(), T.end());
    Factor joint = eliminate(inst, H, keep, budget);

    Rat total(0);
    for (const Rat& w : joint.table) total += w;
    if (total == 0) throw std::logic_error("planted_marginal: zero consistency mass");

    // joint.vars is some ordering of vars(H) in T; re-index into T order and
    // tensor the uniform distribution over T \ vars(H).
    RationalDistribution out;
    out.q = q;
    out.k = static_cast<int>(T.size());
    out.probs.assign(table_size(q, out.k), Rat(0));
    std::set<int> hvars = H.vbls();
    long outside = 0;
    for (int v : T)
        if (!hvars.count(v)) ++outside;
    Rat unif = qpow(q, -outside);

    std::vector<int> z(T.size(), 0);
    std::vector<int> jz(joint.vars.size(), 0);
    auto fill = [&](auto&& self, size_t ti) -> void {
        if (ti == T.size()) {
            std::uint64_t jidx = 0;
            for (size_t i = 0; i < joint.vars.size(); ++i) {
                auto it = std::find(T.begin(), T.end(), joint.vars[i]);
                jidx = jidx * q + static_cast<std::uint64_t>(z[it - T.begin()]);
            }
            Rat w = joint.table[jidx] / total * unif;
            if (w != 0) out.probs[tuple_to_index(z, q)] += w;
            return;
        }
        for (int c = 0; c < q; ++c) {
            z[ti] = c;
            self(self, ti + 1);
        }
    };
    (void)jz;
    fill(fill, 0);
    out.validate();
    return out;
}

Rat planted_expectation(const Instance& inst, const Subgraph& H, const Polynomial& p, long budget) {
    Rat total(0);
    std::set<int> hvars = H.vbls();
    for (const auto& [m, c] : p.coef) {
        if (m.degree() == 0) {
            total += c;
            continue;
        }
        // Split the monomial into in-H and out-of-H parts; the outside
        // variables are uniform and independent.
        std::vector<int> inside;
        long outside = 0;
        for (const auto& [var, val] : m.terms) {
            (void)val;
            if (hvars.count(var)) inside.push_back(var);
            else ++outside;
        }
        Rat prob = qpow(inst.q, -outside);
        if (!inside.empty()) {
            RationalDistribution marg = planted_marginal(inst, H, inside, budget);
            std::vector<int> cell(inside.size());
            for (const auto& [var, val] : m.terms) {
                auto it = std::find(inside.begin(), inside.end(), var);
                if (it != inside.end()) cell[it - inside.begin()] = val;
            }
            prob *= marg.probs[tuple_to_index(cell, inst.q)];
        }
        total += c * prob;
    }
    return total;
}

std::vector<int> sample_planted(const Instance& inst, const Subgraph& H, Rng& rng,
                                long max_rejections) {
    int q = inst.q;
    // Per-constraint support and cumulative weights for inversion sampling.
    struct Supp {
        int f;
        std::vector<std::uint64_t> idxs;
        std::vector<Rat> cumulative;
    };
    std::vector<Supp> supports;
    for (const auto& [f, vars] : H.edges) {
        (void)vars;
        Supp s;
        s.f = f;
        Rat acc(0);
        const auto& mu = inst.constraints[f].mu;
        for (std::uint64_t idx = 0; idx < mu.probs.size(); ++idx) {
            if (mu.probs[idx] > 0) {
                acc += mu.probs[idx];
                s.idxs.push_back(idx);
                s.cumulative.push_back(acc);
            }
        }
        supports.push_back(std::move(s));
    }

    const std::uint64_t den = 1ULL << 62;
    for (long attempt = 0; attempt < max_rejections; ++attempt) {
        std::vector<int> assign(inst.n, -1);
        bool ok = true;
        for (const Supp& s : supports) {
            Rat u = make_rat(Int(static_cast<long>(rng.below(den))), Int(static_cast<long>(den)));
            size_t pick = 0;
            while (pick + 1 < s.cumulative.size() && u >= s.cumulative[pick]) ++pick;
            std::vector<int> w = index_to_tuple(s.idxs[pick], q, inst.constraints[s.f].arity());
            const auto& scope = inst.constraints[s.f].scope;
            const auto& hv = H.edges.at(s.f);
            for (size_t pos = 0; pos < scope.size(); ++pos) {
                int v = scope[pos];
                if (!std::binary_search(hv.begin(), hv.end(), v)) continue;
                if (assign[v] == -1) assign[v] = w[pos];
                else if (assign[v] != w[pos]) {
                    ok = false;
                    break;
                }
            }
            if (!ok) break;
        }
        if (!ok) continue;
        for (int v = 0; v < inst.n; ++v)
            if (assign[v] == -1) assign[v] = static_cast<int>(rng.below(q));
        return assign;
    }
    Rat expect = consistency_probability(inst, H);
    throw std::runtime_error("sample_planted: no acceptance in " + std::to_string(max_rejections) +
                             " draws; expected rate " + rat_to_string(expect));
}

}  // namespace sospex
