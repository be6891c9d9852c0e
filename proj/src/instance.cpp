#include "sospex/instance.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sospex/oracle.hpp"
#include "sospex/twise.hpp"

namespace sospex {

using nlohmann::json;

std::optional<Predicate> Constraint::effective_predicate() const {
    if (!pred) return std::nullopt;
    if (!lits) return pred;
    return apply_literals(*pred, *lits);
}

bool Constraint::satisfied_by(const std::vector<int>& assignment) const {
    if (!pred) throw std::invalid_argument("Constraint::satisfied_by: no predicate attached");
    std::vector<int> z(scope.size());
    for (size_t i = 0; i < scope.size(); ++i) {
        z[i] = assignment[scope[i]];
        if (lits) z[i] = lits->apply(static_cast<int>(i), z[i]);
    }
    return pred->sat_tuple(z);
}

void Instance::validate(const Caps& caps) const {
    if (n < 1) throw std::invalid_argument("instance: n < 1");
    if (q < 2 || q > caps.max_q) throw std::invalid_argument("instance: q out of range");
    if (tau < 3) throw std::invalid_argument("instance: tau < 3");
    for (int f = 0; f < m(); ++f) {
        const Constraint& c = constraints[f];
        std::string where = "constraint " + std::to_string(f);
        if (c.arity() < tau - 1 || c.arity() > caps.max_k)
            throw std::invalid_argument(where + ": arity outside [tau-1, K]");
        std::set<int> seen;
        for (int v : c.scope) {
            if (v < 0 || v >= n) throw std::invalid_argument(where + ": variable out of range");
            if (!seen.insert(v).second) throw std::invalid_argument(where + ": repeated scope variable");
        }
        if (c.mu.q != q || c.mu.k != c.arity())
            throw std::invalid_argument(where + ": mu dimension mismatch");
        c.mu.validate();
        int t = std::min(tau - 1, c.arity());
        if (auto viol = twise_check(c.mu, t)) {
            std::ostringstream os;
            os << where << ": mu is not " << t << "-wise uniform; marginal on coords {";
            for (size_t i = 0; i < viol->coords.size(); ++i)
                os << (i ? "," : "") << viol->coords[i];
            os << "} at cell (";
            for (size_t i = 0; i < viol->cell.size(); ++i) os << (i ? "," : "") << viol->cell[i];
            os << ") has mass " << rat_to_string(viol->mass);
            throw std::invalid_argument(os.str());
        }
        if (c.pred && c.pred->k != c.arity())
            throw std::invalid_argument(where + ": predicate arity mismatch");
        if (c.lits && (!c.pred || c.lits->k() != c.pred->k))
            throw std::invalid_argument(where + ": literal pattern arity mismatch");
    }
}

FactorGraph::FactorGraph(const Instance& instance) : inst(&instance) {
    var_adj.assign(instance.n, {});
    for (int f = 0; f < instance.m(); ++f) {
        const auto& scope = instance.constraints[f].scope;
        for (int pos = 0; pos < static_cast<int>(scope.size()); ++pos) {
            var_adj[scope[pos]].emplace_back(f, pos);
            ++edge_count;
        }
    }
}

Instance generate(int n, int m, const Predicate& P, int tau, std::uint64_t seed,
                  const std::optional<RationalDistribution>& base) {
    if (n < P.k) throw std::invalid_argument("generate: n < k");
    if (m < 1) throw std::invalid_argument("generate: m < 1");
    RationalDistribution mu;
    if (base) {
        mu = *base;
        if (twise_check(mu, tau - 1))
            throw std::invalid_argument("generate: base distribution is not (tau-1)-wise uniform");
    } else {
        mu = delta(P, tau - 1).witness;
    }

    Instance inst;
    inst.n = n;
    inst.q = P.q();
    inst.tau = tau;
    inst.meta.seed = seed;
    inst.meta.family = "csp";
    inst.meta.delta = rat_to_string(make_rat(m, n));

    Rng rng(seed);
    std::vector<int> pool(n);
    for (int c = 0; c < m; ++c) {
        std::iota(pool.begin(), pool.end(), 0);
        Constraint con;
        con.scope.resize(P.k);
        for (int i = 0; i < P.k; ++i) {
            int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
            std::swap(pool[i], pool[j]);
            con.scope[i] = pool[i];
        }
        LiteralPattern l = LiteralPattern::random(P.q(), P.k, rng);
        con.mu = shift_distribution(mu, l);
        con.pred = P;
        con.lits = l;
        inst.constraints.push_back(std::move(con));
    }
    inst.validate();
    return inst;
}

namespace {

// XOR constraint over q=2 on the given scope: satisfied iff the bits XOR to b.
Constraint xor_constraint(const std::vector<int>& scope, int b) {
    Constraint c;
    c.scope = scope;
    int k = static_cast<int>(scope.size());
    c.pred = parse_predicate_spec("kxor:" + std::to_string(k) + ":" + std::to_string(b));
    // Uniform on solutions of the equation.
    c.mu.q = 2;
    c.mu.k = k;
    c.mu.probs.assign(table_size(2, k), Rat(0));
    Rat w = make_rat(1, static_cast<long>(table_size(2, k) / 2));
    for (std::uint64_t idx = 0; idx < c.mu.probs.size(); ++idx)
        if (c.pred->sat(idx)) c.mu.probs[idx] = w;
    return c;
}

}  // namespace

Instance build_fixture(const std::string& name) {
    if (name == "block") {
        // Two disjoint 5-constraint XOR components on 16 variables. In each
        // component every variable occurs twice except the first, which
        // occurs once; multiplying the equations pins that variable.
        Instance inst;
        inst.n = 16;
        inst.q = 2;
        inst.tau = 3;
        inst.meta.family = "block";
        inst.meta.delta = rat_to_string(make_rat(10, 16));
        const std::vector<std::vector<int>> shapes = {
            {0, 1, 2}, {1, 3, 4}, {3, 4, 5}, {5, 6, 7}, {2, 6, 7}};
        for (const auto& s : shapes) inst.constraints.push_back(xor_constraint(s, 1));
        for (const auto& s : shapes) {
            std::vector<int> shifted = s;
            for (int& v : shifted) v += 8;
            inst.constraints.push_back(xor_constraint(shifted, 0));
        }
        inst.validate();
        return inst;
    }
    if (name.rfind("cycle:", 0) == 0) {
        // Doubled parity cycle on 3L variables: f_i = x_i + x_{i+1} + y_i,
        // g_i = w_i + w_{i+1} + y_i. The only linear dependency is the sum
        // of all 2L equations (each variable appears exactly twice), and the
        // right-hand sides are chosen to make it inconsistent, so the
        // instance is unsatisfiable while every proper substructure is
        // consistent and loose.
        size_t mid = name.find(':', 6);
        if (mid == std::string::npos) throw std::invalid_argument("fixture: want cycle:<L>:<bseed>");
        int L = std::stoi(name.substr(6, mid - 6));
        std::uint64_t bseed = std::stoull(name.substr(mid + 1));
        if (L < 3) throw std::invalid_argument("fixture: cycle needs L >= 3");
        Instance inst;
        inst.n = 3 * L;
        inst.q = 2;
        inst.tau = 3;
        inst.meta.seed = bseed;
        inst.meta.family = name;
        inst.meta.delta = rat_to_string(make_rat(2 * L, 3 * L));
        Rng rng(bseed);
        std::vector<int> a(L), c(L);
        int parity = 0;
        for (int i = 0; i < L; ++i) {
            a[i] = static_cast<int>(rng.below(2));
            c[i] = static_cast<int>(rng.below(2));
            parity ^= a[i] ^ c[i];
        }
        if (parity == 0) c[0] ^= 1;  // force the global dependency inconsistent
        for (int i = 0; i < L; ++i)
            inst.constraints.push_back(xor_constraint({i, (i + 1) % L, L + i}, a[i]));
        for (int i = 0; i < L; ++i)
            inst.constraints.push_back(xor_constraint({2 * L + i, 2 * L + (i + 1) % L, L + i}, c[i]));
        inst.validate();
        return inst;
    }
    if (name.rfind("star:", 0) == 0) {
        size_t mid = name.find(':', 5);
        if (mid == std::string::npos) throw std::invalid_argument("fixture: want star:<arms>:<bseed>");
        int arms = std::stoi(name.substr(5, mid - 5));
        std::uint64_t bseed = std::stoull(name.substr(mid + 1));
        if (arms < 1) throw std::invalid_argument("fixture: arms < 1");
        Instance inst;
        inst.n = 2 * arms + 1;
        inst.q = 2;
        inst.tau = 3;
        inst.meta.seed = bseed;
        inst.meta.family = name;
        inst.meta.delta = rat_to_string(make_rat(arms, inst.n));
        Rng rng(bseed);
        for (int i = 1; i <= arms; ++i) {
            int b = static_cast<int>(rng.below(2));
            inst.constraints.push_back(xor_constraint({0, i, arms + i}, b));
        }
        inst.validate();
        return inst;
    }
    throw std::invalid_argument("unknown fixture '" + name + "'");
}

Instance attach_distributions(Instance inst, const std::vector<RationalDistribution>& mus) {
    if (mus.size() != inst.constraints.size())
        throw std::invalid_argument("attach_distributions: need one distribution per constraint");
    for (size_t f = 0; f < mus.size(); ++f) {
        if (mus[f].k != inst.constraints[f].arity())
            throw std::invalid_argument("attach_distributions: constraint " + std::to_string(f) +
                                        ": arity mismatch");
        inst.constraints[f].mu = mus[f];
    }
    inst.validate();  // reports the offending constraint and t-subset
    return inst;
}

namespace {

json distribution_to_json(const RationalDistribution& mu) {
    json probs = json::array();
    for (const Rat& p : mu.probs) probs.push_back(rat_to_string(p));
    return json{{"probs", probs}};
}

RationalDistribution distribution_from_json(const json& j, int q, int k) {
    RationalDistribution mu;
    mu.q = q;
    mu.k = k;
    for (const auto& s : j.at("probs")) mu.probs.push_back(rat_from_string(s.get<std::string>()));
    if (mu.probs.size() != table_size(q, k))
        throw std::invalid_argument("instance json: mu length != q^arity");
    return mu;
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
    json j;
    j["n"] = inst.n;
    j["q"] = inst.q;
    j["tau"] = inst.tau;
    json cons = json::array();
    for (const Constraint& c : inst.constraints) {
        json e;
        e["scope"] = c.scope;
        e["mu"] = distribution_to_json(c.mu);
        if (c.pred) e["pred"] = json::parse(predicate_to_json(*c.pred));
        if (c.lits) e["literals"] = c.lits->perms;
        cons.push_back(std::move(e));
    }
    j["constraints"] = cons;
    j["meta"] = {{"seed", inst.meta.seed}, {"family", inst.meta.family}, {"delta", inst.meta.delta}};
    return j.dump(2);
}

Instance instance_from_json(const std::string& text, const Caps& caps) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("instance json: ") + e.what());
    }
    Instance inst;
    inst.n = j.at("n").get<int>();
    inst.q = j.at("q").get<int>();
    inst.tau = j.at("tau").get<int>();
    for (const auto& e : j.at("constraints")) {
        Constraint c;
        c.scope = e.at("scope").get<std::vector<int>>();
        c.mu = distribution_from_json(e.at("mu"), inst.q, static_cast<int>(c.scope.size()));
        if (e.contains("pred")) c.pred = predicate_from_json(e.at("pred").dump(), caps);
        if (e.contains("literals")) {
            LiteralPattern l;
            l.perms = e.at("literals").get<std::vector<std::vector<int>>>();
            if (!l.is_valid(inst.q)) throw std::invalid_argument("instance json: bad literal pattern");
            c.lits = l;
        }
        inst.constraints.push_back(std::move(c));
    }
    if (j.contains("meta")) {
        inst.meta.seed = j["meta"].value("seed", 0ULL);
        inst.meta.family = j["meta"].value("family", "");
        inst.meta.delta = j["meta"].value("delta", "");
    }
    inst.validate(caps);
    return inst;
}

void store_instance(const Instance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << instance_to_json(inst) << "\n";
}

Instance load_instance(const std::string& path, const Caps& caps) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return instance_from_json(ss.str(), caps);
}

Instance instance_from_dimacs(const std::string& text, int tau, const Caps& caps) {
    std::istringstream in(text);
    std::string line;
    Instance inst;
    inst.q = 2;
    inst.tau = tau;
    inst.meta.family = "dimacs";
    bool have_header = false;
    int declared_m = 0;
    // delta(ksat:k, tau-1) witness per clause width, computed on demand
    std::map<int, RationalDistribution> base_by_width;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "c") continue;
        if (tok == "p") {
            std::string fmt;
            ls >> fmt >> inst.n >> declared_m;
            if (fmt != "cnf") throw std::invalid_argument("dimacs: expected 'p cnf'");
            have_header = true;
            continue;
        }
        if (!have_header) throw std::invalid_argument("dimacs: clause before header");
        std::vector<int> lits{std::stoi(tok)};
        int v;
        while (ls >> v) lits.push_back(v);
        if (lits.empty() || lits.back() != 0)
            throw std::invalid_argument("dimacs: clause not 0-terminated");
        lits.pop_back();
        if (lits.empty()) throw std::invalid_argument("dimacs: empty clause");
        int k = static_cast<int>(lits.size());
        if (k < tau - 1) throw std::invalid_argument("dimacs: clause width below tau-1");
        Constraint c;
        std::vector<bool> neg(k);
        for (int i = 0; i < k; ++i) {
            if (lits[i] == 0 || std::abs(lits[i]) > inst.n)
                throw std::invalid_argument("dimacs: literal out of range");
            c.scope.push_back(std::abs(lits[i]) - 1);
            neg[i] = lits[i] < 0;
        }
        c.pred = parse_predicate_spec("ksat:" + std::to_string(k), caps);
        c.lits = LiteralPattern::from_signs(neg);
        auto it = base_by_width.find(k);
        if (it == base_by_width.end())
            it = base_by_width.emplace(k, delta(*c.pred, tau - 1).witness).first;
        c.mu = shift_distribution(it->second, *c.lits);
        inst.constraints.push_back(std::move(c));
    }
    if (!have_header) throw std::invalid_argument("dimacs: missing header");
    if (declared_m != inst.m())
        throw std::invalid_argument("dimacs: clause count disagrees with header");
    inst.meta.delta = rat_to_string(make_rat(inst.m(), inst.n));
    inst.validate(caps);
    return inst;
}

}  // namespace sospex
