#include "sospex/twise.hpp"

#include <json.hpp>

#include <stdexcept>

namespace sospex {

using nlohmann::json;

namespace {

// All t-subsets of {0..k-1} in lexicographic order.
std::vector<std::vector<int>> subsets_of_size(int k, int t) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int start) -> void {
        if (static_cast<int>(cur.size()) == t) {
            out.push_back(cur);
            return;
        }
        for (int i = start; i <= k - (t - static_cast<int>(cur.size())); ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

}  // namespace

LinearProgram delta_lp(const Predicate& P, int t) {
    if (t < 0 || t > P.k) throw std::invalid_argument("delta: t out of range");
    int q = P.q();
    std::uint64_t N = table_size(q, P.k);
    LinearProgram lp;
    lp.num_vars = static_cast<int>(N);
    lp.objective.assign(N, Rat(0));
    for (std::uint64_t z = 0; z < N; ++z)
        if (!P.sat(z)) lp.objective[z] = 1;

    std::vector<Rat> ones(N, Rat(1));
    lp.add_row(ones, Rel::Eq, Rat(1));

    // Marginal on every t-subset is uniform: one equality per (subset, cell).
    Rat cell = qpow(q, -t);
    for (const auto& T : subsets_of_size(P.k, t)) {
        std::uint64_t cells = table_size(q, t);
        for (std::uint64_t a = 0; a < cells; ++a) {
            std::vector<int> av = index_to_tuple(a, q, t);
            std::vector<Rat> row(N, Rat(0));
            for (std::uint64_t z = 0; z < N; ++z) {
                std::vector<int> zv = index_to_tuple(z, q, P.k);
                bool match = true;
                for (size_t i = 0; i < T.size(); ++i)
                    if (zv[T[i]] != av[i]) { match = false; break; }
                if (match) row[z] = 1;
            }
            lp.add_row(std::move(row), Rel::Eq, cell);
        }
    }
    return lp;
}

DeltaResult delta(const Predicate& P, int t) {
    LinearProgram lp = delta_lp(P, t);
    LpResult r = lp_solve(lp);
    if (r.status != LpStatus::Optimal)
        throw std::runtime_error("delta: LP unexpectedly not optimal");  // uniform mu is always feasible
    DeltaResult d;
    d.value = r.optimum;
    d.witness.q = P.q();
    d.witness.k = P.k;
    d.witness.probs = r.primal;
    d.witness.validate();
    d.basis = r.basis;
    d.pivots = r.pivots;
    return d;
}

SupportResult supports_twise(const Predicate& P, int t) {
    if (t < 1 || t > P.k) throw std::invalid_argument("supports_twise: t out of range");
    DeltaResult d = delta(P, t);
    SupportResult s;
    s.delta_value = d.value;
    s.feasible = (d.value == 0);
    s.basis = d.basis;
    if (s.feasible) s.witness = d.witness;
    return s;
}

ComplexityResult complexity(const Predicate& P) {
    // A never-satisfied predicate has no supported distribution at all. The
    // always-satisfied one supports the uniform (hence k-wise uniform)
    // distribution, so it is the one case that legitimately scans to "none";
    // any other predicate fails at tau = k at the latest, since the only
    // k-wise uniform distribution is uniform and it charges P^{-1}(0).
    if (P.sat_count == 0) throw std::invalid_argument("complexity: unsatisfiable predicate");
    ComplexityResult res;
    for (int t = 1; t <= 2 && t <= P.k; ++t)
        if (!supports_twise(P, t).feasible) res.failures_below_3.push_back(t);
    for (int tau = 3; tau <= P.k; ++tau) {
        if (!supports_twise(P, tau).feasible) {
            res.value = tau;
            break;
        }
    }
    return res;
}

TwiseReport analyze_predicate(const Predicate& P) {
    TwiseReport rep;
    rep.predicate_json = predicate_to_json(P);
    for (int t = 1; t <= P.k; ++t) {
        DeltaResult d = delta(P, t);
        TwiseRecord rec;
        rec.t = t;
        rec.delta_value = d.value;
        rec.feasible = (d.value == 0);
        if (rec.feasible) rec.witness = d.witness;
        rec.basis = d.basis;
        rep.records.push_back(std::move(rec));
    }
    if (P.sat_count > 0) rep.complexity = complexity(P);
    return rep;
}

std::string twise_report_to_json(const TwiseReport& rep) {
    json j;
    j["predicate"] = json::parse(rep.predicate_json);
    json recs = json::array();
    for (const auto& r : rep.records) {
        json e;
        e["t"] = r.t;
        e["feasible"] = r.feasible;
        e["delta"] = rat_to_string(r.delta_value);
        if (r.witness) {
            json probs = json::array();
            for (const Rat& p : r.witness->probs) probs.push_back(rat_to_string(p));
            e["witness"] = {{"q", r.witness->q}, {"k", r.witness->k}, {"probs", probs}};
        }
        e["basis"] = r.basis;
        recs.push_back(std::move(e));
    }
    j["records"] = recs;
    if (rep.complexity.value)
        j["complexity"] = *rep.complexity.value;
    else
        j["complexity"] = "none";
    j["failures_below_3"] = rep.complexity.failures_below_3;
    return j.dump(2);
}

}  // namespace sospex
