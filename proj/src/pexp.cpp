#include "sospex/pexp.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sospex {

using nlohmann::json;

PseudoExpectation::PseudoExpectation(const Instance& inst, Params params, PexpOptions opts)
    : inst_(&inst), graph_(inst), params_(std::move(params)), opts_(opts) {
    params_.validate_basic();
    inst.validate();
}

Rat PseudoExpectation::monomial(const MonomialIndex& M) {
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(M);
        if (it != cache_.end()) return it->second;
    }
    std::set<int> S = M.var_set();
    if (opts_.enforce_degree_cap && Rat(static_cast<long>(S.size())) > params_.degree_cap())
        throw std::invalid_argument("pseudoexpectation: monomial on " + std::to_string(S.size()) +
                                    " variables exceeds the zeta*SMALL cap");
    for (const auto& [var, val] : M.terms) {
        if (var < 0 || var >= inst_->n) throw std::invalid_argument("pseudoexpectation: bad variable");
        if (val < 0 || val >= inst_->q) throw std::invalid_argument("pseudoexpectation: bad value");
    }
    ClosureResult cl = closure_cache_.get_or_compute(graph_, S, params_.tau, params_.SMALL,
                                                     params_.zeta, opts_.closure_budget);
    Rat value = planted_expectation(*inst_, cl.cl, Polynomial::monomial(M), opts_.planted_budget);
    std::lock_guard<std::mutex> lock(mu_);
    cache_.emplace(M, value);
    return value;
}

Rat PseudoExpectation::eval(const Polynomial& p) {
    Rat total(0);
    for (const auto& [m, c] : p.coef) total += c * monomial(m);
    return total;
}

Rat PseudoExpectation::eval_joint(const Polynomial& p) {
    std::set<int> S = p.vbls();
    ClosureResult cl = closure_cache_.get_or_compute(graph_, S, params_.tau, params_.SMALL,
                                                     params_.zeta, opts_.closure_budget);
    return planted_expectation(*inst_, cl.cl, p, opts_.planted_budget);
}

long PseudoExpectation::cache_size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return static_cast<long>(cache_.size());
}

void PseudoExpectation::override_cached_value(const MonomialIndex& M, const Rat& value) {
    std::lock_guard<std::mutex> lock(mu_);
    cache_[M] = value;
}

std::vector<MonomialIndex> moment_index_set(int n, int q, int D) {
    std::vector<MonomialIndex> out;
    std::vector<std::pair<int, int>> cur;
    auto rec = [&](auto&& self, int start) -> void {
        out.push_back(MonomialIndex::make(cur));
        if (static_cast<int>(cur.size()) == D) return;
        for (int v = start; v < n; ++v) {
            for (int c = 1; c < q; ++c) {
                cur.emplace_back(v, c);
                self(self, v + 1);
                cur.pop_back();
            }
        }
    };
    rec(rec, 0);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

MomentMatrix assemble(PseudoExpectation& pe, int D, bool parallel) {
    MomentMatrix M;
    M.D = D;
    M.index = moment_index_set(pe.instance().n, pe.instance().q, D);
    int N = static_cast<int>(M.index.size());
    M.entries.assign(N, std::vector<Rat>(N, Rat(0)));

    std::vector<std::pair<int, int>> cells;
    cells.reserve(static_cast<size_t>(N) * (N + 1) / 2);
    for (int i = 0; i < N; ++i)
        for (int j = i; j < N; ++j) cells.emplace_back(i, j);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
#endif
    for (long idx = 0; idx < static_cast<long>(cells.size()); ++idx) {
        auto [i, j] = cells[idx];
        auto prod = monomial_product(M.index[i], M.index[j]);
        Rat v = prod ? pe.monomial(*prod) : Rat(0);
        M.entries[i][j] = v;
        if (i != j) M.entries[j][i] = v;
    }
    return M;
}

}  // namespace

MomentMatrix moment_matrix(PseudoExpectation& pe, int D, bool parallel) {
    return assemble(pe, D, parallel);
}

MomentMatrix moment_matrix_serial(PseudoExpectation& pe, int D) {
    return assemble(pe, D, false);
}

PsdResult psd_check_exact(const MomentMatrix& M) {
    int N = static_cast<int>(M.index.size());
    PsdResult res;
    // Working copy; eliminate in order. For a PSD matrix a zero diagonal
    // forces a zero row, so in-order LDL^T with that rule is a complete test.
    std::vector<std::vector<Rat>> A = M.entries;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            if (A[i][j] != A[j][i]) throw std::invalid_argument("psd_check: matrix not symmetric");

    std::vector<std::vector<Rat>> L(N, std::vector<Rat>(N, Rat(0)));
    for (int i = 0; i < N; ++i) L[i][i] = 1;
    std::vector<Rat> piv(N, Rat(0));

    auto extract_counterexample = [&](int step, std::vector<Rat> w) {
        // w is in the coordinates after `step` eliminations; undo the
        // congruence: original v solves L^T v = w on the first rows.
        std::vector<Rat> v = std::move(w);
        for (int i = step - 1; i >= 0; --i) {
            // v_i chosen so that the i-th transformed coordinate matches
            Rat s(0);
            for (int j = i + 1; j < N; ++j) s += L[j][i] * v[j];
            v[i] -= s;
        }
        res.counterexample = v;
        Rat val(0);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) val += v[i] * M.entries[i][j] * v[j];
        res.counterexample_value = val;
        if (val >= 0) throw std::logic_error("psd_check: counterexample failed to verify");
    };

    for (int i = 0; i < N; ++i) {
        piv[i] = A[i][i];
        if (piv[i] < 0) {
            std::vector<Rat> w(N, Rat(0));
            w[i] = 1;
            res.psd = false;
            extract_counterexample(i, std::move(w));
            return res;
        }
        if (piv[i] == 0) {
            // Row must already be zero past the pivot; otherwise the 2x2
            // minor [[0, a], [a, b]] is indefinite.
            for (int j = i + 1; j < N; ++j) {
                if (A[i][j] != 0) {
                    Rat a = A[i][j], b = A[j][j];
                    // (t, 1) gives 2at + b < 0 for t = -(|b| + 1)/(2a)
                    Rat t = -((b < 0 ? -b : b) + 1) / (2 * a);
                    std::vector<Rat> w(N, Rat(0));
                    w[i] = t;
                    w[j] = 1;
                    res.psd = false;
                    extract_counterexample(i, std::move(w));
                    return res;
                }
            }
            continue;  // pivot 0 with zero row: PSD-compatible rank deficiency
        }
        // Schur complement step: rows i and below-i column stay untouched
        // while the trailing block is updated, and the block stays symmetric
        // in exact arithmetic.
        for (int j = i + 1; j < N; ++j) {
            if (A[j][i] == 0) continue;
            Rat f = A[j][i] / piv[i];
            L[j][i] = f;
            for (int k2 = i; k2 < N; ++k2) A[j][k2] -= f * A[i][k2];
        }
    }
    res.psd = true;
    res.L = std::move(L);
    res.pivots = std::move(piv);
    return res;
}

PsdFloatResult psd_check_float(const MomentMatrix& M, double tol) {
    int N = static_cast<int>(M.index.size());
    std::vector<std::vector<double>> A(N, std::vector<double>(N));
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) A[i][j] = M.entries[i][j].get_d();
    PsdFloatResult res;
    res.min_pivot = 0.0;
    for (int i = 0; i < N; ++i) {
        double p = A[i][i];
        if (i == 0 || p < res.min_pivot) res.min_pivot = p;
        if (p < -tol) {
            res.psd_advisory = false;
            return res;
        }
        if (std::abs(p) <= tol) continue;
        for (int j = i + 1; j < N; ++j) {
            double f = A[j][i] / p;
            for (int k2 = i; k2 < N; ++k2) A[j][k2] -= f * A[i][k2];
        }
    }
    res.psd_advisory = true;
    return res;
}

namespace {

// All monomial indices of degree <= d over the full value range 0..q-1.
std::vector<MonomialIndex> all_value_index(int n, int q, int d) {
    std::vector<MonomialIndex> out;
    std::vector<std::pair<int, int>> cur;
    auto rec = [&](auto&& self, int start) -> void {
        out.push_back(MonomialIndex::make(cur));
        if (static_cast<int>(cur.size()) == d) return;
        for (int v = start; v < n; ++v)
            for (int c = 0; c < q; ++c) {
                cur.emplace_back(v, c);
                self(self, v + 1);
                cur.pop_back();
            }
    };
    rec(rec, 0);
    return out;
}

}  // namespace

IdentityReport identity_check(PseudoExpectation& pe, int D) {
    const Instance& inst = pe.instance();
    IdentityReport rep;
    rep.first_residual = 0;

    auto violate = [&](const std::string& what, const Rat& residual) {
        if (rep.passed) {
            rep.passed = false;
            rep.first_violation = what;
            rep.first_residual = residual;
        }
    };

    // sum_c x_i^{=c} = 1 against every monomial of degree <= D-1.
    {
        auto qs = all_value_index(inst.n, inst.q, D - 1);
        for (int i = 0; i < inst.n; ++i) {
            ++rep.identities_checked;
            for (const auto& T : qs) {
                if (T.var_set().count(i)) continue;  // products would double-count i
                ++rep.products_checked;
                Rat lhs(0);
                for (int c = 0; c < inst.q; ++c) {
                    auto prod = monomial_product(MonomialIndex::make({{i, c}}), T);
                    lhs += pe.monomial(*prod);
                }
                Rat rhs = pe.monomial(T);
                if (lhs != rhs) {
                    violate("sum_c x[" + std::to_string(i) + "]^{=c} = 1 against " + T.to_string(),
                            lhs - rhs);
                }
            }
        }
        // With i in vars(T), multilinearity collapses the products; check the
        // identity there too: x_i^{=c} * x_i^{=c'} is x_i^{=c} or zero.
        for (int i = 0; i < inst.n; ++i) {
            for (const auto& T : qs) {
                if (!T.var_set().count(i)) continue;
                ++rep.products_checked;
                Rat lhs(0);
                for (int c = 0; c < inst.q; ++c) {
                    auto prod = monomial_product(MonomialIndex::make({{i, c}}), T);
                    if (prod) lhs += pe.monomial(*prod);
                }
                Rat rhs = pe.monomial(T);
                if (lhs != rhs)
                    violate("booleanness against " + T.to_string(), lhs - rhs);
            }
        }
    }

    // Constraint-support identities s_f = 1.
    for (int f = 0; f < inst.m(); ++f) {
        const Constraint& con = inst.constraints[f];
        int k = con.arity();
        if (k > D) continue;  // no admissible q at this degree budget
        ++rep.identities_checked;
        Polynomial s_f;
        for (std::uint64_t widx = 0; widx < con.mu.probs.size(); ++widx) {
            if (con.mu.probs[widx] == 0) continue;
            std::vector<int> w = index_to_tuple(widx, inst.q, k);
            std::vector<std::pair<int, int>> terms;
            for (int pos = 0; pos < k; ++pos) terms.emplace_back(con.scope[pos], w[pos]);
            s_f.add_term(MonomialIndex::make(std::move(terms)), Rat(1));
        }
        auto qs = all_value_index(inst.n, inst.q, D - k);
        for (const auto& T : qs) {
            ++rep.products_checked;
            Polynomial prod = s_f * Polynomial::monomial(T);
            Rat lhs = pe.eval(prod);
            Rat rhs = pe.monomial(T);
            if (lhs != rhs)
                violate("s_f = 1 at constraint " + std::to_string(f) + " against " + T.to_string(),
                        lhs - rhs);
        }
    }
    return rep;
}

SatFraction satisfied_fraction(PseudoExpectation& pe) {
    const Instance& inst = pe.instance();
    SatFraction out;
    out.delta_max = 0;
    if (inst.m() == 0) {
        // Vacuous by convention.
        out.value = 1;
        out.bound = 1;
        out.inequality_holds = true;
        return out;
    }
    Rat sum(0);
    for (int f = 0; f < inst.m(); ++f) {
        const Constraint& con = inst.constraints[f];
        auto eff = con.effective_predicate();
        if (!eff) throw std::invalid_argument("satisfied_fraction: constraint without predicate");
        // Arithmetized indicator of satisfaction.
        Polynomial sat;
        for (std::uint64_t zidx = 0; zidx < eff->table.size(); ++zidx) {
            if (!eff->sat(zidx)) continue;
            std::vector<int> z = index_to_tuple(zidx, inst.q, con.arity());
            std::vector<std::pair<int, int>> terms;
            for (int pos = 0; pos < con.arity(); ++pos) terms.emplace_back(con.scope[pos], z[pos]);
            sat.add_term(MonomialIndex::make(std::move(terms)), Rat(1));
        }
        sum += pe.eval(sat);

        Rat off(0);
        for (std::uint64_t zidx = 0; zidx < con.mu.probs.size(); ++zidx)
            if (!eff->sat(zidx)) off += con.mu.probs[zidx];
        out.delta_max = std::max(out.delta_max, off);

        if (!constraint_closure_trivial(pe.graph(), f, pe.params().tau, pe.params().SMALL,
                                        pe.params().zeta))
            ++out.census;
    }
    out.value = sum / Rat(inst.m());
    out.bound = Rat(1) - out.delta_max - make_rat(out.census, inst.m());
    out.inequality_holds = out.value >= out.bound;
    return out;
}

std::string moment_matrix_to_json(const MomentMatrix& M) {
    json j;
    j["D"] = M.D;
    json idx = json::array();
    for (const auto& m : M.index) idx.push_back(m.to_string());
    j["index"] = idx;
    json rows = json::array();
    for (const auto& row : M.entries) {
        json r = json::array();
        for (const Rat& v : row) r.push_back(rat_to_string(v));
        rows.push_back(std::move(r));
    }
    j["entries"] = rows;
    return j.dump();
}

std::string moment_matrix_to_csv(const MomentMatrix& M) {
    std::ostringstream os;
    for (const auto& row : M.entries) {
        for (size_t j = 0; j < row.size(); ++j) {
            if (j) os << ",";
            os << row[j].get_d();
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace sospex
