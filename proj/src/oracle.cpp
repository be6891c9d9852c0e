#include "sospex/oracle.hpp"

#include <algorithm>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sospex {

namespace {

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

std::optional<TwiseViolation> twise_check(const RationalDistribution& mu, int t) {
    if (t < 0 || t > mu.k) throw std::invalid_argument("twise_check: t out of range");
    if (t == 0) return std::nullopt;
    Rat expected = qpow(mu.q, -t);
    for (const auto& T : subsets_of_size(mu.k, t)) {
        RationalDistribution marg = mu.marginal(T);
        for (std::uint64_t cell = 0; cell < marg.probs.size(); ++cell) {
            if (marg.probs[cell] != expected) {
                TwiseViolation v;
                v.coords = T;
                v.cell = index_to_tuple(cell, mu.q, t);
                v.mass = marg.probs[cell];
                return v;
            }
        }
    }
    return std::nullopt;
}

namespace {

struct EvalContext {
    const Instance* inst;
    std::vector<Predicate> effective;        // literals folded in
    std::vector<std::vector<int>> var_cons;  // variable -> constraints touching it

    explicit EvalContext(const Instance& instance) : inst(&instance) {
        var_cons.assign(instance.n, {});
        for (int f = 0; f < instance.m(); ++f) {
            const Constraint& c = instance.constraints[f];
            auto eff = c.effective_predicate();
            if (!eff) throw std::invalid_argument("brute_opt: constraint without predicate");
            effective.push_back(std::move(*eff));
            for (int v : c.scope) var_cons[v].push_back(f);
        }
    }

    bool eval(int f, const std::vector<int>& x) const {
        const auto& scope = inst->constraints[f].scope;
        std::uint64_t idx = 0;
        for (int v : scope) idx = idx * inst->q + static_cast<std::uint64_t>(x[v]);
        return effective[f].sat(idx);
    }
};

std::uint64_t assignment_space(const Instance& inst, std::uint64_t budget) {
    std::uint64_t total = 1;
    for (int i = 0; i < inst.n; ++i) {
        total *= static_cast<std::uint64_t>(inst.q);
        if (total > budget)
            throw std::runtime_error("brute_opt: q^n exceeds budget");
    }
    return total;
}

}  // namespace

OptResult brute_opt_serial(const Instance& inst, std::uint64_t budget) {
    inst.validate();
    std::uint64_t total = assignment_space(inst, budget);
    EvalContext ctx(inst);
    int n = inst.n, q = inst.q;

    std::vector<int> x(n, 0);
    std::vector<char> sat(inst.m());
    int count = 0;
    for (int f = 0; f < inst.m(); ++f) {
        sat[f] = ctx.eval(f, x);
        count += sat[f];
    }
    int best = count;
    std::vector<int> best_x = x;

    // Loopless reflected mixed-radix Gray walk: one digit changes per step,
    // so only the constraints touching that variable are re-evaluated.
    std::vector<int> focus(n + 1), dir(n, 1);
    for (int i = 0; i <= n; ++i) focus[i] = i;
    for (std::uint64_t step = 1; step < total; ++step) {
        int j = focus[0];
        focus[0] = 0;
        if (j == n) break;
        x[j] += dir[j];
        if (x[j] == 0 || x[j] == q - 1) {
            dir[j] = -dir[j];
            focus[j] = focus[j + 1];
            focus[j + 1] = j + 1;
        }
        for (int f : ctx.var_cons[j]) {
            bool s = ctx.eval(f, x);
            count += static_cast<int>(s) - static_cast<int>(sat[f]);
            sat[f] = s;
        }
        if (count > best) {
            best = count;
            best_x = x;
        }
    }

    OptResult res;
    res.opt = make_rat(best, inst.m());
    res.argmax = best_x;
    res.method = "brute";
    return res;
}

OptResult brute_opt(const Instance& inst, std::uint64_t budget) {
    inst.validate();
    std::uint64_t total = assignment_space(inst, budget);
    EvalContext ctx(inst);
    int n = inst.n, q = inst.q, m = inst.m();

    int nblocks = 1;
#ifdef _OPENMP
    nblocks = std::min<std::uint64_t>(total, std::max(1, 4 * omp_get_max_threads()));
#endif
    std::uint64_t block = (total + nblocks - 1) / nblocks;
    std::vector<int> block_best(nblocks, -1);
    std::vector<std::uint64_t> block_arg(nblocks, 0);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int bi = 0; bi < nblocks; ++bi) {
        std::uint64_t lo = bi * block;
        std::uint64_t hi = std::min<std::uint64_t>(total, lo + block);
        if (lo >= hi) continue;
        // Variable 0 is the most significant digit of the assignment index.
        std::vector<int> x(n);
        std::uint64_t idx = lo;
        for (int v = n - 1; v >= 0; --v) {
            x[v] = static_cast<int>(idx % q);
            idx /= q;
        }
        std::vector<char> sat(m);
        int count = 0;
        for (int f = 0; f < m; ++f) {
            sat[f] = ctx.eval(f, x);
            count += sat[f];
        }
        int best = count;
        std::uint64_t arg = lo;
        std::vector<char> affected(m);
        for (std::uint64_t cur = lo + 1; cur < hi; ++cur) {
            // Odometer step on the least significant digits.
            std::fill(affected.begin(), affected.end(), 0);
            int v = n - 1;
            while (true) {
                for (int f : ctx.var_cons[v]) affected[f] = 1;
                if (x[v] + 1 < q) {
                    ++x[v];
                    break;
                }
                x[v] = 0;
                --v;
            }
            for (int f = 0; f < m; ++f) {
                if (!affected[f]) continue;
                bool s = ctx.eval(f, x);
                count += static_cast<int>(s) - static_cast<int>(sat[f]);
                sat[f] = s;
            }
            if (count > best) {
                best = count;
                arg = cur;
            }
        }
        block_best[bi] = best;
        block_arg[bi] = arg;
    }

    // Deterministic merge regardless of thread count: maximum satisfied
    // count, smallest assignment index on ties.
    int best = -1;
    std::uint64_t arg = 0;
    for (int bi = 0; bi < nblocks; ++bi) {
        if (block_best[bi] < 0) continue;
        if (block_best[bi] > best || (block_best[bi] == best && block_arg[bi] < arg)) {
            best = block_best[bi];
            arg = block_arg[bi];
        }
    }
    OptResult res;
    res.opt = make_rat(best, m);
    res.argmax.assign(n, 0);
    std::uint64_t idx = arg;
    for (int v = n - 1; v >= 0; --v) {
        res.argmax[v] = static_cast<int>(idx % q);
        idx /= q;
    }
    res.method = "brute";
    return res;
}

namespace {

bool is_prime(int q) {
    if (q < 2) return false;
    for (int d = 2; d * d <= q; ++d)
        if (q % d == 0) return false;
    return true;
}

// Recover (a, b) with sat(P) = {z : sum a_i z_i = b mod q}, or fail.
struct AffineForm {
    std::vector<int> a;
    int b = 0;
};

std::optional<AffineForm> detect_affine(const Predicate& P) {
    int q = P.q(), k = P.k;
    std::uint64_t N = P.table.size();
    std::uint64_t first_sat = N;
    long sat = 0;
    for (std::uint64_t i = 0; i < N; ++i) {
        if (P.sat(i)) {
            ++sat;
            if (first_sat == N) first_sat = i;
        }
    }
    if (sat == 0) return std::nullopt;
    if (sat == static_cast<long>(N)) return AffineForm{std::vector<int>(k, 0), 0};
    if (sat * q != static_cast<long>(N)) return std::nullopt;

    std::vector<int> z0 = index_to_tuple(first_sat, q, k);
    auto sat_at = [&](std::vector<int> z) {
        for (int& v : z) v = ((v % q) + q) % q;
        return P.sat(tuple_to_index(z, q));
    };
    AffineForm form;
    form.a.assign(k, 0);
    int pivot = -1;
    for (int i = 0; i < k; ++i) {
        std::vector<int> z = z0;
        z[i] += 1;
        if (!sat_at(z)) {
            pivot = i;  // a_pivot nonzero; rescale so a_pivot = 1
            break;
        }
    }
    if (pivot < 0) return std::nullopt;  // sat strictly smaller but shift-invariant: not affine
    form.a[pivot] = 1;
    for (int i = 0; i < k; ++i) {
        if (i == pivot) continue;
        bool found = false;
        for (int d = 0; d < q; ++d) {
            std::vector<int> z = z0;
            z[i] += 1;
            z[pivot] += d;
            if (sat_at(z)) {
                form.a[i] = ((q - d) % q);  // a_i + d * 1 = 0
                found = true;
                break;
            }
        }
        if (!found) return std::nullopt;
    }
    form.b = 0;
    for (int i = 0; i < k; ++i) form.b = (form.b + form.a[i] * z0[i]) % q;
    // Verify against the whole table.
    for (std::uint64_t idx = 0; idx < N; ++idx) {
        std::vector<int> z = index_to_tuple(idx, q, k);
        int s = 0;
        for (int i = 0; i < k; ++i) s = (s + form.a[i] * z[i]) % q;
        if ((s == form.b) != P.sat(idx)) return std::nullopt;
    }
    return form;
}

}  // namespace

bool xor_satisfiable(const Instance& inst) {
    inst.validate();
    int q = inst.q;
    if (!is_prime(q)) throw std::invalid_argument("xor_satisfiable: q must be prime");
    // Rows of the linear system over GF(q).
    std::vector<std::vector<int>> rows;
    for (int f = 0; f < inst.m(); ++f) {
        auto eff = inst.constraints[f].effective_predicate();
        if (!eff) throw std::invalid_argument("xor_satisfiable: constraint without predicate");
        auto form = detect_affine(*eff);
        if (!form)
            throw std::invalid_argument("xor_satisfiable: constraint " + std::to_string(f) +
                                        " is not an affine equation");
        std::vector<int> row(inst.n + 1, 0);
        const auto& scope = inst.constraints[f].scope;
        bool all_zero = true;
        for (size_t i = 0; i < scope.size(); ++i) {
            row[scope[i]] = form->a[i];
            if (form->a[i] != 0) all_zero = false;
        }
        row[inst.n] = form->b;
        if (all_zero && form->b != 0) return false;  // 0 = b, unsatisfiable constraint
        rows.push_back(std::move(row));
    }
    // Gaussian elimination.
    auto inv_mod = [&](int v) {
        for (int x = 1; x < q; ++x)
            if (x * v % q == 1) return x;
        throw std::logic_error("inv_mod");
    };
    int rank_row = 0;
    for (int col = 0; col < inst.n && rank_row < static_cast<int>(rows.size()); ++col) {
        int piv = -1;
        for (int r = rank_row; r < static_cast<int>(rows.size()); ++r)
            if (rows[r][col] != 0) { piv = r; break; }
        if (piv < 0) continue;
        std::swap(rows[rank_row], rows[piv]);
        int inv = inv_mod(rows[rank_row][col]);
        for (int& v : rows[rank_row]) v = v * inv % q;
        for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
            if (r == rank_row || rows[r][col] == 0) continue;
            int factor = rows[r][col];
            for (int cidx = 0; cidx <= inst.n; ++cidx)
                rows[r][cidx] = ((rows[r][cidx] - factor * rows[rank_row][cidx]) % q + q) % q;
        }
        ++rank_row;
    }
    for (const auto& row : rows) {
        bool zero = true;
        for (int cidx = 0; cidx < inst.n; ++cidx)
            if (row[cidx] != 0) { zero = false; break; }
        if (zero && row[inst.n] != 0) return false;
    }
    return true;
}

RationalDistribution marginal_bruteforce(const Instance& inst, const Subgraph& H,
                                         const std::vector<int>& T, long budget) {
    for (size_t i = 0; i + 1 < T.size(); ++i)
        if (T[i] >= T[i + 1]) throw std::invalid_argument("marginal_bruteforce: T must be increasing");
    int q = inst.q;

    // Support lists per constraint of H.
    std::vector<int> fs;
    std::vector<std::vector<std::uint64_t>> supp;
    double size_estimate = 1;
    for (const auto& [f, vars] : H.edges) {
        (void)vars;
        fs.push_back(f);
        std::vector<std::uint64_t> s;
        const auto& mu = inst.constraints[f].mu;
        for (std::uint64_t idx = 0; idx < mu.probs.size(); ++idx)
            if (mu.probs[idx] > 0) s.push_back(idx);
        size_estimate *= static_cast<double>(s.size());
        if (size_estimate > static_cast<double>(budget))
            throw std::runtime_error("marginal_bruteforce: budget exceeded");
        supp.push_back(std::move(s));
    }

    std::set<int> hvars = H.vbls();
    std::vector<int> inner;  // T inside H, in T order
    for (int v : T)
        if (hvars.count(v)) inner.push_back(v);

    std::map<std::vector<int>, Rat> inner_mass;
    Rat total(0);

    std::vector<int> assign(inst.n, -1);
    std::vector<std::uint64_t> choice(fs.size(), 0);
    auto rec = [&](auto&& self, size_t fi, Rat weight) -> void {
        if (fi == fs.size()) {
            total += weight;
            std::vector<int> key;
            for (int v : inner) key.push_back(assign[v]);
            inner_mass[key] += weight;
            return;
        }
        int f = fs[fi];
        const Constraint& c = inst.constraints[f];
        const auto& vars = H.edges.at(f);
        for (std::uint64_t widx : supp[fi]) {
            std::vector<int> w = index_to_tuple(widx, q, c.arity());
            // Check edge suggestions against already-pinned variables.
            bool ok = true;
            std::vector<int> pinned;
            for (size_t pos = 0; pos < c.scope.size(); ++pos) {
                int v = c.scope[pos];
                if (!std::binary_search(vars.begin(), vars.end(), v)) continue;  // edge not in H
                if (assign[v] == -1) {
                    assign[v] = w[pos];
                    pinned.push_back(v);
                } else if (assign[v] != w[pos]) {
                    ok = false;
                    break;
                }
            }
            if (ok) self(self, fi + 1, weight * c.mu.probs[widx]);
            for (int v : pinned) assign[v] = -1;
        }
    };
    rec(rec, 0, Rat(1));

    if (total == 0) throw std::logic_error("marginal_bruteforce: zero consistency mass");

    // Variables of T outside H are uniform and independent.
    RationalDistribution out;
    out.q = q;
    out.k = static_cast<int>(T.size());
    out.probs.assign(table_size(q, out.k), Rat(0));
    long outside = static_cast<long>(T.size() - inner.size());
    Rat unif = qpow(q, -outside);
    for (const auto& [key, mass] : inner_mass) {
        Rat p = mass / total * unif;
        // Distribute over all completions of the outside coordinates.
        std::vector<int> z(T.size(), 0);
        auto fill = [&](auto&& self, size_t ti, size_t ki) -> void {
            if (ti == T.size()) {
                out.probs[tuple_to_index(z, q)] += p;
                return;
            }
            if (hvars.count(T[ti])) {
                z[ti] = key[ki];
                self(self, ti + 1, ki + 1);
            } else {
                for (int c = 0; c < q; ++c) {
                    z[ti] = c;
                    self(self, ti + 1, ki);
                }
            }
        };
        fill(fill, 0, 0);
    }
    return out;
}

}  // namespace sospex
