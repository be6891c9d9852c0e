#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sospex/rational.hpp"

namespace sospex {

// A multilinear monomial in the indicator indeterminates: a set of
// (variable, value) pairs with distinct variables. x^{} is the constant 1.
struct MonomialIndex {
    std::vector<std::pair<int, int>> terms;  // sorted by variable id

    static MonomialIndex make(std::vector<std::pair<int, int>> terms);
    int degree() const { return static_cast<int>(terms.size()); }
    std::vector<int> vars() const;
    std::set<int> var_set() const;
    std::string to_string() const;

    bool operator==(const MonomialIndex&) const = default;
    // Total order respecting cardinality, lexicographic tie-break; the
    // default map/set ordering over MonomialIndex therefore walks monomials
    // in stage order.
    bool operator<(const MonomialIndex& o) const;
};

// Product with the multilinear reduction x^2 = x; a variable demanded at two
// different values makes the product the zero polynomial (nullopt).
std::optional<MonomialIndex> monomial_product(const MonomialIndex& a, const MonomialIndex& b);

// Polynomial over indicator monomials, stored multilinearized (powers of an
// indicator collapse, conflicting indicators vanish); zero coefficients are
// never stored.
struct Polynomial {
    std::map<MonomialIndex, Rat> coef;

    static Polynomial zero() { return {}; }
    static Polynomial constant(const Rat& c);
    static Polynomial monomial(const MonomialIndex& m, const Rat& c = Rat(1));
    // One raw power term coef * prod x_{v}^{=c}^pow, multilinearized.
    static Polynomial from_powers(const std::vector<std::tuple<int, int, int>>& var_val_pow,
                                  const Rat& c);

    bool is_zero() const { return coef.empty(); }
    int degree() const;                 // multilinear degree
    std::set<int> vbls() const;
    void add_term(const MonomialIndex& m, const Rat& c);

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(const Rat& c) const;

    // Evaluate on a concrete assignment (indicator semantics).
    Rat eval_at(const std::vector<int>& assignment) const;
    std::string to_string() const;
};

// Product of (q x_v^{=1} - 1) over the given variables: the +/-1 encoding of
// a Fourier monomial for q = 2, TRUE mapping to +1.
Polynomial pm_monomial(const std::vector<int>& vars, int q = 2);

// Micro-syntax: terms "coef * [v=c][v'=c']" joined by '+' or '-'; a bare
// coefficient is a constant term, a bare bracket group has coefficient 1.
Polynomial parse_polynomial(const std::string& text);

}  // namespace sospex
