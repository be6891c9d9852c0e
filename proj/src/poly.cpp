#include "sospex/poly.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace sospex {

MonomialIndex MonomialIndex::make(std::vector<std::pair<int, int>> terms) {
    std::sort(terms.begin(), terms.end());
    for (size_t i = 0; i + 1 < terms.size(); ++i)
        if (terms[i].first == terms[i + 1].first)
            throw std::invalid_argument("MonomialIndex: repeated variable");
    MonomialIndex m;
    m.terms = std::move(terms);
    return m;
}

std::vector<int> MonomialIndex::vars() const {
    std::vector<int> v;
    v.reserve(terms.size());
    for (const auto& [var, val] : terms) {
        (void)val;
        v.push_back(var);
    }
    return v;
}

std::set<int> MonomialIndex::var_set() const {
    std::set<int> v;
    for (const auto& [var, val] : terms) {
        (void)val;
        v.insert(var);
    }
    return v;
}

std::string MonomialIndex::to_string() const {
    if (terms.empty()) return "1";
    std::ostringstream os;
    for (const auto& [var, val] : terms) os << "[" << var << "=" << val << "]";
    return os.str();
}

bool MonomialIndex::operator<(const MonomialIndex& o) const {
    if (terms.size() != o.terms.size()) return terms.size() < o.terms.size();
    return terms < o.terms;
}

std::optional<MonomialIndex> monomial_product(const MonomialIndex& a, const MonomialIndex& b) {
    std::vector<std::pair<int, int>> merged;
    merged.reserve(a.terms.size() + b.terms.size());
    size_t i = 0, j = 0;
    while (i < a.terms.size() && j < b.terms.size()) {
        if (a.terms[i].first < b.terms[j].first) merged.push_back(a.terms[i++]);
        else if (a.terms[i].first > b.terms[j].first) merged.push_back(b.terms[j++]);
        else {
            if (a.terms[i].second != b.terms[j].second) return std::nullopt;  // x^{=c} x^{=c'} = 0
            merged.push_back(a.terms[i]);
            ++i;
            ++j;
        }
    }
    while (i < a.terms.size()) merged.push_back(a.terms[i++]);
    while (j < b.terms.size()) merged.push_back(b.terms[j++]);
    MonomialIndex m;
    m.terms = std::move(merged);
    return m;
}

Polynomial Polynomial::constant(const Rat& c) {
    Polynomial p;
    if (c != 0) p.coef[MonomialIndex{}] = c;
    return p;
}

Polynomial Polynomial::monomial(const MonomialIndex& m, const Rat& c) {
    Polynomial p;
    if (c != 0) p.coef[m] = c;
    return p;
}

Polynomial Polynomial::from_powers(const std::vector<std::tuple<int, int, int>>& var_val_pow,
                                   const Rat& c) {
    std::map<int, int> vals;
    for (const auto& [var, val, pow] : var_val_pow) {
        if (pow < 0) throw std::invalid_argument("from_powers: negative power");
        if (pow == 0) continue;
        auto it = vals.find(var);
        if (it == vals.end()) vals[var] = val;
        else if (it->second != val) return zero();  // conflicting indicators
    }
    std::vector<std::pair<int, int>> terms(vals.begin(), vals.end());
    return monomial(MonomialIndex::make(std::move(terms)), c);
}

int Polynomial::degree() const {
    int d = 0;
    for (const auto& [m, c] : coef) {
        (void)c;
        d = std::max(d, m.degree());
    }
    return d;
}

std::set<int> Polynomial::vbls() const {
    std::set<int> v;
    for (const auto& [m, c] : coef) {
        (void)c;
        for (const auto& [var, val] : m.terms) {
            (void)val;
            v.insert(var);
        }
    }
    return v;
}

void Polynomial::add_term(const MonomialIndex& m, const Rat& c) {
    if (c == 0) return;
    auto it = coef.find(m);
    if (it == coef.end()) {
        coef.emplace(m, c);
        return;
    }
    it->second += c;
    if (it->second == 0) coef.erase(it);
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    Polynomial r = *this;
    for (const auto& [m, c] : o.coef) r.add_term(m, c);
    return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    Polynomial r = *this;
    for (const auto& [m, c] : o.coef) r.add_term(m, -c);
    return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    Polynomial r;
    for (const auto& [ma, ca] : coef)
        for (const auto& [mb, cb] : o.coef)
            if (auto m = monomial_product(ma, mb)) r.add_term(*m, ca * cb);
    return r;
}

Polynomial Polynomial::operator*(const Rat& c) const {
    Polynomial r;
    if (c == 0) return r;
    for (const auto& [m, v] : coef) r.coef[m] = v * c;
    return r;
}

Rat Polynomial::eval_at(const std::vector<int>& assignment) const {
    Rat total(0);
    for (const auto& [m, c] : coef) {
        bool on = true;
        for (const auto& [var, val] : m.terms) {
            if (assignment[var] != val) {
                on = false;
                break;
            }
        }
        if (on) total += c;
    }
    return total;
}

std::string Polynomial::to_string() const {
    if (coef.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : coef) {
        if (!first) os << " + ";
        os << rat_to_string(c);
        if (m.degree() > 0) os << "*" << m.to_string();
        first = false;
    }
    return os.str();
}

Polynomial pm_monomial(const std::vector<int>& vars, int q) {
    Polynomial p = Polynomial::constant(Rat(1));
    for (int v : vars) {
        Polynomial factor = Polynomial::monomial(MonomialIndex::make({{v, 1}}), Rat(q)) -
                            Polynomial::constant(Rat(1));
        p = p * factor;
    }
    return p;
}

Polynomial parse_polynomial(const std::string& text) {
    Polynomial p;
    size_t i = 0;
    auto skip_ws = [&]() {
        while (i < text.size() && isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    bool first = true;
    while (true) {
        skip_ws();
        if (i >= text.size()) break;
        int sign = 1;
        if (!first || text[i] == '+' || text[i] == '-') {
            if (text[i] == '-') sign = -1;
            else if (text[i] != '+')
                throw std::invalid_argument("parse_polynomial: expected +/- at '" +
                                            text.substr(i) + "'");
            ++i;
        }
        first = false;
        skip_ws();
        Rat c(1);
        if (i < text.size() && (isdigit(static_cast<unsigned char>(text[i])))) {
            size_t start = i;
            while (i < text.size() && (isdigit(static_cast<unsigned char>(text[i])) || text[i] == '/'))
                ++i;
            c = rat_from_string(text.substr(start, i - start));
            skip_ws();
            if (i < text.size() && text[i] == '*') {
                ++i;
                skip_ws();
            }
        }
        std::vector<std::pair<int, int>> terms;
        while (i < text.size() && text[i] == '[') {
            size_t close = text.find(']', i);
            size_t eq = text.find('=', i);
            if (close == std::string::npos || eq == std::string::npos || eq > close)
                throw std::invalid_argument("parse_polynomial: malformed bracket");
            int var = std::stoi(text.substr(i + 1, eq - i - 1));
            int val = std::stoi(text.substr(eq + 1, close - eq - 1));
            terms.emplace_back(var, val);
            i = close + 1;
            skip_ws();
        }
        p.add_term(MonomialIndex::make(std::move(terms)), Rat(sign) * c);
    }
    return p;
}

}  // namespace sospex
