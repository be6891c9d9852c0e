#include "sospex/predicate.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace sospex {

using nlohmann::json;

std::uint64_t tuple_to_index(const std::vector<int>& z, int q) {
    std::uint64_t idx = 0;
    for (int v : z) {
        if (v < 0 || v >= q) throw std::invalid_argument("tuple_to_index: symbol out of range");
        idx = idx * static_cast<std::uint64_t>(q) + static_cast<std::uint64_t>(v);
    }
    return idx;
}

std::vector<int> index_to_tuple(std::uint64_t idx, int q, int k) {
    std::vector<int> z(k);
    for (int i = k - 1; i >= 0; --i) {
        z[i] = static_cast<int>(idx % q);
        idx /= q;
    }
    return z;
}

std::uint64_t table_size(int q, int k) {
    std::uint64_t s = 1;
    for (int i = 0; i < k; ++i) {
        s *= static_cast<std::uint64_t>(q);
        if (s > (1ULL << 40)) throw std::invalid_argument("table_size: q^k too large");
    }
    return s;
}

LiteralPattern LiteralPattern::identity(int q, int k) {
    LiteralPattern l;
    l.perms.assign(k, std::vector<int>(q));
    for (auto& p : l.perms) std::iota(p.begin(), p.end(), 0);
    return l;
}

LiteralPattern LiteralPattern::from_signs(const std::vector<bool>& negate) {
    LiteralPattern l;
    for (bool neg : negate) {
        l.perms.push_back(neg ? std::vector<int>{1, 0} : std::vector<int>{0, 1});
    }
    return l;
}

LiteralPattern LiteralPattern::random(int q, int k, Rng& rng) {
    LiteralPattern l = identity(q, k);
    for (auto& p : l.perms) {
        for (int i = q - 1; i > 0; --i) {
            int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
            std::swap(p[i], p[j]);
        }
    }
    return l;
}

bool LiteralPattern::is_valid(int q) const {
    for (const auto& p : perms) {
        if (static_cast<int>(p.size()) != q) return false;
        std::vector<bool> seen(q, false);
        for (int v : p) {
            if (v < 0 || v >= q || seen[v]) return false;
            seen[v] = true;
        }
    }
    return true;
}

LiteralPattern compose(const LiteralPattern& l, const LiteralPattern& l2) {
    if (l.k() != l2.k()) throw std::invalid_argument("compose: arity mismatch");
    LiteralPattern r;
    r.perms.resize(l.k());
    for (int i = 0; i < l.k(); ++i) {
        int q = static_cast<int>(l.perms[i].size());
        r.perms[i].resize(q);
        for (int c = 0; c < q; ++c) r.perms[i][c] = l.perms[i][l2.perms[i][c]];
    }
    return r;
}

void RationalDistribution::validate() const {
    if (probs.size() != table_size(q, k))
        throw std::invalid_argument("RationalDistribution: wrong length");
    Rat sum(0);
    for (const Rat& p : probs) {
        if (p < 0) throw std::invalid_argument("RationalDistribution: negative entry");
        sum += p;
    }
    if (sum != 1) throw std::invalid_argument("RationalDistribution: entries sum to " + rat_to_string(sum));
}

RationalDistribution RationalDistribution::uniform(int q, int k) {
    RationalDistribution d;
    d.q = q;
    d.k = k;
    std::uint64_t sz = table_size(q, k);
    d.probs.assign(sz, make_rat(1, static_cast<long>(sz)));
    return d;
}

RationalDistribution RationalDistribution::point_mass(int q, int k, const std::vector<int>& z) {
    RationalDistribution d;
    d.q = q;
    d.k = k;
    d.probs.assign(table_size(q, k), Rat(0));
    d.probs[tuple_to_index(z, q)] = 1;
    return d;
}

RationalDistribution RationalDistribution::marginal(const std::vector<int>& coords) const {
    for (size_t i = 0; i + 1 < coords.size(); ++i)
        if (coords[i] >= coords[i + 1]) throw std::invalid_argument("marginal: coords not increasing");
    for (int c : coords)
        if (c < 0 || c >= k) throw std::invalid_argument("marginal: coord out of range");
    RationalDistribution m;
    m.q = q;
    m.k = static_cast<int>(coords.size());
    m.probs.assign(table_size(q, m.k), Rat(0));
    for (std::uint64_t idx = 0; idx < probs.size(); ++idx) {
        if (probs[idx] == 0) continue;
        std::vector<int> z = index_to_tuple(idx, q, k);
        std::vector<int> zi(m.k);
        for (int i = 0; i < m.k; ++i) zi[i] = z[coords[i]];
        m.probs[tuple_to_index(zi, q)] += probs[idx];
    }
    return m;
}

Predicate predicate_from_table(int q, int k, const std::vector<std::uint8_t>& table, const Caps& caps) {
    if (q < 2 || q > caps.max_q) throw std::invalid_argument("predicate_from_table: q out of range");
    if (k < 1 || k > caps.max_k) throw std::invalid_argument("predicate_from_table: k out of range");
    if (table.size() != table_size(q, k))
        throw std::invalid_argument("predicate_from_table: table length != q^k");
    Predicate P;
    P.alphabet.q = q;
    P.k = k;
    P.table = table;
    for (std::uint8_t b : table) P.sat_count += (b != 0);
    P.mu_P = make_rat(Int(P.sat_count), Int(static_cast<long>(table.size())));
    return P;
}

Predicate apply_literals(const Predicate& P, const LiteralPattern& l) {
    if (l.k() != P.k) throw std::invalid_argument("apply_literals: arity mismatch");
    if (!l.is_valid(P.q())) throw std::invalid_argument("apply_literals: invalid pattern");
    Predicate Q = P;
    for (std::uint64_t idx = 0; idx < P.table.size(); ++idx) {
        std::vector<int> z = index_to_tuple(idx, P.q(), P.k);
        for (int i = 0; i < P.k; ++i) z[i] = l.apply(i, z[i]);
        Q.table[idx] = P.table[tuple_to_index(z, P.q())];
    }
    return Q;
}

RationalDistribution shift_distribution(const RationalDistribution& mu, const LiteralPattern& l) {
    if (l.k() != mu.k) throw std::invalid_argument("shift_distribution: arity mismatch");
    if (!l.is_valid(mu.q)) throw std::invalid_argument("shift_distribution: invalid pattern");
    RationalDistribution out = mu;
    for (std::uint64_t idx = 0; idx < mu.probs.size(); ++idx) {
        std::vector<int> z = index_to_tuple(idx, mu.q, mu.k);
        for (int i = 0; i < mu.k; ++i) z[i] = l.apply(i, z[i]);
        out.probs[idx] = mu.probs[tuple_to_index(z, mu.q)];
    }
    return out;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    size_t pos = 0;
    while (true) {
        size_t next = s.find(sep, pos);
        parts.push_back(s.substr(pos, next == std::string::npos ? next : next - pos));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return parts;
}

}  // namespace

Predicate parse_predicate_spec(const std::string& spec, const Caps& caps) {
    if (!spec.empty() && spec.front() == '{') return predicate_from_json(spec, caps);
    if (spec == "one-in-three") {
        std::vector<std::uint8_t> t(8, 0);
        t[tuple_to_index({0, 0, 1}, 2)] = 1;
        t[tuple_to_index({0, 1, 0}, 2)] = 1;
        t[tuple_to_index({1, 0, 0}, 2)] = 1;
        return predicate_from_table(2, 3, t, caps);
    }
    auto parts = split(spec, ':');
    if (parts[0] == "kxor") {
        if (parts.size() != 3) throw std::invalid_argument("predicate spec: want kxor:<k>:<b>");
        int k = std::stoi(parts[1]);
        int b = std::stoi(parts[2]);
        if (b != 0 && b != 1) throw std::invalid_argument("kxor: b must be 0 or 1");
        std::vector<std::uint8_t> t(table_size(2, k), 0);
        for (std::uint64_t idx = 0; idx < t.size(); ++idx) {
            int parity = __builtin_popcountll(idx) & 1;
            t[idx] = (parity == b) ? 1 : 0;
        }
        return predicate_from_table(2, k, t, caps);
    }
    if (parts[0] == "ksat") {
        if (parts.size() != 2) throw std::invalid_argument("predicate spec: want ksat:<k>");
        int k = std::stoi(parts[1]);
        std::vector<std::uint8_t> t(table_size(2, k), 1);
        t[0] = 0;  // only the all-zero assignment falsifies an all-positive clause
        return predicate_from_table(2, k, t, caps);
    }
    throw std::invalid_argument("unknown predicate spec '" + spec + "'");
}

std::string predicate_to_json(const Predicate& P) {
    json j;
    j["q"] = P.q();
    j["k"] = P.k;
    std::string bits(P.table.size(), '0');
    for (size_t i = 0; i < P.table.size(); ++i)
        if (P.table[i]) bits[i] = '1';
    j["table"] = bits;
    return j.dump();
}

Predicate predicate_from_json(const std::string& text, const Caps& caps) {
    json j = json::parse(text);
    int q = j.at("q").get<int>();
    int k = j.at("k").get<int>();
    std::string bits = j.at("table").get<std::string>();
    std::vector<std::uint8_t> t;
    t.reserve(bits.size());
    for (char c : bits) {
        if (c != '0' && c != '1') throw std::invalid_argument("predicate table: bad bitstring");
        t.push_back(c == '1' ? 1 : 0);
    }
    return predicate_from_table(q, k, t, caps);
}

}  // namespace sospex
