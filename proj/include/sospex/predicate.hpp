#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sospex/rational.hpp"

namespace sospex {

struct Caps {
    int max_q = 8;
    int max_k = 16;
};

// Symbols are canonically 0..q-1.
struct Alphabet {
    int q = 2;
};

// Tuples z in Omega^k are encoded base-q with coordinate 1 most significant:
// index = sum_i z_i * q^(k-i). Fixed so serialized tables are bit-exact.
std::uint64_t tuple_to_index(const std::vector<int>& z, int q);
std::vector<int> index_to_tuple(std::uint64_t idx, int q, int k);
std::uint64_t table_size(int q, int k);  // q^k, throws if it overflows 2^40

// k-ary relation over an alphabet of size q, stored as its full truth table.
struct Predicate {
    Alphabet alphabet;
    int k = 0;
    std::vector<std::uint8_t> table;  // length q^k, index as above
    long sat_count = 0;
    Rat mu_P;  // sat_count / q^k

    int q() const { return alphabet.q; }
    bool sat(std::uint64_t idx) const { return table[idx] != 0; }
    bool sat_tuple(const std::vector<int>& z) const { return sat(tuple_to_index(z, q())); }
    bool trivial() const { return sat_count == 0 || sat_count == static_cast<long>(table.size()); }
};

// Per-coordinate alphabet permutation; for q=2 this degenerates to a sign
// vector (identity or swap per coordinate).
struct LiteralPattern {
    std::vector<std::vector<int>> perms;  // k permutations of 0..q-1

    int k() const { return static_cast<int>(perms.size()); }
    int apply(int coord, int value) const { return perms[coord][value]; }
    static LiteralPattern identity(int q, int k);
    // For q = 2: entry true means "negate this coordinate".
    static LiteralPattern from_signs(const std::vector<bool>& negate);
    static LiteralPattern random(int q, int k, Rng& rng);
    bool is_valid(int q) const;
};

// (l . l2): apply l2 first, then l. apply_literals(apply_literals(P,l),l2)
// equals apply_literals(P, compose(l,l2)).
LiteralPattern compose(const LiteralPattern& l, const LiteralPattern& l2);

// Exact probability vector on Omega^k.
struct RationalDistribution {
    int q = 2;
    int k = 0;
    std::vector<Rat> probs;  // length q^k

    void validate() const;  // entries >= 0, sum exactly 1
    static RationalDistribution uniform(int q, int k);
    static RationalDistribution point_mass(int q, int k, const std::vector<int>& z);
    // Exact marginal onto the given coordinates (0-based, increasing).
    RationalDistribution marginal(const std::vector<int>& coords) const;
};

Predicate predicate_from_table(int q, int k, const std::vector<std::uint8_t>& table,
                               const Caps& caps = Caps{});

// Q(z) = P(l1(z1), ..., lk(zk)); satisfying count is preserved.
Predicate apply_literals(const Predicate& P, const LiteralPattern& l);

// mu_l(z) = mu(l(z)); preserves t-wise uniformity for every t.
RationalDistribution shift_distribution(const RationalDistribution& mu, const LiteralPattern& l);

// Named built-ins: "kxor:<k>:<b>" (q=2 parity, satisfied iff XOR of inputs
// equals b), "ksat:<k>" (q=2 OR), "one-in-three" (q=2, exactly one input 1).
// Also accepts inline JSON {"q":..,"k":..,"table":"bits"}.
Predicate parse_predicate_spec(const std::string& spec, const Caps& caps = Caps{});

std::string predicate_to_json(const Predicate& P);
Predicate predicate_from_json(const std::string& text, const Caps& caps = Caps{});

}  // namespace sospex
