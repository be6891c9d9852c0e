#include <doctest.h>

#include "sospex/oracle.hpp"
#include "sospex/predicate.hpp"

using namespace sospex;

TEST_SUITE("predicate") {

TEST_CASE("one-in-three derived statistics") {
    Predicate P = parse_predicate_spec("one-in-three");
    CHECK(P.k == 3);
    CHECK(P.sat_count == 3);
    CHECK(P.mu_P == make_rat(3, 8));
    CHECK(!P.trivial());
    CHECK(P.sat_tuple({0, 0, 1}));
    CHECK(P.sat_tuple({0, 1, 0}));
    CHECK(P.sat_tuple({1, 0, 0}));
    CHECK(!P.sat_tuple({1, 1, 0}));
}

TEST_CASE("xor and sat builtins") {
    Predicate X = parse_predicate_spec("kxor:3:1");
    CHECK(X.sat_count == 4);
    CHECK(X.mu_P == make_rat(1, 2));
    CHECK(X.sat_tuple({1, 0, 0}));
    CHECK(!X.sat_tuple({1, 1, 0}));

    Predicate S = parse_predicate_spec("ksat:3");
    CHECK(S.sat_count == 7);
    CHECK(!S.sat_tuple({0, 0, 0}));
}

TEST_CASE("trivial predicate flagged, dimension mismatch rejected") {
    std::vector<std::uint8_t> ones(8, 1);
    Predicate P = predicate_from_table(2, 3, ones);
    CHECK(P.sat_count == 8);
    CHECK(P.trivial());
    CHECK_THROWS_AS(predicate_from_table(2, 3, std::vector<std::uint8_t>(7, 1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(predicate_from_table(1, 3, ones), std::invalid_argument);
}

TEST_CASE("tuple encoding: coordinate 1 most significant") {
    CHECK(tuple_to_index({1, 0, 0}, 2) == 4);
    CHECK(tuple_to_index({0, 0, 1}, 2) == 1);
    CHECK(index_to_tuple(5, 2, 3) == std::vector<int>{1, 0, 1});
    CHECK(tuple_to_index({2, 1}, 3) == 7);
}

TEST_CASE("apply_literals: parity flip and identity") {
    Predicate X1 = parse_predicate_spec("kxor:3:1");
    Predicate X0 = parse_predicate_spec("kxor:3:0");
    LiteralPattern neg1 = LiteralPattern::from_signs({true, false, false});
    CHECK(apply_literals(X1, neg1).table == X0.table);
    LiteralPattern id = LiteralPattern::identity(2, 3);
    CHECK(apply_literals(X1, id).table == X1.table);
}

TEST_CASE("apply_literals: negate-all of one-in-three, checked by enumeration") {
    Predicate P = parse_predicate_spec("one-in-three");
    LiteralPattern negall = LiteralPattern::from_signs({true, true, true});
    Predicate Q = apply_literals(P, negall);
    CHECK(Q.sat_count == 3);
    for (std::uint64_t idx = 0; idx < 8; ++idx) {
        std::vector<int> z = index_to_tuple(idx, 2, 3);
        int zeros = 0;
        for (int v : z) zeros += (v == 0);
        CHECK(Q.sat(idx) == (zeros == 1));  // exactly one false
    }
}

TEST_CASE("apply_literals is a group action and preserves mu_P") {
    Rng rng(11);
    for (int q : {2, 3}) {
        for (int trial = 0; trial < 20; ++trial) {
            int k = 3;
            std::vector<std::uint8_t> table(table_size(q, k));
            for (auto& b : table) b = static_cast<std::uint8_t>(rng.below(2));
            table[0] = 1;  // avoid fully empty
            Predicate P = predicate_from_table(q, k, table);
            LiteralPattern l = LiteralPattern::random(q, k, rng);
            LiteralPattern l2 = LiteralPattern::random(q, k, rng);
            Predicate lhs = apply_literals(apply_literals(P, l), l2);
            Predicate rhs = apply_literals(P, compose(l, l2));
            CHECK(lhs.table == rhs.table);
            CHECK(apply_literals(P, l).mu_P == P.mu_P);
        }
    }
}

TEST_CASE("shift_distribution basics") {
    RationalDistribution u = RationalDistribution::uniform(2, 3);
    Rng rng(3);
    LiteralPattern l = LiteralPattern::random(2, 3, rng);
    CHECK(shift_distribution(u, l).probs == u.probs);

    // uniform on odd-parity triples, negate coordinate 1 -> even parity
    RationalDistribution odd;
    odd.q = 2;
    odd.k = 3;
    odd.probs.assign(8, Rat(0));
    for (std::uint64_t idx = 0; idx < 8; ++idx)
        if (__builtin_popcountll(idx) % 2 == 1) odd.probs[idx] = make_rat(1, 4);
    LiteralPattern neg1 = LiteralPattern::from_signs({true, false, false});
    RationalDistribution shifted = shift_distribution(odd, neg1);
    for (std::uint64_t idx = 0; idx < 8; ++idx)
        CHECK(shifted.probs[idx] == ((__builtin_popcountll(idx) % 2 == 0) ? make_rat(1, 4) : Rat(0)));

    RationalDistribution pm = RationalDistribution::point_mass(2, 3, {0, 0, 0});
    LiteralPattern negall = LiteralPattern::from_signs({true, true, true});
    CHECK(shift_distribution(pm, negall).probs[tuple_to_index({1, 1, 1}, 2)] == 1);
}

TEST_CASE("shift_distribution preserves t-wise uniformity verdicts") {
    Rng rng(17);
    for (int trial = 0; trial < 15; ++trial) {
        // random distribution with small rational weights
        RationalDistribution mu;
        mu.q = 2;
        mu.k = 3;
        long total = 0;
        std::vector<long> w(8);
        for (auto& x : w) {
            x = static_cast<long>(rng.below(4));
            total += x;
        }
        if (total == 0) {
            w[0] = 1;
            total = 1;
        }
        for (long x : w) mu.probs.push_back(make_rat(x, total));
        LiteralPattern l = LiteralPattern::random(2, 3, rng);
        RationalDistribution shifted = shift_distribution(mu, l);
        for (int t = 1; t <= 3; ++t)
            CHECK(twise_check(mu, t).has_value() == twise_check(shifted, t).has_value());
    }
}

TEST_CASE("arity mismatch rejected") {
    Predicate P = parse_predicate_spec("kxor:3:1");
    LiteralPattern l = LiteralPattern::identity(2, 4);
    CHECK_THROWS_AS(apply_literals(P, l), std::invalid_argument);
}

TEST_CASE("json round trip") {
    Predicate P = parse_predicate_spec("one-in-three");
    Predicate back = predicate_from_json(predicate_to_json(P));
    CHECK(back.table == P.table);
    CHECK(back.mu_P == P.mu_P);
    Predicate inline_spec = parse_predicate_spec(predicate_to_json(P));
    CHECK(inline_spec.table == P.table);
}

TEST_CASE("distribution marginal and validation") {
    RationalDistribution u = RationalDistribution::uniform(2, 3);
    RationalDistribution m = u.marginal({0, 2});
    CHECK(m.k == 2);
    for (const Rat& p : m.probs) CHECK(p == make_rat(1, 4));
    RationalDistribution bad;
    bad.q = 2;
    bad.k = 1;
    bad.probs = {make_rat(1, 2), make_rat(1, 3)};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

}  // TEST_SUITE
