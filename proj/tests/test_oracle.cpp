#include <doctest.h>

#include "sospex/oracle.hpp"

using namespace sospex;

TEST_SUITE("oracle") {

TEST_CASE("twise_check basics") {
    CHECK(!twise_check(RationalDistribution::uniform(2, 3), 3));
    auto viol = twise_check(RationalDistribution::point_mass(2, 3, {1, 0, 1}), 1);
    REQUIRE(viol.has_value());
    CHECK(viol->coords == std::vector<int>{0});
    CHECK(viol->mass != make_rat(1, 2));

    RationalDistribution odd;
    odd.q = 2;
    odd.k = 3;
    odd.probs.assign(8, Rat(0));
    for (std::uint64_t idx = 0; idx < 8; ++idx)
        if (__builtin_popcountll(idx) % 2 == 1) odd.probs[idx] = make_rat(1, 4);
    CHECK(!twise_check(odd, 2));
    CHECK(twise_check(odd, 3).has_value());
}

TEST_CASE("brute_opt on hand instances") {
    Instance one = build_fixture("star:1:0");
    OptResult r = brute_opt(one);
    CHECK(r.opt == 1);
    CHECK(one.constraints[0].satisfied_by(r.argmax));

    // the same scope constrained to both parities: exactly one can hold
    Instance pair;
    pair.n = 3;
    pair.q = 2;
    pair.tau = 3;
    for (int b : {0, 1}) {
        Constraint c;
        c.scope = {0, 1, 2};
        c.pred = parse_predicate_spec("kxor:3:" + std::to_string(b));
        c.mu.q = 2;
        c.mu.k = 3;
        c.mu.probs.assign(8, Rat(0));
        for (std::uint64_t z = 0; z < 8; ++z)
            if (c.pred->sat(z)) c.mu.probs[z] = make_rat(1, 4);
        pair.constraints.push_back(c);
    }
    pair.validate();
    CHECK(brute_opt(pair).opt == make_rat(1, 2));
}

TEST_CASE("serial Gray-code walk agrees with the parallel kernel") {
    Predicate X = parse_predicate_spec("kxor:3:1");
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        Instance inst = generate(9, 12, X, 3, seed);
        OptResult a = brute_opt(inst);
        OptResult b = brute_opt_serial(inst);
        CHECK(a.opt == b.opt);
        // both witnesses achieve the same satisfied count
        auto count = [&](const std::vector<int>& x) {
            int c = 0;
            for (const auto& con : inst.constraints) c += con.satisfied_by(x);
            return c;
        };
        CHECK(make_rat(count(a.argmax), inst.m()) == a.opt);
        CHECK(make_rat(count(b.argmax), inst.m()) == b.opt);
    }
}

TEST_CASE("brute_opt honors the budget") {
    Predicate X = parse_predicate_spec("kxor:3:1");
    Instance inst = generate(30, 5, X, 3, 0);
    CHECK_THROWS_AS(brute_opt(inst, 1 << 20), std::runtime_error);
}

TEST_CASE("xor_satisfiable matches brute force on random instances") {
    Predicate X = parse_predicate_spec("kxor:3:0");
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        Instance inst = generate(10, 14, X, 3, seed);
        CHECK(xor_satisfiable(inst) == (brute_opt(inst).opt == 1));
    }
}

TEST_CASE("xor_satisfiable on the fixtures") {
    Instance blk = build_fixture("block");
    CHECK(xor_satisfiable(blk));
    // contradict the block: duplicate a constraint with opposite parity
    Instance bad2 = blk;
    Constraint flip = blk.constraints[0];
    int b_old = flip.pred->sat_tuple({1, 0, 0}) ? 1 : 0;
    flip.pred = parse_predicate_spec("kxor:3:" + std::to_string(1 - b_old));
    flip.mu.probs.assign(8, Rat(0));
    for (std::uint64_t z = 0; z < 8; ++z)
        if (flip.pred->sat(z)) flip.mu.probs[z] = make_rat(1, 4);
    bad2.constraints.push_back(flip);
    bad2.validate();
    CHECK(!xor_satisfiable(bad2));

    Instance empty;
    empty.n = 2;
    empty.q = 2;
    empty.tau = 3;
    CHECK(xor_satisfiable(empty));
}

TEST_CASE("xor_satisfiable rejects non-affine constraints") {
    Predicate P = parse_predicate_spec("one-in-three");
    Instance inst;
    inst.n = 3;
    inst.q = 2;
    inst.tau = 3;
    Constraint c;
    c.scope = {0, 1, 2};
    c.pred = P;
    c.mu.q = 2;
    c.mu.k = 3;
    c.mu.probs.assign(8, Rat(0));
    for (std::uint64_t z = 0; z < 8; ++z)
        if (__builtin_popcountll(z) % 2 == 1) c.mu.probs[z] = make_rat(1, 4);
    inst.constraints.push_back(c);
    inst.validate();
    CHECK_THROWS_AS(xor_satisfiable(inst), std::invalid_argument);
}

TEST_CASE("ternary alphabet linear equations") {
    // x0 + x1 + x2 = 0 (mod 3) and x0 + 2 x1 + x2 = 1 (mod 3)
    auto linear_pred = [](const std::vector<int>& a, int b) {
        std::vector<std::uint8_t> t(27, 0);
        for (std::uint64_t z = 0; z < 27; ++z) {
            std::vector<int> zz = index_to_tuple(z, 3, 3);
            int s = 0;
            for (int i = 0; i < 3; ++i) s += a[i] * zz[i];
            t[z] = (s % 3 == b);
        }
        return predicate_from_table(3, 3, t);
    };
    Instance inst;
    inst.n = 3;
    inst.q = 3;
    inst.tau = 3;
    for (auto [a, b] : std::vector<std::pair<std::vector<int>, int>>{{{1, 1, 1}, 0},
                                                                     {{1, 2, 1}, 1}}) {
        Constraint c;
        c.scope = {0, 1, 2};
        c.pred = linear_pred(a, b);
        c.mu.q = 3;
        c.mu.k = 3;
        c.mu.probs.assign(27, Rat(0));
        for (std::uint64_t z = 0; z < 27; ++z)
            if (c.pred->sat(z)) c.mu.probs[z] = make_rat(1, 9);
        inst.constraints.push_back(c);
    }
    inst.validate();
    CHECK(xor_satisfiable(inst) == (brute_opt(inst).opt == 1));
    CHECK(xor_satisfiable(inst));
}

TEST_CASE("random one-in-three instances sit near the 3/8 regime at high density") {
    Predicate P = parse_predicate_spec("one-in-three");
    for (std::uint64_t seed : {0ULL, 1ULL, 2ULL}) {
        Instance inst = generate(16, 320, P, 3, seed);
        OptResult r = brute_opt(inst);
        CHECK(r.opt >= make_rat(30, 100));
        CHECK(r.opt <= make_rat(55, 100));
    }
}

TEST_CASE("marginal_bruteforce endpoints") {
    Instance st = build_fixture("star:2:0");
    Subgraph empty;
    RationalDistribution u = marginal_bruteforce(st, empty, {0, 3});
    for (const Rat& p : u.probs) CHECK(p == make_rat(1, 4));

    Subgraph one = Subgraph::full_neighborhood(st, 0);
    std::vector<int> scope = st.constraints[0].scope;
    std::sort(scope.begin(), scope.end());
    CHECK(marginal_bruteforce(st, one, scope).probs == st.constraints[0].mu.probs);
}

}  // TEST_SUITE
