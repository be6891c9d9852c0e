#include <doctest.h>

#include "sospex/params.hpp"

using namespace sospex;

TEST_SUITE("params") {

TEST_CASE("floor_scaled_log2 is exact") {
    // floor(64 * log2(10)) = floor(212.6) = 212
    CHECK(floor_scaled_log2(Rat(10), 64) == 212);
    CHECK(floor_scaled_log2(Rat(2), 64) == 64);
    CHECK(floor_scaled_log2(Rat(1), 64) == 0);
    CHECK(floor_scaled_log2(make_rat(5, 2), 2) == 2);  // (5/2)^2 = 6.25 -> floor log2 = 2
    CHECK_THROWS_AS(floor_scaled_log2(make_rat(1, 2), 64), std::invalid_argument);
}

TEST_CASE("weirdness inequality is monotone in c and exact at boundaries") {
    Rat zeta = make_rat(16, 53);
    // lambda = 2, K = 3, Delta = 10, beta = 1/2, n = 10^13
    long n = 10000000000000L;
    bool prev = true;
    long first_fail = -1;
    for (long c = 0; c < 200; c += 10) {
        bool now = weirdness_holds(c, n, Rat(10), 3, 2, zeta, make_rat(1, 2));
        if (prev && !now) first_fail = c;
        CHECK((prev || !now));  // once violated, stays violated
        prev = now;
    }
    CHECK(first_fail > 0);
}

TEST_CASE("suggest_parameters: boundary pinning on a grid") {
    struct Case {
        long n;
        long delta;
        int K;
        int tau;
    };
    for (const Case& c : {Case{1000000000000000L, 10, 3, 4}, Case{30000000000000000L, 12, 3, 4},
                          Case{200000000000L, 10, 3, 5}, Case{900000000000000L, 40, 4, 5}}) {
        Params p = suggest_parameters(c.n, Rat(c.delta), c.K, c.tau, make_rat(1, 2),
                                      ParamMode::General);
        CHECK(p.SMALL >= 1);
        int lambda = c.tau - 2;
        CHECK(weirdness_holds(2 * p.SMALL, c.n, Rat(c.delta), c.K, lambda, p.zeta, p.beta));
        CHECK(!weirdness_holds(2 * p.SMALL + 2, c.n, Rat(c.delta), c.K, lambda, p.zeta, p.beta));
        CHECK(Rat(c.K) <= p.zeta * Rat(p.SMALL));
        CHECK(Rat(3 * p.D) <= p.zeta * Rat(p.SMALL));
    }
}

TEST_CASE("general mode zeta approximates 1/log2(Delta)") {
    Params p = suggest_parameters(1000000000000000L, Rat(10), 3, 4, make_rat(1, 2),
                                  ParamMode::General);
    CHECK(p.zeta == make_rat(64, 212));  // 16/53 canonicalized
    CHECK(p.zeta == make_rat(16, 53));
}

TEST_CASE("large-lambda mode sets zeta to lambda/2") {
    Params p = suggest_parameters(2000000000000000L, Rat(16), 4, 6, make_rat(1, 4),
                                  ParamMode::LargeLambda);
    CHECK(p.zeta == Rat(2));  // lambda = 4
    CHECK(p.SMALL >= 1);
}

TEST_CASE("K > zeta * SMALL is an error directing to larger n") {
    // Desk-scale n gives SMALL = 0 at lambda = 1: the counting constants are
    // asymptotic.
    CHECK_THROWS_WITH_AS(
        suggest_parameters(1000000L, Rat(10), 3, 3, make_rat(1, 2), ParamMode::General),
        doctest::Contains("increase n"), std::invalid_argument);
}

TEST_CASE("epsilon is exact when n = Delta^2 is a perfect square") {
    // 2^(log n / (2 log Delta)) / sqrt(n) with n = 10^4, Delta = 100: the
    // exponent is exactly 1 in any log base, so eps = 2/100 = 1/50.
    CHECK(eps_estimate(10000L, Rat(100)) == make_rat(1, 50));
    // n = Delta^4: exponent 2, eps = 4/n^(1/2)
    CHECK(eps_estimate(10000L, Rat(10)) == make_rat(4, 100));
    // irrational case: dyadic approximation close to the double value
    Rat approx = eps_estimate(1000L, Rat(10));
    CHECK(approx > 0);
    CHECK(approx < 1);
}

TEST_CASE("theorem violations are surfaced, not fatal") {
    Params p;
    p.tau = 3;
    p.zeta = make_rat(1, 5);
    p.SMALL = 20;
    p.D = 2;
    p.K = 3;
    p.validate_basic();
    auto v = p.theorem_violations(20);  // n = 20: SMALL > n/2 and D > cap/3
    CHECK(!v.empty());
}

TEST_CASE("params json round trip") {
    Params p;
    p.tau = 4;
    p.zeta = make_rat(16, 53);
    p.SMALL = 12;
    p.D = 1;
    p.beta = make_rat(1, 3);
    p.eps = make_rat(1, 50);
    p.K = 3;
    Params back = params_from_json(params_to_json(p));
    CHECK(back.zeta == p.zeta);
    CHECK(back.SMALL == p.SMALL);
    CHECK(back.eps == p.eps);
}

}  // TEST_SUITE
