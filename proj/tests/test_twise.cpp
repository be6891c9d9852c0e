#include <doctest.h>

#include "helpers.hpp"
#include "sospex/oracle.hpp"
#include "sospex/twise.hpp"

using namespace sospex;

namespace {

Rat off_support_mass(const Predicate& P, const RationalDistribution& mu) {
    Rat off(0);
    for (std::uint64_t z = 0; z < mu.probs.size(); ++z)
        if (!P.sat(z)) off += mu.probs[z];
    return off;
}

std::vector<Predicate> zoo() {
    return {parse_predicate_spec("one-in-three"), parse_predicate_spec("kxor:3:1"),
            parse_predicate_spec("kxor:3:0"), parse_predicate_spec("ksat:3"),
            parse_predicate_spec("kxor:4:1")};
}

}  // namespace

TEST_SUITE("twise") {

TEST_CASE("one-in-three worked values") {
    Predicate P = parse_predicate_spec("one-in-three");
    DeltaResult d2 = delta(P, 2);
    CHECK(d2.value == make_rat(1, 4));
    // Witness is the uniform distribution on odd-weight inputs.
    for (std::uint64_t z = 0; z < 8; ++z) {
        Rat expect = (__builtin_popcountll(z) % 2 == 1) ? make_rat(1, 4) : Rat(0);
        CHECK(d2.witness.probs[z] == expect);
    }
    CHECK(!twise_check(d2.witness, 2));
    CHECK(off_support_mass(P, d2.witness) == d2.value);

    DeltaResult d3 = delta(P, 3);
    CHECK(d3.value == make_rat(5, 8));
    for (const Rat& p : d3.witness.probs) CHECK(p == make_rat(1, 8));
}

TEST_CASE("trivial full predicate has delta zero") {
    Predicate full = predicate_from_table(2, 3, std::vector<std::uint8_t>(8, 1));
    for (int t = 1; t <= 3; ++t) CHECK(delta(full, t).value == 0);
}

TEST_CASE("3-xor supports pairwise but not 3-wise uniformity") {
    Predicate X = parse_predicate_spec("kxor:3:1");
    SupportResult s2 = supports_twise(X, 2);
    CHECK(s2.feasible);
    CHECK(!twise_check(s2.witness, 2));
    CHECK(off_support_mass(X, s2.witness) == 0);

    SupportResult s3 = supports_twise(X, 3);
    CHECK(!s3.feasible);
    CHECK(s3.delta_value == make_rat(1, 2));  // uniform is the only 3-wise uniform distribution
}

TEST_CASE("complexity of the zoo") {
    CHECK(complexity(parse_predicate_spec("kxor:3:1")).value == 3);
    ComplexityResult c = complexity(parse_predicate_spec("one-in-three"));
    CHECK(c.value == 3);
    CHECK(c.failures_below_3 == std::vector<int>{1, 2});
    // OR supports pairwise uniformity (odd-weight strings) but no nontrivial
    // predicate survives tau = k.
    ComplexityResult s = complexity(parse_predicate_spec("ksat:3"));
    CHECK(s.value == 3);
    CHECK(s.failures_below_3.empty());
    Predicate full = predicate_from_table(2, 3, std::vector<std::uint8_t>(8, 1));
    CHECK(!complexity(full).value.has_value());  // k-wise uniform and supported
    Predicate empty = predicate_from_table(2, 3, std::vector<std::uint8_t>(8, 0));
    CHECK_THROWS_AS(complexity(empty), std::invalid_argument);
    CHECK_THROWS_AS(supports_twise(full, 4), std::invalid_argument);
}

TEST_CASE("witness exactness, monotonicity and the t = k endpoint") {
    for (const Predicate& P : zoo()) {
        Rat prev(-1);
        for (int t = 1; t <= P.k; ++t) {
            DeltaResult d = delta(P, t);
            CHECK(!twise_check(d.witness, t));
            CHECK(off_support_mass(P, d.witness) == d.value);
            CHECK(d.value >= prev);
            prev = d.value;
        }
        CHECK(delta(P, P.k).value == Rat(1) - P.mu_P);
    }
}

TEST_CASE("literal invariance of delta") {
    Rng rng(23);
    for (const Predicate& P : zoo()) {
        if (P.k > 3) continue;
        LiteralPattern l = LiteralPattern::random(P.q(), P.k, rng);
        for (int t = 1; t <= P.k; ++t)
            CHECK(delta(apply_literals(P, l), t).value == delta(P, t).value);
    }
}

TEST_CASE("single-LP reduction agrees with the two-distribution TV formulation") {
    for (const Predicate& P : zoo()) {
        if (P.k != 3) continue;
        for (int t = 1; t <= 3; ++t)
            CHECK(delta(P, t).value == testing::delta_two_distribution_lp(P, t));
    }
}

TEST_CASE("report serialization carries exact rationals") {
    TwiseReport rep = analyze_predicate(parse_predicate_spec("one-in-three"));
    std::string js = twise_report_to_json(rep);
    CHECK(js.find("\"1/4\"") != std::string::npos);
    CHECK(js.find("\"5/8\"") != std::string::npos);
    CHECK(rep.records.size() == 3);
}

}  // TEST_SUITE
