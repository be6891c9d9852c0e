#include "sospex/params.hpp"

#include <json.hpp>

#include <cmath>
#include <stdexcept>

namespace sospex {

using nlohmann::json;

void Params::validate_basic() const {
    if (tau < 3) throw std::invalid_argument("params: tau < 3");
    if (zeta <= 0) throw std::invalid_argument("params: zeta <= 0");
    if (SMALL < 1) throw std::invalid_argument("params: SMALL < 1");
    if (D < 0) throw std::invalid_argument("params: D < 0");
    if (K < 3) throw std::invalid_argument("params: K < 3");
}

std::vector<std::string> Params::theorem_violations(long n) const {
    std::vector<std::string> v;
    if (Rat(K) > degree_cap()) v.push_back("K > zeta*SMALL");
    if (Rat(3 * D) > degree_cap()) v.push_back("D > zeta*SMALL/3");
    if (2 * SMALL > n) v.push_back("SMALL > n/2");
    if (zeta >= 1) v.push_back("zeta >= 1");
    return v;
}

long floor_scaled_log2(const Rat& x, long scale) {
    if (x <= 0) throw std::invalid_argument("floor_scaled_log2: x <= 0");
    // largest t with 2^t <= x^scale
    Int num, den;
    mpz_pow_ui(num.get_mpz_t(), x.get_num().get_mpz_t(), static_cast<unsigned long>(scale));
    mpz_pow_ui(den.get_mpz_t(), x.get_den().get_mpz_t(), static_cast<unsigned long>(scale));
    if (num < den) throw std::invalid_argument("floor_scaled_log2: x < 1 unsupported");
    Int ratio = num / den;  // floor(x^scale), >= 1
    long t = static_cast<long>(mpz_sizeinbase(ratio.get_mpz_t(), 2)) - 1;
    // floor may undershoot the true power; fix up by direct comparison
    while (true) {
        Int p;
        mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(t + 1));
        if (p * den <= num) ++t;
        else break;
    }
    while (t > 0) {
        Int p;
        mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(t));
        if (p * den > num) --t;
        else break;
    }
    return t;
}

bool weirdness_holds(long c, long n, const Rat& delta, int K, int lambda, const Rat& zeta,
                     const Rat& beta) {
    if (c == 0) return true;
    Rat expo = Rat(lambda) - zeta;  // exponent numerator over 2, as a/b
    if (expo <= 0) throw std::invalid_argument("weirdness: zeta >= lambda");
    long a = static_cast<long>(expo.get_num().get_si());
    long b = static_cast<long>(expo.get_den().get_si());
    // lhs = 20^K * Delta * (Kc/n)^(a/(2b)), rhs = beta / 50^K.
    // Compare lhs^(2b) <= rhs^(2b); both sides positive.
    Rat lhs_base = rat_pow(Rat(20), K) * delta;
    Rat ratio = Rat(static_cast<long>(K) * c) / Rat(n);
    Rat rhs_base = beta / rat_pow(Rat(50), K);
    if (rhs_base <= 0) return false;
    Rat lhs = rat_pow(lhs_base, 2 * b) * rat_pow(ratio, a);
    Rat rhs = rat_pow(rhs_base, 2 * b);
    return lhs <= rhs;
}

namespace {

// Small-denominator rational approximation of 1/log2(delta): zeta =
// 64 / floor(64*log2(delta)). Deterministic; kept exact afterwards.
Rat zeta_general(const Rat& delta) {
    long t = floor_scaled_log2(delta, 64);
    if (t <= 0) throw std::invalid_argument("suggest_parameters: Delta too small");
    return make_rat(64, t);
}

}  // namespace

// Exact when integers u, w <= 64 exist with n^w == Delta^(2u) and n is a
// perfect square; otherwise a dyadic approximation (advisory only; nothing
// downstream depends on eps exactly).
Rat eps_estimate(long n, const Rat& delta) {
    Int ni(n);
    Int root;
    bool square = mpz_perfect_square_p(ni.get_mpz_t());
    if (square && delta.get_den() == 1) {
        mpz_sqrt(root.get_mpz_t(), ni.get_mpz_t());
        for (long w = 1; w <= 64; ++w) {
            Int nw;
            mpz_pow_ui(nw.get_mpz_t(), ni.get_mpz_t(), static_cast<unsigned long>(w));
            // is nw an even power of Delta?
            Int d = delta.get_num();
            Int acc(1);
            long e = 0;
            while (acc < nw && e < 4096) {
                acc *= d * d;
                ++e;
                if (acc == nw) {
                    // exponent = e/w must be integral for 2^(e/w) to stay exact
                    if (e % w == 0) {
                        Rat p = rat_pow(Rat(2), e / w);
                        return p / Rat(root);
                    }
                }
            }
        }
    }
    double x = std::log2(static_cast<double>(n)) / (2.0 * std::log2(delta.get_d()));
    double val = std::exp2(x) / std::sqrt(static_cast<double>(n));
    long scaled = static_cast<long>(std::floor(val * 1099511627776.0));  // 2^40
    return make_rat(scaled, 1099511627776L);
}

Params suggest_parameters(long n, const Rat& delta, int K, int tau, const Rat& beta,
                          ParamMode mode) {
    if (tau < 3) throw std::invalid_argument("suggest_parameters: tau < 3");
    if (K < 3) throw std::invalid_argument("suggest_parameters: K < 3");
    if (beta <= 0 || beta > make_rat(1, 2))
        throw std::invalid_argument("suggest_parameters: beta outside (0, 1/2]");
    int lambda = tau - 2;
    Params p;
    p.tau = tau;
    p.K = K;
    p.beta = beta;
    if (mode == ParamMode::General) {
        if (delta < 10) throw std::invalid_argument("suggest_parameters: general mode needs Delta >= 10");
        p.zeta = zeta_general(delta);
    } else {
        p.zeta = make_rat(lambda, 2);
    }
    if (p.zeta >= Rat(lambda))
        throw std::invalid_argument("suggest_parameters: zeta >= lambda");
    // zeta <= .99*lambda per the counting theorem's hypothesis
    if (p.zeta * 100 > Rat(99 * lambda))
        throw std::invalid_argument("suggest_parameters: zeta > 0.99*lambda");

    // Largest c with the inequality intact; it is monotone, so binary search.
    long lo = 0, hi = n;
    while (lo < hi) {
        long mid = lo + (hi - lo + 1) / 2;
        if (weirdness_holds(mid, n, delta, K, lambda, p.zeta, beta)) lo = mid;
        else hi = mid - 1;
    }
    p.SMALL = std::min(lo / 2, n / 2);
    if (p.SMALL < 1 || Rat(K) > p.zeta * Rat(p.SMALL))
        throw std::invalid_argument(
            "suggest_parameters: derived SMALL violates K <= zeta*SMALL; increase n or decrease K");
    p.D = static_cast<int>(rat_floor_long(p.zeta * Rat(p.SMALL) / 3));
    p.eps = eps_estimate(n, delta);
    p.validate_basic();
    return p;
}

std::string params_to_json(const Params& p) {
    json j;
    j["tau"] = p.tau;
    j["zeta"] = rat_to_string(p.zeta);
    j["SMALL"] = p.SMALL;
    j["D"] = p.D;
    j["beta"] = rat_to_string(p.beta);
    j["eps"] = rat_to_string(p.eps);
    j["K"] = p.K;
    j["gamma_exponent_constant"] = p.gamma_exponent_constant;
    return j.dump(2);
}

Params params_from_json(const std::string& text) {
    json j = json::parse(text);
    Params p;
    p.tau = j.at("tau").get<int>();
    p.zeta = rat_from_string(j.at("zeta").get<std::string>());
    p.SMALL = j.at("SMALL").get<long>();
    p.D = j.at("D").get<int>();
    if (j.contains("beta")) p.beta = rat_from_string(j["beta"].get<std::string>());
    if (j.contains("eps")) p.eps = rat_from_string(j["eps"].get<std::string>());
    if (j.contains("K")) p.K = j["K"].get<int>();
    if (j.contains("gamma_exponent_constant"))
        p.gamma_exponent_constant = j["gamma_exponent_constant"].get<int>();
    p.validate_basic();
    return p;
}

}  // namespace sospex
