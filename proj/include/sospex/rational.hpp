#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sospex {

// Exact rational scalar used throughout. No floating point sneaks into any
// construction or verification path; doubles appear only in advisory output.
using Rat = mpq_class;
using Int = mpz_class;

// mpq_class(n, d) does not canonicalize on its own.
inline Rat make_rat(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("make_rat: zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline Rat make_rat(const Int& num, const Int& den) {
    if (den == 0) throw std::invalid_argument("make_rat: zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

// "num/den" (den omitted when 1), the wire format for every serialized rational.
inline std::string rat_to_string(const Rat& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline Rat rat_from_string(const std::string& s) {
    Rat r;
    if (r.set_str(s, 10) != 0)
        throw std::invalid_argument("rat_from_string: cannot parse '" + s + "'");
    r.canonicalize();
    if (r.get_den() < 0) throw std::invalid_argument("rat_from_string: negative denominator");
    return r;
}

// base^e for integer e (possibly negative).
inline Rat rat_pow(const Rat& base, long e) {
    if (e == 0) return Rat(1);
    if (base == 0 && e < 0) throw std::invalid_argument("rat_pow: 0 to a negative power");
    Rat num, den;
    unsigned long a = static_cast<unsigned long>(e < 0 ? -e : e);
    mpz_pow_ui(num.get_num().get_mpz_t(), base.get_num().get_mpz_t(), a);
    mpz_pow_ui(den.get_num().get_mpz_t(), base.get_den().get_mpz_t(), a);
    Rat r = make_rat(num.get_num(), den.get_num());
    if (e < 0) r = 1 / r;
    return r;
}

// q^e as a rational, e may be negative.
inline Rat qpow(int q, long e) { return rat_pow(Rat(q), e); }

inline Int ipow(long base, unsigned long e) {
    Int r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), e);
    return r;
}

inline Int rat_floor(const Rat& r) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
    return q;
}

inline long rat_floor_long(const Rat& r) {
    Int f = rat_floor(r);
    if (!f.fits_slong_p()) throw std::overflow_error("rat_floor_long: out of range");
    return f.get_si();
}

// Deterministic 64-bit PRNG (splitmix64). Used everywhere randomness is
// needed so that generated artifacts are bit-identical across platforms;
// std::uniform_int_distribution is not portable across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n) by rejection; exact, no modulo bias.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below(0)");
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % n;
    }

private:
    std::uint64_t state_;
};

}  // namespace sospex
