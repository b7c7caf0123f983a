#pragma once

#include "rksort/rational.hpp"

#include <compare>
#include <cstdint>
#include <stdexcept>

namespace rksort {

class EqualValuesError : public std::domain_error {
public:
    explicit EqualValuesError(const std::string& what) : std::domain_error(what) {}
};

// Power-of-two scale factor 2^log2, stored by exponent. Factors get enormous
// (millions of bits for adversarial gaps) so the exponent is the working
// representation everywhere; value() materialises the integer on demand.
struct ScaleFactor {
    std::uint64_t log2 = 0;

    BigInt value() const {
        BigInt v = 0;
        mpz_setbit(v.get_mpz_t(), static_cast<mp_bitcnt_t>(log2));
        return v;
    }

    friend auto operator<=>(const ScaleFactor&, const ScaleFactor&) = default;
};

// Least power of two >= m. m must be positive.
inline ScaleFactor exp2_ceil(const BigInt& m) {
    if (m <= 0) throw std::domain_error("exp2_ceil: argument must be positive");
    std::size_t bits = mpz_sizeinbase(m.get_mpz_t(), 2);  // floor(log2 m) + 1
    bool pow2 = mpz_popcount(m.get_mpz_t()) == 1;
    return ScaleFactor{pow2 ? bits - 1 : bits};
}

// Integer key of r at factor f: floor(r * 2^f.log2). Exact.
inline BigInt floor_scale(const ExactReal& r, ScaleFactor f) {
    BigInt num = r.numerator();
    mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), static_cast<mp_bitcnt_t>(f.log2));
    BigInt q;
    BigInt den = r.denominator();
    mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return q;
}

inline bool match_at_level(const ExactReal& r1, const ExactReal& r2, ScaleFactor f) {
    return floor_scale(r1, f) == floor_scale(r2, f);
}

// Smallest factor this scheme guarantees separates r1 and r2:
// 2 * exp2_ceil(floor(1 / |r1 - r2|)). Callers keep values in (0,1), so the
// gap d satisfies 0 < d < 1 and floor(1/d) >= 1. The guarantee: L*d > 1, so
// the keys of r1 and r2 at L always differ.
inline ScaleFactor separating_level(const ExactReal& r1, const ExactReal& r2) {
    if (r1 == r2) throw EqualValuesError("separating_level: values are equal");
    ExactReal d = abs(r1 - r2);
    BigInt q;
    BigInt num = d.numerator(), den = d.denominator();
    mpz_fdiv_q(q.get_mpz_t(), den.get_mpz_t(), num.get_mpz_t());  // floor(1/d)
    if (q == 0) throw std::domain_error("separating_level: gap is >= 1, values not in (0,1)");
    ScaleFactor f = exp2_ceil(q);
    return ScaleFactor{f.log2 + 1};
}

}  // namespace rksort
