#ifndef ULTRADIFF_RATIONAL_HPP
#define ULTRADIFF_RATIONAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ultradiff {

/// Exact arbitrary-precision rational. Ball bookkeeping (norms, measures,
/// V values) stays in this type end to end; doubles appear only where
/// eigenvalues and time evolution force them.
using Rational = mpq_class;

/// p^e as an exact rational, e of either sign.
inline Rational rational_pow(std::uint32_t base, int exponent) {
    mpz_class num = 1, den = 1;
    if (exponent >= 0) {
        mpz_ui_pow_ui(num.get_mpz_t(), base, static_cast<unsigned long>(exponent));
    } else {
        mpz_ui_pow_ui(den.get_mpz_t(), base, static_cast<unsigned long>(-exponent));
    }
    return Rational(num, den);
}

/// Accepts "a/b", integers, and plain decimal strings ("0.25" -> 1/4).
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    std::string s = text;
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        if (s.find('/') != std::string::npos)
            throw std::invalid_argument("malformed rational literal: " + text);
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        std::size_t frac_len = s.size() - dot - 1;
        mpz_class num(digits, 10);
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
        Rational r(num, den);
        r.canonicalize();
        return r;
    }
    Rational r;
    if (r.set_str(s, 10) != 0)
        throw std::invalid_argument("malformed rational literal: " + text);
    r.canonicalize();
    return r;
}

inline std::string rational_to_string(const Rational& r) { return r.get_str(); }

inline double to_double(const Rational& r) { return r.get_d(); }

}  // namespace ultradiff

#endif
