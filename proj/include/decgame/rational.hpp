#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace decgame {

/// Exact rational number used for transition probabilities and polynomial
/// coefficients. Arithmetic stays exact until a final conversion to double.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return r.template convert_to<double>(); }

/// Exact conversion: every finite double is a dyadic rational.
inline Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("rational_from_double: non-finite value");
    if (x == 0.0) return Rational(0);
    int exp = 0;
    double m = std::frexp(x, &exp);  // x = m * 2^exp, |m| in [0.5, 1)
    auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
    exp -= 53;
    Rational r(mant);
    if (exp >= 0) {
        r *= Rational(BigInt(1) << exp);
    } else {
        r /= Rational(BigInt(1) << (-exp));
    }
    return r;
}

/// Parses "0.5", "-1.25e-2", "3", or a fraction "1/3" into an exact rational.
Rational parse_rational(const std::string& text);

/// Renders a rational as a decimal string when the denominator is of the form
/// 2^a 5^b (always the case for values parsed from decimal text), otherwise
/// as a "num/den" fraction.
std::string rational_to_string(const Rational& r);

}  // namespace decgame
