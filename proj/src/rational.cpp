#include "decgame/rational.hpp"

#include <algorithm>
#include <cctype>

namespace decgame {

namespace {

BigInt pow10(int e) {
    BigInt r = 1;
    for (int i = 0; i < e; ++i) r *= 10;
    return r;
}

Rational parse_decimal(const std::string& text) {
    std::size_t pos = 0;
    bool neg = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        neg = text[pos] == '-';
        ++pos;
    }
    BigInt mantissa = 0;
    int frac_digits = 0;
    bool any_digit = false;
    bool in_frac = false;
    for (; pos < text.size(); ++pos) {
        char ch = text[pos];
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            mantissa = mantissa * 10 + (ch - '0');
            if (in_frac) ++frac_digits;
            any_digit = true;
        } else if (ch == '.' && !in_frac) {
            in_frac = true;
        } else {
            break;
        }
    }
    int exp10 = 0;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        ++pos;
        bool eneg = false;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            eneg = text[pos] == '-';
            ++pos;
        }
        bool edigit = false;
        int e = 0;
        for (; pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])); ++pos) {
            e = e * 10 + (text[pos] - '0');
            edigit = true;
        }
        if (!edigit) throw std::invalid_argument("parse_rational: bad exponent in '" + text + "'");
        exp10 = eneg ? -e : e;
    }
    if (!any_digit || pos != text.size())
        throw std::invalid_argument("parse_rational: cannot parse '" + text + "'");
    Rational r(mantissa);
    int net = exp10 - frac_digits;
    if (net > 0) r *= Rational(pow10(net));
    if (net < 0) r /= Rational(pow10(-net));
    return neg ? -r : r;
}

}  // namespace

Rational parse_rational(const std::string& text) {
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        Rational num = parse_decimal(text.substr(0, slash));
        Rational den = parse_decimal(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("parse_rational: zero denominator in '" + text + "'");
        return num / den;
    }
    return parse_decimal(text);
}

std::string rational_to_string(const Rational& r) {
    BigInt num = numerator(r);
    BigInt den = denominator(r);
    // Count factors of 2 and 5 in the (canonical, positive) denominator.
    BigInt d = den;
    int twos = 0, fives = 0;
    while (d % 2 == 0) { d /= 2; ++twos; }
    while (d % 5 == 0) { d /= 5; ++fives; }
    if (d != 1) return num.str() + "/" + den.str();
    int digits = std::max(twos, fives);
    if (digits == 0) return num.str();
    BigInt scaled = num * pow10(digits) / den;
    bool neg = scaled < 0;
    std::string body = (neg ? BigInt(-scaled) : scaled).str();
    if (static_cast<int>(body.size()) <= digits) body.insert(0, digits + 1 - body.size(), '0');
    body.insert(body.size() - digits, ".");
    // Trim trailing zeros but keep at least one fractional digit.
    while (body.back() == '0' && body[body.size() - 2] != '.') body.pop_back();
    return (neg ? "-" : "") + body;
}

}  // namespace decgame
