#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "decgame/rational.hpp"

using namespace decgame;

TEST_CASE("decimal parsing is exact") {
    CHECK(parse_rational("0.5") == Rational(1, 2));
    CHECK(parse_rational("0.1") == Rational(1, 10));
    CHECK(parse_rational("-1.25e-2") == Rational(-1, 80));
    CHECK(parse_rational("3") == Rational(3));
    CHECK(parse_rational("1/3") == Rational(1, 3));
    CHECK(parse_rational("2e3") == Rational(2000));
    CHECK_THROWS(parse_rational("abc"));
    CHECK_THROWS(parse_rational("1/0"));
    CHECK_THROWS(parse_rational(""));
}

TEST_CASE("formatting round trips") {
    CHECK(rational_to_string(Rational(1, 2)) == "0.5");
    CHECK(rational_to_string(Rational(1, 10)) == "0.1");
    CHECK(rational_to_string(Rational(3)) == "3");
    CHECK(rational_to_string(Rational(-7, 4)) == "-1.75");
    CHECK(rational_to_string(Rational(1, 3)) == "1/3");
    for (const char* text : {"0.125", "-0.35", "7", "19/7", "0.0001"}) {
        Rational r = parse_rational(text);
        CHECK(parse_rational(rational_to_string(r)) == r);
    }
}

TEST_CASE("doubles convert exactly") {
    for (double v : {0.5, 0.1, -3.25, 1.0 / 3.0, 1e-17, 12345.6789}) {
        Rational r = rational_from_double(v);
        CHECK(to_double(r) == v);
    }
    CHECK(rational_from_double(0.5) == Rational(1, 2));
    CHECK(rational_from_double(0.0) == Rational(0));
}
