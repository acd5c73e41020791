#include "doctest.h"

#include "calim/rational.hpp"

using namespace calim;

TEST_CASE("rational arithmetic reduces exactly") {
    Rational a(1, 2), b(1, 3);
    CHECK((a + b) == Rational(5, 6));
    CHECK((a - b) == Rational(1, 6));
    CHECK((a * b) == Rational(1, 6));
    CHECK((a / b) == Rational(3, 2));
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(-2, -4) == Rational(1, 2));
    CHECK(Rational(2, -4) == Rational(-1, 2));
}

TEST_CASE("rational ordering and parsing") {
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(Rational::parse("3/4") == Rational(3, 4));
    CHECK(Rational::parse("-5") == Rational(-5));
    CHECK(Rational(7, 3).str() == "7/3");
    CHECK(Rational(4, 2).str() == "2");
    CHECK(Rational::dyadic(1, 4) == Rational(1, 16));
}

TEST_CASE("rational overflow throws instead of wrapping") {
    Rational big(1LL << 62);
    CHECK_THROWS_AS(big * big, std::overflow_error);
    CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
}

TEST_CASE("large intermediate products reduce back into range") {
    // (2^40/3) * (3/2^40) = 1 survives via cross reduction
    Rational a(1LL << 40, 3), b(3, 1LL << 40);
    CHECK(a * b == Rational(1));
}
