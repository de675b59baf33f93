#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "loophole/rational.hpp"
#include "loophole/rng.hpp"

using namespace loophole;

TEST_CASE("construction reduces to canonical form") {
    CHECK(Rational(2, 6).str() == "1/3");
    CHECK(Rational(-2, 6).str() == "-1/3");
    CHECK(Rational(2, -6).str() == "-1/3");
    CHECK(Rational(0, 5).str() == "0");
    CHECK(Rational(7, 1).str() == "7");
    CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
}

TEST_CASE("parsing") {
    CHECK(Rational::parse("3/4") == Rational(3, 4));
    CHECK(Rational::parse("-3/4") == Rational(-3, 4));
    CHECK(Rational::parse("12") == Rational(12));
    CHECK(Rational::parse("144.708") == Rational(144708, 1000));
    CHECK(Rational::parse("0.0476284") == Rational(476284, 10000000));
    CHECK(Rational::parse("-0.5") == Rational(-1, 2));
    CHECK(!Rational::try_parse(""));
    CHECK(!Rational::try_parse("1/0"));
    CHECK(!Rational::try_parse("a/b"));
    CHECK(!Rational::try_parse("1.2.3"));
}

TEST_CASE("exact arithmetic and comparisons") {
    const Rational a(1, 3), b(1, 6);
    CHECK(a + b == Rational(1, 2));
    CHECK(a - b == Rational(1, 6));
    CHECK(a * b == Rational(1, 18));
    CHECK(a / b == Rational(2));
    CHECK(a > b);
    CHECK(-a < b);
    CHECK(abs(Rational(-5, 7)) == Rational(5, 7));
    CHECK_THROWS_AS(a / Rational(0), std::invalid_argument);
}

TEST_CASE("field axioms on random triples") {
    SplitMix64 rng(123);
    auto rand_rat = [&] {
        const long num = static_cast<long>(rng.bounded(2001)) - 1000;
        const long den = 1 + static_cast<long>(rng.bounded(50));
        return Rational(num, den);
    };
    for (int i = 0; i < 500; ++i) {
        const Rational a = rand_rat(), b = rand_rat(), c = rand_rat();
        CHECK(a + b == b + a);
        CHECK(a * b == b * a);
        CHECK((a + b) + c == a + (b + c));
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a - a == Rational(0));
        if (!a.is_zero()) CHECK(a / a == Rational(1));
        // canonical form survives arithmetic: round-trip through the string
        CHECK(Rational::parse((a * b + c).str()) == a * b + c);
    }
}

TEST_CASE("ordering is total and exact on near ties") {
    CHECK(Rational(1, 3) < Rational(334, 1001));
    CHECK(Rational(2, 3) > Rational(666666, 1000000));
    CHECK(Rational(1, 2) == Rational(500000, 1000000));
}
