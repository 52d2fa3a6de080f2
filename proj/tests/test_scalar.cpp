#include <doctest.h>

#include "growthlab/scalar.hpp"
#include "test_util.hpp"

using namespace growthlab;

TEST_CASE("parse_rat handles integers, fractions and decimals") {
    CHECK(parse_rat("7/3") == Rat(7, 3));
    CHECK(parse_rat("-3") == Rat(-3));
    CHECK(parse_rat("1.25") == Rat(5, 4));
    CHECK(parse_rat("-0.5") == Rat(-1, 2));
    CHECK(parse_rat("2e3") == Rat(2000));
    CHECK(parse_rat("25e-2") == Rat(1, 4));
    CHECK(parse_rat("6/8") == Rat(3, 4)); // lowest terms
    CHECK_THROWS_AS(parse_rat("abc"), error);
    CHECK_THROWS_AS(parse_rat("1/0"), error);
    CHECK_THROWS_AS(parse_rat(""), error);
}

TEST_CASE("rat_to_string round trips") {
    for (const char* s : {"7/3", "-3", "0", "1217/99"}) CHECK(rat_to_string(parse_rat(s)) == s);
    CHECK(rat_to_string(parse_rat("1.25")) == "5/4");
}

TEST_CASE("Real string round trip is exact at its precision") {
    for (const char* s : {"0.1", "-123456.789", "3", "1e-30"}) {
        Real r = Real::from_string(s, 128);
        Real back = Real::from_string(r.to_string(), 128);
        CHECK(r == back);
    }
    Real tiny = ldexp2(real_from_int(1, 192), -150);
    CHECK(Real::from_string(tiny.to_string(), 192) == tiny);
}

TEST_CASE("exact arithmetic is closed and lossless") {
    Scalar a(parse_rat("1/3"));
    Scalar b(parse_rat("1/6"));
    CHECK((a + b) == Scalar(parse_rat("1/2")));
    CHECK((a - b) == Scalar(parse_rat("1/6")));
    CHECK((a * b) == Scalar(parse_rat("1/18")));
    CHECK((a / b) == Scalar(parse_rat("2")));
    CHECK_THROWS_AS(a / Scalar(Rat(0)), error);
}

TEST_CASE("mixed-mode arithmetic promotes exact to the real operand's precision") {
    Scalar e(parse_rat("1/4"));
    Scalar r(Real::from_string("0.25", 96));
    Scalar sum = e + r;
    REQUIRE(sum.mode() == ScalarMode::real);
    CHECK(sum.real().prec() == 96);
    CHECK(sum == Scalar(Real::from_string("0.5", 96)));
    CHECK(e == Scalar(Real::from_string("0.25", 128)));
    CHECK(e < Scalar(Real::from_string("0.26", 128)));
}

TEST_CASE("real comparisons are on stored digits") {
    Real a = Real::from_string("1", 128);
    Real b = a + ldexp2(real_from_int(1, 128), -120);
    CHECK(a < b);
    CHECK(a != b);
}
