#include <doctest.h>

#include "growthlab/convexfn.hpp"
#include "growthlab/rng.hpp"
#include "test_util.hpp"

using namespace growthlab;
using testutil::rel_close;

namespace {

constexpr unsigned P = 128;

Real rln(const char* s) { return log(Real::from_string(s, P)); }

/// Central finite differences for the j-th derivative of f_d^-1 at y,
/// evaluated at elevated precision so the stencil error dominates.
Real fd_oracle(const ConvexFunctionSpec& f, const Real& d, unsigned j, const Real& y,
               unsigned prec) {
    unsigned hp = 3 * prec;
    Real dh(hp);
    mpfr_set(dh.raw(), d.raw(), MPFR_RNDN);
    Real yh(hp);
    mpfr_set(yh.raw(), y.raw(), MPFR_RNDN);
    Real h = ldexp2(real_from_int(1, hp), -static_cast<long>(prec / 3));
    auto g = [&](const Real& point) { return gap_inverse(f, dh, point); };
    switch (j) {
        case 1: return (g(yh + h) - g(yh - h)) / ldexp2(h, 1);
        case 2: return (g(yh + h) - ldexp2(g(yh), 1) + g(yh - h)) / (h * h);
        case 3:
            return (g(yh + ldexp2(h, 1)) - ldexp2(g(yh + h), 1) + ldexp2(g(yh - h), 1) -
                    g(yh - ldexp2(h, 1))) /
                   ldexp2(h * h * h, 1);
    }
    raise(errc::unsupported, "j in 1..3");
}

} // namespace

TEST_CASE("closed-form evaluation") {
    ConvexFunctionSpec ln = ConvexFunctionSpec::log_e();
    Real e = exp(real_from_int(1, P));
    CHECK(rel_close(eval(ln, e), real_from_int(1, P), -120));
    CHECK(deriv(ln, 1, real_from_int(2, P)) == Real(parse_rat("1/2"), P));

    ConvexFunctionSpec cube = ConvexFunctionSpec::cube();
    CHECK(deriv(cube, 2, real_from_int(3, P)) == real_from_int(18, P));

    ConvexFunctionSpec ls = ConvexFunctionSpec::log_shift(Rat(1));
    CHECK(rel_close(eval(ls, Real(P)), rln("2"), -120)); // ln(e^0 + 1)

    CHECK_THROWS_AS(eval(ln, real_from_int(-1, P)), error);
}

TEST_CASE("gap evaluation") {
    ConvexFunctionSpec ln = ConvexFunctionSpec::log_e();
    Real one = real_from_int(1, P);
    CHECK(rel_close(gap_eval(ln, one, one), rln("2"), -118));

    ConvexFunctionSpec cube = ConvexFunctionSpec::cube();
    CHECK(gap_eval(cube, one, Real(P)) == one); // 1^3 - 0^3

    ConvexFunctionSpec ls = ConvexFunctionSpec::log_shift(Rat(1));
    Real expect = log((exp(one) + one) / real_from_int(2, P));
    CHECK(rel_close(gap_eval(ls, one, Real(P)), expect, -118));
}

TEST_CASE("gap inverse: closed forms and bisection") {
    ConvexFunctionSpec ln = ConvexFunctionSpec::log_e();
    Real one = real_from_int(1, P);
    CHECK(rel_close(gap_inverse(ln, one, rln("2")), one, -118));
    CHECK(rel_close(gap_inverse(ln, real_from_int(3, P), rln("2")), real_from_int(3, P), -118));
    CHECK_THROWS_AS(gap_inverse(ln, one, real_from_int(-1, P)), error); // y outside J

    SUBCASE("inverse consistency on J: gap_eval(gap_inverse(y)) = y") {
        SplitMix64 rng(404);
        for (int i = 0; i < 40; ++i) {
            ConvexFunctionSpec f =
                i % 2 ? ConvexFunctionSpec::exp_e() : ConvexFunctionSpec::log_e();
            Real d = Real(testutil::rq(static_cast<long>(1 + rng.next_below(12)), 4), P);
            Real y = Real(testutil::rq(static_cast<long>(1 + rng.next_below(100)), 8), P);
            CHECK(rel_close(gap_eval(f, d, gap_inverse(f, d, y)), y, -100));
        }
    }

    SUBCASE("round trip gap_inverse(gap_eval(x)) = x for 100 random points") {
        std::vector<ConvexFunctionSpec> fns{
            ConvexFunctionSpec::log_e(), ConvexFunctionSpec::exp_e(), ConvexFunctionSpec::cube(),
            ConvexFunctionSpec::log_shift(Rat(3, 2))};
        SplitMix64 rng(9001);
        for (int i = 0; i < 100; ++i) {
            const ConvexFunctionSpec& f = fns[i % fns.size()];
            Real x = Real(testutil::rq(static_cast<long>(1 + rng.next_below(400)), 16), P);
            Real d = Real(testutil::rq(static_cast<long>(1 + rng.next_below(64)), 8), P);
            Real y = gap_eval(f, d, x);
            // logshift's closed form subtracts e^d - e^y, whose conditioning
            // costs ~x bits at large x; -80 keeps ample margin
            CHECK(rel_close(gap_inverse(f, d, y), x, -80));
        }
    }
}

TEST_CASE("gap inverse derivatives match the registered closed forms") {
    ConvexFunctionSpec ln = ConvexFunctionSpec::log_e();
    Real one = real_from_int(1, P);
    Real ln2 = rln("2");

    // spot values: -d e^x/(e^x-1)^2 and d e^x (e^x+1)/(e^x-1)^3 at x = ln 2
    CHECK(rel_close(gap_inverse_deriv(ln, one, 1, ln2), real_from_int(-2, P), -110));
    CHECK(rel_close(gap_inverse_deriv(ln, one, 2, ln2), real_from_int(6, P), -110));

    SplitMix64 rng(7);
    for (int i = 0; i < 20; ++i) {
        Real d = Real(testutil::rq(static_cast<long>(1 + rng.next_below(20)), 4), P);
        Real y = Real(testutil::rq(static_cast<long>(1 + rng.next_below(64)), 16), P);
        CHECK(gap_inverse_deriv(ln, d, 1, y).sgn() < 0); // nonvanishing, negative
    }

    CHECK_THROWS_AS(gap_inverse_deriv(ConvexFunctionSpec::cube(), one, 1, real_from_int(9, P)),
                    error); // no closed form registered
}

TEST_CASE("finite differences confirm every registered derivative formula") {
    // f^(j) vs a central difference of f^(j-1), h = 2^(-p/3), tol 2^(-p/4)
    SplitMix64 rng(31);
    std::vector<ConvexFunctionSpec> fns{ConvexFunctionSpec::log_e(), ConvexFunctionSpec::exp_e(),
                                        ConvexFunctionSpec::cube(), ConvexFunctionSpec::square(),
                                        ConvexFunctionSpec::log_shift(Rat(2))};
    unsigned hp = 3 * P;
    Real h = ldexp2(real_from_int(1, hp), -static_cast<long>(P / 3));
    int samples = 0;
    for (const ConvexFunctionSpec& f : fns) {
        for (int i = 0; i < 20; ++i, ++samples) {
            Real x = Real(testutil::rq(static_cast<long>(1 + rng.next_below(160)), 16), hp);
            for (unsigned j = 1; j <= 4; ++j) {
                Real numeric = (deriv(f, j - 1, x + h) - deriv(f, j - 1, x - h)) / ldexp2(h, 1);
                Real closed = deriv(f, j, x);
                if (closed.is_zero()) {
                    // identically-zero tails (cube j=4, square j>=3)
                    CHECK(!(abs(numeric) > ldexp2(real_from_int(1, hp), -64)));
                } else {
                    CHECK(testutil::rel_close(closed, numeric, -32));
                }
            }
        }
    }
    CHECK(samples == 100);
}

TEST_CASE("finite differences confirm the gap-inverse derivative formulas") {
    // step h = 2^(-p/3), tolerance 2^(-p/4)
    SplitMix64 rng(11);
    for (int i = 0; i < 12; ++i) {
        ConvexFunctionSpec f =
            i % 2 ? ConvexFunctionSpec::log_shift(Rat(2)) : ConvexFunctionSpec::log_e();
        Real d = Real(testutil::rq(static_cast<long>(1 + rng.next_below(8)), 2), P);
        Real y(P);
        if (f.kind() == FnKind::log_shift) {
            // J = (0, d); odd numerators dodge the second derivative's zero
            // at y = d/2, where relative comparison is meaningless
            y = d * Real(testutil::rq(static_cast<long>(2 * rng.next_below(15) + 1), 32), P);
        } else {
            y = Real(testutil::rq(static_cast<long>(1 + rng.next_below(40)), 16), P);
        }
        for (unsigned j = 1; j <= 3; ++j) {
            Real closed = gap_inverse_deriv(f, d, j, y);
            Real numeric = fd_oracle(f, d, j, y, P);
            CHECK(rel_close(closed, numeric, -32));
        }
    }
}

TEST_CASE("gap map is strictly monotone for strictly convex f") {
    SplitMix64 rng(23);
    for (const ConvexFunctionSpec& f :
         {ConvexFunctionSpec::exp_e(), ConvexFunctionSpec::cube(),
          ConvexFunctionSpec::log_shift(Rat(1))}) {
        for (int i = 0; i < 30; ++i) {
            Real d = Real(testutil::rq(static_cast<long>(1 + rng.next_below(12)), 4), P);
            Real x = Real(testutil::rq(static_cast<long>(1 + rng.next_below(200)), 8), P);
            Real xp = x + Real(testutil::rq(static_cast<long>(1 + rng.next_below(50)), 8), P);
            CHECK(gap_eval(f, d, x) < gap_eval(f, d, xp));
        }
    }
    // ln is concave: decreasing gap map
    ConvexFunctionSpec ln = ConvexFunctionSpec::log_e();
    CHECK(gap_eval(ln, real_from_int(1, P), real_from_int(1, P)) >
          gap_eval(ln, real_from_int(1, P), real_from_int(2, P)));
}

TEST_CASE("certify: zero counts and sign-constant pieces") {
    Scalar one(Rat(1));
    Interval target = Interval::closed(Scalar(parse_rat("1/100")), Scalar(Rat(10)));

    SUBCASE("ln has nonvanishing inverse derivatives: m = 0") {
        ConvexityCertificate c = certify(ConvexFunctionSpec::log_e(), one, target, 8, P);
        CHECK(c.zero_count == 0);
        CHECK(c.subintervals.size() == 1);
        CHECK(c.method == "closed-form");
    }

    SUBCASE("logshift: at most 5 zeros on (0, d)") {
        Interval t = Interval::closed(Scalar(parse_rat("1/100")), Scalar(parse_rat("99/100")));
        ConvexityCertificate c = certify(ConvexFunctionSpec::log_shift(Rat(1)), one, t, 5, P);
        CHECK(c.zero_count <= 5);
        CHECK(c.method == "interval-subdivision");
        CHECK(!c.subintervals.empty());
        // the known second-derivative zero at y = d/2 must split the target
        CHECK(c.zero_count >= 1);
        CHECK(c.subintervals.size() >= 2);
    }

    SUBCASE("cube: subdivision finds sign-constant pieces around y = 3") {
        Interval t = Interval::closed(Scalar(parse_rat("5/2")), Scalar(parse_rat("7/2")));
        ConvexityCertificate c = certify(ConvexFunctionSpec::cube(), one, t, 8, P);
        CHECK(c.zero_count == 0);
        CHECK(c.subintervals.size() == 1);
    }

    SUBCASE("square fails: second inverse derivative is identically zero") {
        Interval t = Interval::closed(Scalar(Rat(2)), Scalar(Rat(3)));
        CHECK_THROWS_AS(certify(ConvexFunctionSpec::square(), one, t, 8, P), error);
    }
}

TEST_CASE("certificate soundness: derivative signs constant on each piece") {
    Scalar one(Rat(1));
    Interval t = Interval::closed(Scalar(parse_rat("1/100")), Scalar(parse_rat("99/100")));
    ConvexFunctionSpec f = ConvexFunctionSpec::log_shift(Rat(1));
    ConvexityCertificate c = certify(f, one, t, 5, P);
    Real d = real_from_int(1, P);
    for (const Interval& piece : c.subintervals) {
        Real lo = piece.lo->to_real(P);
        Real hi = piece.hi->to_real(P);
        Real step = (hi - lo) / real_from_int(1000, P);
        for (unsigned j = 1; j <= 3; ++j) {
            int s0 = 0;
            for (int i = 0; i < 1000; ++i) {
                Real y = lo + step * (real_from_int(i, P) + Real(parse_rat("1/2"), P));
                int s = gap_inverse_deriv(f, d, j, y).sgn();
                REQUIRE(s != 0);
                if (s0 == 0) s0 = s;
                REQUIRE(s == s0);
            }
        }
    }
}

TEST_CASE("k-convexity certification") {
    Interval pos = Interval::greater_than(Scalar(Rat(0)));
    CHECK_NOTHROW(certify_k_convex(ConvexFunctionSpec::log_e(), pos, 3, P));
    CHECK_NOTHROW(certify_k_convex(ConvexFunctionSpec::exp_e(), Interval::all(), 3, P));
    CHECK_NOTHROW(certify_k_convex(ConvexFunctionSpec::cube(), pos, 2, P));
    CHECK_THROWS_AS(
        certify_k_convex(ConvexFunctionSpec::cube(), Interval::open(Scalar(Rat(-1)), Scalar(Rat(1))), 1, P),
        error); // second derivative vanishes at 0
    CHECK_THROWS_AS(certify_k_convex(ConvexFunctionSpec::cube(), pos, 3, P), error);
    CHECK_THROWS_AS(certify_k_convex(ConvexFunctionSpec::square(), pos, 2, P), error);
}

TEST_CASE("image_set maps in order and respects domains") {
    FiniteSet a = testutil::iset({1, 2, 4, 8});
    FiniteSet img = image_set(ConvexFunctionSpec::log_e(), a, P);
    REQUIRE(img.size() == 4);
    CHECK(rel_close(img.reals()[1], rln("2"), -118));
    CHECK_THROWS_AS(image_set(ConvexFunctionSpec::log_e(), testutil::iset({-1, 2}), P), error);
}
