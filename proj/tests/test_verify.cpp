#include <doctest.h>

#include "growthlab/reference.hpp"
#include "growthlab/rng.hpp"
#include "growthlab/setcore.hpp"
#include "growthlab/verify.hpp"
#include "test_util.hpp"

using namespace growthlab;
namespace vf = growthlab::verify;
using testutil::iset;

namespace {
constexpr unsigned P = 128;
const GrowthBudget kBudget;

FiniteSet random_set(std::uint64_t seed, std::size_t n, std::int64_t hi) {
    return FiniteSet::from_sorted_ints(random_distinct_integers(seed, n, 0, hi));
}
} // namespace

TEST_CASE("plunnecke: worked examples") {
    vf::CheckResult r = vf::check_plunnecke(iset({0, 1}), iset({0, 1}), 1, 1, kBudget);
    CHECK(r.holds);
    CHECK(r.lhs == Scalar(Rat(3)));
    CHECK(r.rhs == Scalar(testutil::rq(9, 2)));
    CHECK(r.ratio == Scalar(testutil::rq(2, 3)));

    r = vf::check_plunnecke(iset({0, 1, 3}), iset({0, 1}), 1, 1, kBudget);
    CHECK(r.holds);
    CHECK(r.lhs == Scalar(Rat(7)));
    CHECK(r.rhs == Scalar(testutil::rq(25, 2)));

    FiniteSet ap = set_from_spec("ap:n=5,start=0,step=1");
    r = vf::check_plunnecke(ap, ap, 2, 1, kBudget);
    CHECK(r.holds);
    CHECK(r.lhs == Scalar(Rat(13)));
    CHECK(r.rhs == Scalar(testutil::rq(729, 25)));

    CHECK_THROWS_AS(vf::check_plunnecke(ap, ap, 1, 0, kBudget), error);
}

TEST_CASE("ruzsa triangle: examples and random trials") {
    vf::CheckResult r = vf::check_ruzsa(iset({0, 1}), iset({0, 1}), iset({0, 1}), kBudget);
    CHECK(r.holds);
    CHECK(r.lhs == Scalar(Rat(3)));
    CHECK(r.rhs == Scalar(testutil::rq(9, 2)));

    // degenerate X = {0}: |Y-Z| <= |Y||Z|
    CHECK(vf::check_ruzsa(iset({0}), iset({1, 5, 9}), iset({2, 4}), kBudget).holds);

    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        FiniteSet x = random_set(3 * seed + 1, 4, 9);
        FiniteSet y = random_set(3 * seed + 2, 4, 9);
        FiniteSet z = random_set(3 * seed + 3, 4, 9);
        CHECK(vf::check_ruzsa(x, y, z, kBudget).holds);
    }
}

TEST_CASE("proven inequalities hold on random fold combinations") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        FiniteSet x = random_set(7000 + seed, 3 + seed % 3, 30);
        FiniteSet y = random_set(8000 + seed, 3 + seed % 2, 30);
        for (std::int64_t k = 0; k <= 3; ++k)
            for (std::int64_t l = 0; k + l <= 3; ++l) {
                if (k + l < 2) continue;
                CHECK(vf::check_plunnecke(x, y, k, l, kBudget).holds);
            }
    }
}

TEST_CASE("enr bound with k-fold sets") {
    FiniteSet a = iset({1, 2, 4, 8});
    ConvexFunctionSpec ln = ConvexFunctionSpec::log_e();

    // |2A| = 10 and |2 ln A| = |AA| = 7: lhs 70 (direct enumeration)
    vf::CheckResult r2 = vf::check_enr(a, ln, 2, kBudget, P);
    CHECK(r2.lhs == Scalar(Rat(70)));
    CHECK(sumset(a, a, kBudget).size() == 10);
    CHECK(productset(a, a, kBudget).size() == 7);

    // k = 1: |A| |f(A)| = n^2 vs n^(3-1): equality
    vf::CheckResult r1 = vf::check_enr(iset({5}), ln, 1, kBudget, P);
    CHECK(r1.lhs == Scalar(Rat(1)));
    CHECK(r1.holds);

    // GP of length 8: |2A| = 36, |2 f(A)| = 15
    FiniteSet gp = set_from_spec("gp:n=8,start=1,ratio=2");
    vf::CheckResult rg = vf::check_enr(gp, ln, 2, kBudget, P);
    CHECK(rg.lhs == Scalar(Rat(36 * 15)));
}

TEST_CASE("bom: doubling-driven lower bound") {
    FiniteSet ap = set_from_spec("ap:n=12,start=1,step=1");
    ConvexFunctionSpec ln = ConvexFunctionSpec::log_e();

    vf::CheckResult r = vf::check_bom(ap, ln, 1, kBudget, false, P);
    // K = |A+A-A| / |A| = 34/12 = 17/6 for an AP of length 12
    CHECK(signed_combination(ap, 2, 1, kBudget).size() == 34);
    bool saw_k = false;
    for (const auto& [k, v] : r.params)
        if (k == "K") {
            CHECK(v == "17/6");
            saw_k = true;
        }
    CHECK(saw_k);
    // lhs = |2f(A) - f(A)| agrees with the serial reference
    FiniteSet fa = image_set(ln, ap, P);
    CHECK(r.lhs == Scalar(Rat(static_cast<long>(ref::signed_combination(fa, 2, 1).size()))));

    CHECK_THROWS_AS(vf::check_bom(set_from_spec("ap:n=10,start=1,step=1"), ln, 1, kBudget,
                                  false, P),
                    error); // |A| > 10k boundary
    CHECK_THROWS_AS(vf::check_bom(ap, ln, 3, kBudget, false, P), error); // k=3 needs override
    // cube is not 3-convex (4th derivative identically zero)
    FiniteSet big = set_from_spec("ap:n=31,start=1,step=1");
    CHECK_THROWS_AS(vf::check_bom(big, ConvexFunctionSpec::cube(), 3, kBudget, true, P), error);
}

TEST_CASE("check_main: structured sets at the headline exponents") {
    ConvexFunctionSpec ln = ConvexFunctionSpec::log_e();
    SUBCASE("AP{1..8}: |16A| = 113 and ratio about 4.93") {
        auto results = vf::check_main(set_from_spec("ap:n=8,start=1,step=1"), ln, kBudget, P);
        bool saw = false;
        for (const auto& r : results) {
            if (r.name != "thm_main_sumproduct16") continue;
            saw = true;
            CHECK(r.holds);
            bool sum_side = false;
            for (const auto& [k, v] : r.params) sum_side |= (k == "|16A|" && v == "113");
            CHECK(sum_side); // the AP's sum side is exactly 113
        }
        CHECK(saw);
    }
    SUBCASE("GP{1..2^7}: the product side carries the 113") {
        auto results = vf::check_main(set_from_spec("gp:n=8,start=1,ratio=2"), ln, kBudget, P);
        bool saw = false;
        for (const auto& r : results) {
            if (r.name != "thm_main_sumproduct16") continue;
            saw = true;
            bool product_side = false;
            for (const auto& [k, v] : r.params) product_side |= (k == "|A^(16)|" && v == "113");
            CHECK(product_side);
            CHECK(r.holds);
        }
        CHECK(saw);
    }
    SUBCASE("singleton: max = 1 >= 1") {
        auto results = vf::check_main(iset({3}), ln, kBudget, P);
        for (const auto& r : results)
            if (r.name == "thm_main_sumproduct16") CHECK(r.holds);
    }
    SUBCASE("triangle reductions must hold whenever computed") {
        for (const char* spec : {"ap:n=8,start=1,step=1", "gp:n=8,start=1,ratio=2",
                                 "random:n=6,universe=1..100,seed=4"}) {
            for (const auto& r : vf::check_main(set_from_spec(spec), ln, kBudget, P))
                if (r.name == "ruzsa_chain_sum" || r.name == "ruzsa_chain_fn") CHECK(r.holds);
        }
    }
}

TEST_CASE("cor43: multiplicative doubling bounds additive representations") {
    SUBCASE("GP: r = 1, K = 15/8") {
        auto results =
            vf::check_cor43(set_from_spec("gp:n=8,start=1,ratio=2"), Scalar(Rat(1)), kBudget, P);
        REQUIRE(!results.empty());
        const vf::CheckResult& r = results.front();
        CHECK(r.lhs == Scalar(Rat(1)));
        bool saw = false;
        for (const auto& [k, v] : r.params)
            if (k == "K") {
                CHECK(v == "15/8");
                saw = true;
            }
        CHECK(saw);
        CHECK(r.holds);
    }
    SUBCASE("t outside A - A holds trivially with r = 0") {
        auto results = vf::check_cor43(iset({1, 2, 4}), Scalar(Rat(100)), kBudget, P);
        CHECK(results.front().lhs == Scalar(Rat(0)));
        CHECK(results.front().holds);
    }
    SUBCASE("AP{1..16}: r = 15 and K from the reference product set") {
        FiniteSet ap = set_from_spec("ap:n=16,start=1,step=1");
        auto results = vf::check_cor43(ap, Scalar(Rat(1)), kBudget, P);
        CHECK(results.front().lhs == Scalar(Rat(15)));
        Rat expect_k(static_cast<long>(ref::productset(ap, ap).size()), 16);
        expect_k.canonicalize();
        for (const auto& [k, v] : results.front().params)
            if (k == "K") CHECK(v == rat_to_string(expect_k));
    }
    CHECK_THROWS_AS(vf::check_cor43(iset({1, 2, 4}), Scalar(Rat(0)), kBudget, P), error);
}

TEST_CASE("exhaustive oracle: tiny universes have zero violations") {
    CHECK(vf::exhaustive_oracle(1, 2, 3, kBudget).empty());
    CHECK(vf::exhaustive_oracle(3, 1, 3, kBudget).empty()); // singletons
    CHECK(vf::exhaustive_check_count(6, 3, 3) == 63 * 63 * 7 + 63 * 63 * 63);
    GrowthBudget b;
    CHECK_THROWS_AS(vf::exhaustive_oracle(20, 10, 4, b), error); // SpaceTooLarge
}

TEST_CASE("positive reduction keeps at least (|A|-1)/2 same-sign elements") {
    SplitMix64 rng(55);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<Scalar> vals;
        std::size_t n = 3 + rng.next_below(12);
        while (vals.size() < n) {
            long v = static_cast<long>(rng.next_below(41)) - 20;
            Scalar s{Rat(v)};
            bool dup = false;
            for (const Scalar& o : vals) dup |= o == s;
            if (!dup) vals.push_back(s);
        }
        FiniteSet a = make_set(vals);
        FiniteSet pos = vf::positive_reduction(a);
        CHECK(pos.front().sgn() > 0);
        CHECK(2 * pos.size() + 1 >= a.size());
    }
}
