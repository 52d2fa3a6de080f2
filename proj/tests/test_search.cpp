#include <doctest.h>

#include <cmath>
#include <sstream>

#include "growthlab/reference.hpp"
#include "growthlab/search.hpp"
#include "growthlab/setcore.hpp"
#include "test_util.hpp"

using namespace growthlab;
namespace gs = growthlab::search;

namespace {
const GrowthBudget kBudget;

const char* kConfig =
    "[search]\n"
    "n = 4\n"
    "moves_per_round = 16\n"
    "rounds = 12\n"
    "seed = 7\n"
    "objective = eightfold\n"
    "[temperature]\n"
    "initial = 1/2\n"
    "decay = 9/10\n"
    "[universe]\n"
    "lo = 1\n"
    "hi = 32\n"
    "granularity = 1\n";
} // namespace

TEST_CASE("objective values on structured sets") {
    FiniteSet ap = set_from_spec("ap:n=8,start=1,step=1");
    CHECK(iterated_sumset(ap, 8, kBudget).size() == 57); // 8*7+1

    std::int64_t prods = static_cast<std::int64_t>(ref::iterated_product(ap, 8).size());
    double expect = std::log2(static_cast<double>(std::max<std::int64_t>(57, prods))) / 3.0;
    double got = gs::objective_value(ap, gs::Objective::eightfold, kBudget).real().to_double();
    CHECK(got == doctest::Approx(expect).epsilon(1e-12));

    FiniteSet gp = set_from_spec("gp:n=8,start=1,ratio=2");
    CHECK(iterated_product(gp, 8, kBudget).size() == 57); // exponent duality with the AP
    double got_gp = gs::objective_value(gp, gs::Objective::eightfold, kBudget).real().to_double();
    CHECK(got_gp >= 1.0);

    // |A| = 2: both 8-fold sets have 9 elements, objective = log2 9
    FiniteSet two = testutil::iset({1, 2});
    double got2 = gs::objective_value(two, gs::Objective::eightfold, kBudget).real().to_double();
    CHECK(got2 == doctest::Approx(std::log2(9.0)).epsilon(1e-12));
}

TEST_CASE("claim_product objective combines both witnessed sides") {
    FiniteSet a = testutil::iset({1, 2, 3, 5});
    std::int64_t s = static_cast<std::int64_t>(signed_combination(a, 8, 7, kBudget).size());
    std::int64_t p = static_cast<std::int64_t>(ratio_set(a, 5, 4, kBudget).size());
    double expect = (16.0 * std::log2(static_cast<double>(s)) +
                     11.0 * std::log2(static_cast<double>(p))) /
                    2.0;
    double got = gs::objective_value(a, gs::Objective::claim_product, kBudget).real().to_double();
    CHECK(got == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("config parsing") {
    std::istringstream in(kConfig);
    gs::SearchConfig cfg = gs::SearchConfig::load(in);
    CHECK(cfg.n == 4);
    CHECK(cfg.rounds == 12);
    CHECK(cfg.seed == 7);
    CHECK(cfg.objective == gs::Objective::eightfold);
    CHECK(cfg.temp_decay == testutil::rq(9, 10));
    CHECK(cfg.universe_hi == Rat(32));

    std::istringstream bad("[search]\nn = 2\n");
    CHECK_THROWS_AS(gs::SearchConfig::load(bad), error);
}

TEST_CASE("local search: determinism, monotone best, floor") {
    std::istringstream in(kConfig);
    gs::SearchConfig cfg = gs::SearchConfig::load(in);

    gs::SearchResult a = gs::local_search(cfg);
    gs::SearchResult b = gs::local_search(cfg);
    CHECK(a.best == b.best);
    REQUIRE(a.trace.rows.size() == b.trace.rows.size());
    for (std::size_t i = 0; i < a.trace.rows.size(); ++i) {
        CHECK(a.trace.rows[i].best_objective == b.trace.rows[i].best_objective);
        CHECK(a.trace.rows[i].accepted == b.trace.rows[i].accepted);
    }

    // best is non-increasing and never below the trivial growth floor
    for (std::size_t i = 1; i < a.trace.rows.size(); ++i)
        CHECK(a.trace.rows[i].best_objective <= a.trace.rows[i - 1].best_objective);
    CHECK(a.best_objective >= 1.0);

    // the final set cannot be worse than the AP it started from
    gs::SearchConfig zero = cfg;
    zero.rounds = 0;
    gs::SearchResult initial = gs::local_search(zero);
    CHECK(a.best_objective <= initial.best_objective + 1e-12);
}

TEST_CASE("rounds = 0 returns the initial set") {
    std::istringstream in(kConfig);
    gs::SearchConfig cfg = gs::SearchConfig::load(in);
    cfg.rounds = 0;
    gs::SearchResult r = gs::local_search(cfg);
    CHECK(r.trace.rows.empty());
    CHECK(r.best.size() == 4);
}

TEST_CASE("portfolio search picks the best restart deterministically") {
    std::istringstream in(kConfig);
    gs::SearchConfig cfg = gs::SearchConfig::load(in);
    cfg.rounds = 6;
    gs::SearchResult p1 = gs::portfolio_search(cfg, 3);
    gs::SearchResult p2 = gs::portfolio_search(cfg, 3);
    CHECK(p1.best == p2.best);
    CHECK(p1.best_objective <= gs::local_search(cfg).best_objective + 1e-12);
}

TEST_CASE("trace CSV is stable") {
    std::istringstream in(kConfig);
    gs::SearchConfig cfg = gs::SearchConfig::load(in);
    cfg.rounds = 3;
    gs::SearchResult r = gs::local_search(cfg);
    std::ostringstream a, b;
    gs::write_trace_csv(a, r.trace);
    gs::write_trace_csv(b, r.trace);
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("round,best_objective,accepted,temperature\n", 0) == 0);
}
