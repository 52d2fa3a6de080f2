#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "growthlab/budget.hpp"
#include "growthlab/convexfn.hpp"
#include "growthlab/finite_set.hpp"

namespace growthlab::verify {

/// One checked inequality with both sides at implied constant 1.
/// direction "upper": holds iff lhs <= rhs; "lower": holds iff lhs >= rhs;
/// "info" rows carry bookkeeping only.
struct CheckResult {
    std::string name;
    Scalar lhs, rhs, ratio;
    bool holds = false;
    std::string direction;
    std::vector<std::pair<std::string, std::string>> params;

    nlohmann::ordered_json to_json() const;
};

/// |kX - lX| <= |X+Y|^(k+l) / |Y|^(k+l-1); a proven theorem, holds must be
/// true on every input.
CheckResult check_plunnecke(const FiniteSet& x, const FiniteSet& y, std::int64_t k,
                            std::int64_t l, const GrowthBudget& budget);

/// |Y-Z| <= |X+Y| |X+Z| / |X|; proven, holds must be true.
CheckResult check_ruzsa(const FiniteSet& x, const FiniteSet& y, const FiniteSet& z,
                        const GrowthBudget& budget);

/// |kA| |k f(A)| >= |A|^(3 - 2^(1-k)) at constant 1 (advisory).
CheckResult check_enr(const FiniteSet& a, const ConvexFunctionSpec& f, std::int64_t k,
                      const GrowthBudget& budget, unsigned prec = kDefaultPrecision);

/// |2^k f(A) - (2^k - 1) f(A)| >= |A|^(k+1) / (K^(2^(k+1)-k-2) (log2|A|)^(2^(k+2)-k-4))
/// with K = |A+A-A| / |A| and C = 1 (advisory). Requires |A| > 10k and f
/// certified k-convex over the hull of A; k <= 2 unless allow_k3.
CheckResult check_bom(const FiniteSet& a, const ConvexFunctionSpec& f, std::int64_t k,
                      const GrowthBudget& budget, bool allow_k3 = false,
                      unsigned prec = kDefaultPrecision);

/// Headline checks: the 16-fold max bounds at exponent 3/2 + 1/162, the
/// witnessed-product bounds at 3/2 + 1/54 when the 15-fold sets fit the
/// budget, and the two triangle-inequality reductions (which must hold).
/// Sides that exceed the budget are skipped and counted in the trailing
/// "main_coverage" info row.
std::vector<CheckResult> check_main(const FiniteSet& a, const ConvexFunctionSpec& f,
                                    const GrowthBudget& budget,
                                    unsigned prec = kDefaultPrecision);

/// r_{A-A}(t) <= K^(405/41) |A|^(2/3 - 1/123) with K = |AA|/|A| (advisory,
/// log factors exposed as ratio slack), plus a replay of the intermediate
/// bound |A(t)|^(3/2 + 1/54) <= K^15 |A| on the concrete set.
std::vector<CheckResult> check_cor43(const FiniteSet& a, const Scalar& t,
                                     const GrowthBudget& budget,
                                     unsigned prec = kDefaultPrecision);

/// Exhaustively checks the two proven inequalities over all nonempty
/// X,Y,Z in {0..universe_bound} with |.| <= max_size and k+l <= max_fold.
/// Returns violations (expected none).
std::vector<CheckResult> exhaustive_oracle(std::int64_t universe_bound, std::int64_t max_size,
                                           std::int64_t max_fold, const GrowthBudget& budget);
std::int64_t exhaustive_check_count(std::int64_t universe_bound, std::int64_t max_size,
                                    std::int64_t max_fold);

/// Largest strict-sign part of A, negated into the positives when needed;
/// size >= (|A|-1)/2.
FiniteSet positive_reduction(const FiniteSet& a);

} // namespace growthlab::verify
