#pragma once

#include <cstdint>

#include "growthlab/budget.hpp"
#include "growthlab/finite_set.hpp"

namespace growthlab {

/// Set-arithmetic kernels. All operations are pure; internal evaluation is
/// OpenMP-parallel with results independent of thread count. Iterated forms
/// deduplicate after every pairwise fold and never materialize tuple spaces.
///
/// Exact integer operands take a fast path: a dense bit-vector convolution
/// when the result span is modest, a sorted-merge accumulation otherwise.
/// Rational and real operands share the sorted-merge kernel; real results are
/// deduplicated at the rounding-artifact band (see FiniteSet docs).

FiniteSet sumset(const FiniteSet& x, const FiniteSet& y, const GrowthBudget& budget);
FiniteSet iterated_sumset(const FiniteSet& x, std::int64_t k, const GrowthBudget& budget);
FiniteSet signed_combination(const FiniteSet& x, std::int64_t k, std::int64_t l,
                             const GrowthBudget& budget);

FiniteSet productset(const FiniteSet& x, const FiniteSet& y, const GrowthBudget& budget);
FiniteSet iterated_product(const FiniteSet& x, std::int64_t k, const GrowthBudget& budget);
/// X^(k) / X^(l); requires 0 not in X.
FiniteSet ratio_set(const FiniteSet& x, std::int64_t k, std::int64_t l,
                    const GrowthBudget& budget);

/// r_{A-A}(t): ordered pairs (a,b) with a-b = t.
std::int64_t rep_count(const FiniteSet& a, const Scalar& t);
/// A(t) = A intersect (A - t).
FiniteSet shift_intersection(const FiniteSet& a, const Scalar& t);

FiniteSet negate_set(const FiniteSet& x);
FiniteSet dilate(const FiniteSet& x, const Scalar& c);   // c != 0
FiniteSet translate(const FiniteSet& x, const Scalar& c);

} // namespace growthlab
