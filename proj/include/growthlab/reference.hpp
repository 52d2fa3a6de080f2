#pragma once

#include <cstdint>
#include <vector>

#include "growthlab/finite_set.hpp"

namespace growthlab::ref {

/// Serial reference kernels: straightforward generate-everything-then-sort
/// implementations with no dense fast path and no OpenMP. They define the
/// expected semantics for the optimized kernels and serve as brute-force
/// oracles in the tests and as the baseline in the benchmark.

FiniteSet sumset(const FiniteSet& x, const FiniteSet& y);
FiniteSet iterated_sumset(const FiniteSet& x, std::int64_t k);
FiniteSet signed_combination(const FiniteSet& x, std::int64_t k, std::int64_t l);
FiniteSet productset(const FiniteSet& x, const FiniteSet& y);
FiniteSet iterated_product(const FiniteSet& x, std::int64_t k);

/// Direct tuple-space enumeration of kX - lX (|X|^(k+l) tuples); exact mode
/// only, intended for tiny instances.
FiniteSet signed_combination_tuples(const FiniteSet& x, std::int64_t k, std::int64_t l);

/// k-fold sumset of same-sign real values kept as a flat sorted array with a
/// coarse double key per element for fast search. Deduplication merges values
/// within relative distance 2^-(prec - kBandGuardBits), so magnitudes spread
/// over many binades (e.g. exp images) keep their full resolution.
struct RealFold {
    std::vector<Real> values;
    std::vector<double> keys;
    unsigned prec = kDefaultPrecision;
};

double coarse_key(const Real& v);
RealFold fold_sums(const std::vector<Real>& base, int k);

/// Whether w matches an element of the fold within relative 2^rel_log2_tol.
bool member(const RealFold& s, const Real& w, long rel_log2_tol);

/// Whether w = u - v for some u in sk, v in sl, each candidate matched at
/// relative 2^rel_log2_tol of the larger magnitude involved.
bool member_difference(const RealFold& sk, const RealFold& sl, const Real& w, long rel_log2_tol);

} // namespace growthlab::ref
