#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "growthlab/budget.hpp"
#include "growthlab/convexfn.hpp"
#include "growthlab/finite_set.hpp"

namespace growthlab::squeeze {

/// Pipeline turning the consecutive-difference decomposition of a set A and
/// a convex/concave f into explicit witnesses for three lower bounds:
///   claim 1:  |A+A-A|        >= |A'| * |D'_small|
///   claim 2:  |5f(A)-4f(A)|  >= sum over D'' of |E_d| * #emitters
///   claim 3:  |8A-7A|        >= |8A''' - 7A'''|
/// Buckets are processed in f_d-image order, which gives one code path for
/// increasing and decreasing gap maps (concave f has decreasing f_d; sorting
/// by image realizes the negated-function normalization).

struct BucketRefinement {
    std::size_t gap_index = 0;            // index into GapDecomposition::gaps
    std::vector<std::size_t> image_order; // bucket positions, ascending f_d image
    std::vector<Real> images;             // f_d values in image order
    std::size_t half_size = 0;            // |A_d'|
    Real t_d;                             // = images[half_size - 1]
    bool upper_half_chosen = false;
    std::vector<std::size_t> quarter;     // bucket positions of A_d'' (image order)
    std::vector<Real> quarter_images;     // f_d values over A_d'' (ascending)
};

struct EdElement {
    Real value;
    std::array<std::size_t, 4> quad; // indices into quarter: i[q0]+i[q1]-i[q2]-i[q3]
};

struct EdSet {
    std::vector<EdElement> elems;  // ascending; elems[0] is exact zero
    std::int64_t diffset_size = 0; // |2 f_d(A_d'') - 2 f_d(A_d'')| = 2|E_d| - 1
};

struct GapDecomposition {
    FiniteSet A;
    std::vector<Scalar> gaps;                          // D, ascending
    std::vector<FiniteSet> buckets;                    // A_d, parallel to gaps
    std::vector<std::vector<std::size_t>> positions;   // A-positions per bucket

    std::int64_t K = 0;
    std::vector<std::size_t> dprime; // indices into gaps, ascending gap value
    bool degenerate_k = false;       // K < 4

    std::vector<BucketRefinement> refined; // parallel to dprime
    std::vector<EdSet> ed;                 // parallel to dprime

    std::int64_t L = 0;
    std::vector<std::size_t> ddoubleprime; // indices into dprime
};

struct Claim1Result {
    bool degenerate = false; // |D'| < 2
    std::int64_t count = 0;
    FiniteSet witnesses;
    std::vector<std::pair<Scalar, Scalar>> reps; // (base element, shift s) per witness
};

struct Claim2Witness {
    std::size_t dprime_index;
    std::size_t emitter_pos; // position in the trimmed bucket (value order)
    std::size_t ed_index;
    Real value;              // f(emitter) + e
};

struct Claim2Result {
    std::int64_t count = 0;
    std::vector<Claim2Witness> witnesses; // filled when collect = true
};

struct Claim3Result {
    std::size_t dprime_index = 0;
    unsigned m_used = 0;
    FiniteSet triple_prime;    // A_d'''
    std::int64_t size_8m7 = 0; // |8 A_d''' - 7 A_d'''|
    bool small_bucket = false; // |A_d''| < 8m
};

struct WitnessReport {
    std::int64_t n = 0;
    std::int64_t K = 0;
    std::int64_t L = 0;
    std::int64_t dprime_size = 0;
    std::int64_t ddoubleprime_size = 0;
    std::int64_t claim1_count = 0;
    std::int64_t claim2_count = 0;
    std::int64_t claim3_size = 0;
    Real ratio_claim1, ratio_claim2, ratio_claim3, ratio_product, ratio_max;
    std::string orientation; // "fd-increasing" | "fd-decreasing"
    std::vector<std::string> degenerate_flags;
    unsigned m_certified = 0;
    std::string claim3_gap;
    unsigned precision = kDefaultPrecision;

    nlohmann::ordered_json to_json() const;
};

/// D and the bucket map; requires |A| >= 2.
GapDecomposition decompose(const FiniteSet& A);

/// Dyadic pigeonhole over bucket sizes: picks K = 2^j maximizing
/// |class| * 2^j (ties toward larger K), trims selected buckets to their K
/// smallest elements, and asserts |D'| K >= (|A|-1) / (4 ceil(log2|A|)).
void dyadic_regularize(GapDecomposition& g);

/// Explicit A+A-A witnesses strictly inside consecutive gaps.
Claim1Result claim1_witnesses(const GapDecomposition& g, const GrowthBudget& budget);

/// Per-bucket refinement: sort by f_d image, take the smallest-image half,
/// t_d = its largest image, then the better-populated half-interval of
/// (0, t_d] trimmed to quarter size (ties toward the lower half).
BucketRefinement refine_bucket(const ConvexFunctionSpec& f, const Scalar& d,
                               const FiniteSet& bucket, std::size_t gap_index,
                               unsigned prec);
void refine_buckets(GapDecomposition& g, const ConvexFunctionSpec& f, unsigned prec);

/// Nonnegative part of 2 f_d(A_d'') - 2 f_d(A_d''), one witnessing quadruple
/// per element; elems[0] is exact zero.
EdSet build_ed(const BucketRefinement& r, const GrowthBudget& budget);

/// Dyadic pigeonhole over s_d / |A_d''|: fills ed, picks the heaviest class
/// (ties toward smaller L); asserts |D''| >= |D'| / ceil(4 log2 |A|).
void doubling_level(GapDecomposition& g, const GrowthBudget& budget);

/// Witness blocks f(a) + E_d for the upper image half of each d in D''.
/// Verifies the inclusion (every block ends strictly below the next f(A)
/// element); failure raises InclusionViolation and indicates a pipeline bug.
Claim2Result claim2_witnesses(const GapDecomposition& g, const ConvexFunctionSpec& f,
                              unsigned prec, bool collect);

/// Positive/negative expansion of a claim-2 witness: 5 arguments added and 4
/// subtracted, all elements of A.
struct WitnessExpansion {
    std::array<Scalar, 5> positive;
    std::array<Scalar, 4> negative;
};
WitnessExpansion expand_witness(const GapDecomposition& g, const Claim2Witness& w);

/// A_d''' = A_d'' restricted to the certified subinterval holding the most
/// elements, and the exact size of 8 A_d''' - 7 A_d'''.
Claim3Result claim3_bound(const GapDecomposition& g, std::size_t dprime_index,
                          const ConvexityCertificate& cert, const GrowthBudget& budget,
                          unsigned prec);

WitnessReport full_pipeline(const FiniteSet& A, const ConvexFunctionSpec& f,
                            const GrowthBudget& budget, unsigned prec = kDefaultPrecision);

/// ceil(log2 n) for n >= 1.
std::int64_t ceil_log2(std::int64_t n);
/// smallest integer >= 4 log2 n (= ceil(log2 n^4)).
std::int64_t ceil_4log2(std::int64_t n);

} // namespace growthlab::squeeze
