#include "growthlab/setcore.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <type_traits>
#include <climits>
#include <cstdint>
#include <vector>

#include <omp.h>

namespace growthlab {

namespace {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;

constexpr i64 kDenseMaxSpanBits = i64(1) << 28; // 32 MB bit vector
constexpr i64 kSparseShortcutPairs = 4096;
constexpr i64 kChunkValues = i64(4) << 20;

// ---------------------------------------------------------------------------
// generic sorted-merge kernel
//
// Rows x (op) inner are generated per outer element, tree-merged, and folded
// into an accumulator. Values within `same` of a kept representative merge
// into it (representative = first in ascending order). Chunk layout depends
// only on operand sizes, so results are identical for any thread count.
// ---------------------------------------------------------------------------

template <class V, class Same>
std::vector<V> merge_dedup(std::vector<V>&& a, std::vector<V>&& b, const Same& same) {
    if (a.empty()) return std::move(b);
    if (b.empty()) return std::move(a);
    std::vector<V> out;
    out.reserve(a.size() + b.size());
    auto push = [&](V&& v) {
        if (out.empty() || !same(out.back(), v)) out.push_back(std::move(v));
    };
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (b[j] < a[i])
            push(std::move(b[j++]));
        else
            push(std::move(a[i++]));
    }
    while (i < a.size()) push(std::move(a[i++]));
    while (j < b.size()) push(std::move(b[j++]));
    return out;
}

/// Chunk pass for trivially copyable values: generate, sort and dedup slabs
/// of whole rows in parallel, then a shallow tree of deduplicating merges.
template <class V, class Comb, class Same>
std::vector<V> chunk_by_values(const std::vector<V>& outer, const std::vector<V>& inner,
                               i64 row0, i64 rows, const Comb& comb, const Same& same) {
    const i64 inner_n = static_cast<i64>(inner.size());
    const i64 n_chunk = rows * inner_n;
    const i64 blocks =
        n_chunk < 32768 ? 1 : std::clamp<i64>(n_chunk / 32768, 2, std::min<i64>(rows, 16));

    std::vector<std::vector<V>> level(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(dynamic, 1)
    for (i64 b = 0; b < blocks; ++b) {
        const i64 r_lo = row0 + rows * b / blocks;
        const i64 r_hi = row0 + rows * (b + 1) / blocks;
        std::vector<V> slab;
        slab.reserve(static_cast<std::size_t>((r_hi - r_lo) * inner_n));
        for (i64 r = r_lo; r < r_hi; ++r) {
            const V& x = outer[static_cast<std::size_t>(r)];
            for (i64 j = 0; j < inner_n; ++j)
                slab.push_back(comb(x, inner[static_cast<std::size_t>(j)]));
        }
        std::sort(slab.begin(), slab.end());
        slab.erase(std::unique(slab.begin(), slab.end(),
                               [&](const V& a, const V& b2) { return same(a, b2); }),
                   slab.end());
        level[static_cast<std::size_t>(b)] = std::move(slab);
    }

    while (level.size() > 1) {
        const std::size_t pairs = level.size() / 2;
        std::vector<std::vector<V>> next(pairs + level.size() % 2);
#pragma omp parallel for schedule(dynamic, 1)
        for (i64 p = 0; p < static_cast<i64>(pairs); ++p)
            next[static_cast<std::size_t>(p)] =
                merge_dedup(std::move(level[2 * p]), std::move(level[2 * p + 1]), same);
        if (level.size() % 2) next.back() = std::move(level.back());
        level = std::move(next);
    }
    return std::move(level.front());
}

/// Chunk pass for heap-backed values (Rat, Real): values are constructed once
/// into a flat array; sorting and merging move 32-bit indices only.
template <class V, class Comb, class Same>
std::vector<V> chunk_by_indices(const std::vector<V>& outer, const std::vector<V>& inner,
                                i64 row0, i64 rows, const Comb& comb, const Same& same) {
    const i64 inner_n = static_cast<i64>(inner.size());
    const std::size_t n_chunk = static_cast<std::size_t>(rows * inner_n);

    std::vector<V> flat(n_chunk);
#pragma omp parallel for schedule(static)
    for (i64 r = 0; r < rows; ++r) {
        const V& x = outer[static_cast<std::size_t>(row0 + r)];
        std::size_t off = static_cast<std::size_t>(r * inner_n);
        for (i64 j = 0; j < inner_n; ++j)
            flat[off + static_cast<std::size_t>(j)] = comb(x, inner[static_cast<std::size_t>(j)]);
    }

    auto less = [&flat](std::uint32_t a, std::uint32_t b) { return flat[a] < flat[b]; };
    const i64 blocks =
        n_chunk < 65536 ? 1 : std::clamp<i64>(static_cast<i64>(n_chunk) / 65536, 2, 8);
    std::vector<std::vector<std::uint32_t>> level(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(dynamic, 1)
    for (i64 b = 0; b < blocks; ++b) {
        std::size_t lo = n_chunk * static_cast<std::size_t>(b) / static_cast<std::size_t>(blocks);
        std::size_t hi =
            n_chunk * static_cast<std::size_t>(b + 1) / static_cast<std::size_t>(blocks);
        std::vector<std::uint32_t> idx(hi - lo);
        std::iota(idx.begin(), idx.end(), static_cast<std::uint32_t>(lo));
        std::sort(idx.begin(), idx.end(), less);
        level[static_cast<std::size_t>(b)] = std::move(idx);
    }

    while (level.size() > 1) {
        const std::size_t pairs = level.size() / 2;
        std::vector<std::vector<std::uint32_t>> next(pairs + level.size() % 2);
#pragma omp parallel for schedule(dynamic, 1)
        for (i64 p = 0; p < static_cast<i64>(pairs); ++p) {
            const auto& a = level[2 * p];
            const auto& b2 = level[2 * p + 1];
            std::vector<std::uint32_t> m;
            m.reserve(a.size() + b2.size());
            std::merge(a.begin(), a.end(), b2.begin(), b2.end(), std::back_inserter(m), less);
            next[static_cast<std::size_t>(p)] = std::move(m);
        }
        if (level.size() % 2) next.back() = std::move(level.back());
        level = std::move(next);
    }

    std::vector<V> out;
    out.reserve(level.front().size() / 2 + 1);
    for (std::uint32_t id : level.front()) {
        V& v = flat[id];
        if (out.empty() || !same(out.back(), v)) out.push_back(std::move(v));
    }
    return out;
}

template <class V, class Comb, class Same>
std::vector<V> pairwise_kernel(const std::vector<V>& outer_in, const std::vector<V>& inner_in,
                               const Comb& comb, const Same& same, BudgetMeter& meter) {
    const std::vector<V>* outer = &outer_in;
    const std::vector<V>* inner = &inner_in;
    if (outer->size() > inner->size()) std::swap(outer, inner);

    const i64 rows_total = static_cast<i64>(outer->size());
    const i64 inner_n = static_cast<i64>(inner->size());
    const i64 chunk_rows = std::max<i64>(1, kChunkValues / std::max<i64>(1, inner_n));

    std::vector<V> acc;
    for (i64 row0 = 0; row0 < rows_total; row0 += chunk_rows) {
        const i64 rows = std::min(chunk_rows, rows_total - row0);
        meter.charge_pairs(rows * inner_n);

        // Real moves reallocate, so Real sorts and merges go through indices;
        // int64 and Rat moves are cheap and sort by value.
        std::vector<V> chunk;
        if constexpr (std::is_same_v<V, Real>)
            chunk = chunk_by_indices(*outer, *inner, row0, rows, comb, same);
        else
            chunk = chunk_by_values(*outer, *inner, row0, rows, comb, same);

        acc = merge_dedup(std::move(acc), std::move(chunk), same);
        meter.check_result_size(static_cast<i64>(acc.size()));
    }
    return acc;
}

// ---------------------------------------------------------------------------
// dense int64 sum kernel (bit-vector shift/OR convolution)
// ---------------------------------------------------------------------------

struct DensePlan {
    bool ok = false;
    const std::vector<i64>* outer = nullptr;
    const std::vector<i64>* inner = nullptr;
    i64 lo = 0, hi = 0;
    i64 inner_words = 0;
    i64 work = 0; // word operations the dense kernel will perform
};

DensePlan dense_plan(const std::vector<i64>& x, const std::vector<i64>& y) {
    DensePlan p;
    i128 lo = i128(x.front()) + y.front();
    i128 hi = i128(x.back()) + y.back();
    if (hi - lo + 1 > kDenseMaxSpanBits) return p;

    auto words = [](i128 span) { return static_cast<i64>((span + 63) / 64); };
    i64 wx = words(i128(x.back()) - x.front() + 1);
    i64 wy = words(i128(y.back()) - y.front() + 1);
    i64 cost_x_outer = static_cast<i64>(x.size()) * (wy + 1);
    i64 cost_y_outer = static_cast<i64>(y.size()) * (wx + 1);
    p.ok = true;
    p.lo = static_cast<i64>(lo);
    p.hi = static_cast<i64>(hi);
    if (cost_x_outer <= cost_y_outer) {
        p.outer = &x;
        p.inner = &y;
        p.inner_words = wy;
        p.work = cost_x_outer;
    } else {
        p.outer = &y;
        p.inner = &x;
        p.inner_words = wx;
        p.work = cost_y_outer;
    }
    return p;
}

std::vector<i64> dense_sumset(const DensePlan& plan, BudgetMeter& meter) {
    const std::vector<i64>& outer = *plan.outer;
    const std::vector<i64>& inner = *plan.inner;
    meter.charge_pairs(static_cast<i64>(outer.size()) * (plan.inner_words + 1));

    const i64 inner_lo = inner.front();
    std::vector<u64> inner_bits(static_cast<std::size_t>(plan.inner_words), 0);
    for (i64 v : inner) {
        u64 off = static_cast<u64>(v - inner_lo);
        inner_bits[off >> 6] |= u64(1) << (off & 63);
    }

    const i64 span = plan.hi - plan.lo + 1;
    const std::size_t rw = static_cast<std::size_t>((span + 63) / 64);
    std::vector<u64> bits(rw, 0);
    const i64 base = plan.lo - inner_lo; // outer value v contributes at offset v - base

#pragma omp parallel
    {
        std::vector<u64> local(rw, 0);
#pragma omp for schedule(static) nowait
        for (i64 idx = 0; idx < static_cast<i64>(outer.size()); ++idx) {
            u64 off = static_cast<u64>(outer[static_cast<std::size_t>(idx)] - base);
            std::size_t ws = off >> 6;
            unsigned bs = static_cast<unsigned>(off & 63);
            if (bs == 0) {
                for (std::size_t w = 0; w < inner_bits.size(); ++w) local[ws + w] |= inner_bits[w];
            } else {
                for (std::size_t w = 0; w < inner_bits.size(); ++w) {
                    u64 v = inner_bits[w];
                    local[ws + w] |= v << bs;
                    if (ws + w + 1 < local.size()) local[ws + w + 1] |= v >> (64 - bs);
                }
            }
        }
#pragma omp critical
        {
            for (std::size_t w = 0; w < rw; ++w) bits[w] |= local[w];
        }
    }

    i64 count = 0;
    for (u64 w : bits) count += std::popcount(w);
    meter.check_result_size(count);

    std::vector<i64> out;
    out.reserve(static_cast<std::size_t>(count));
    for (std::size_t w = 0; w < rw; ++w) {
        u64 word = bits[w];
        while (word) {
            unsigned b = static_cast<unsigned>(std::countr_zero(word));
            out.push_back(plan.lo + static_cast<i64>((w << 6) + b));
            word &= word - 1;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// per-representation dispatch
// ---------------------------------------------------------------------------

bool int_sum_safe(const std::vector<i64>& x, const std::vector<i64>& y) {
    i128 lo = i128(x.front()) + y.front();
    i128 hi = i128(x.back()) + y.back();
    return lo >= INT64_MIN / 2 && hi <= INT64_MAX / 2;
}

bool int_mul_safe(const std::vector<i64>& x, const std::vector<i64>& y) {
    auto amax = [](const std::vector<i64>& v) {
        i128 a = v.front() < 0 ? -i128(v.front()) : i128(v.front());
        i128 b = v.back() < 0 ? -i128(v.back()) : i128(v.back());
        return a > b ? a : b;
    };
    return amax(x) * amax(y) <= INT64_MAX / 4;
}

auto int_same = [](i64 a, i64 b) { return a == b; };
auto rat_same = [](const Rat& a, const Rat& b) { return a == b; };

/// Band predicate for ascending scans (requires a <= b). The difference is
/// computed at 64 bits into a thread-local scratch: the band is heuristic, so
/// relative 2^-64 fuzz at the decision boundary is immaterial, and the scan
/// stays allocation-free.
struct RealSame {
    Real band;
    bool operator()(const Real& a, const Real& b) const {
        if (mpfr_equal_p(a.raw(), b.raw())) return true;
        struct Scratch {
            mpfr_t v;
            Scratch() { mpfr_init2(v, 64); }
            ~Scratch() { mpfr_clear(v); }
        };
        static thread_local Scratch s;
        mpfr_sub(s.v, b.raw(), a.raw(), MPFR_RNDN);
        return mpfr_cmp(s.v, band.raw()) <= 0;
    }
};

Real sum_band(const FiniteSet& x, const FiniteSet& y) {
    unsigned p = std::min(x.precision(), y.precision());
    return ldexp2(x.scale_hint() + y.scale_hint(), -static_cast<long>(p - kBandGuardBits));
}

Real mul_band(const FiniteSet& x, const FiniteSet& y) {
    unsigned p = std::min(x.precision(), y.precision());
    Real s = x.scale_hint() * y.scale_hint();
    Real one = real_from_int(1, p);
    if (s < one) s = one; // keep a sane floor for sub-unit sets
    return ldexp2(s, -static_cast<long>(p - kBandGuardBits));
}

FiniteSet sumset_m(const FiniteSet& x, const FiniteSet& y, BudgetMeter& meter) {
    if (x.empty() || y.empty()) raise(errc::empty_input, "sumset of empty set");

    if (x.mode() == SetMode::real || y.mode() == SetMode::real) {
        unsigned prec = std::min(x.mode() == SetMode::real ? x.precision() : UINT_MAX,
                                 y.mode() == SetMode::real ? y.precision() : UINT_MAX);
        std::vector<Real> xs = x.as_reals(prec);
        std::vector<Real> ys = y.as_reals(prec);
        RealSame same{sum_band(x, y)};
        auto comb = [](const Real& a, const Real& b) { return a + b; };
        return FiniteSet::from_sorted_reals(pairwise_kernel(xs, ys, comb, same, meter));
    }

    if (x.has_int_rep() && y.has_int_rep() && int_sum_safe(x.ints(), y.ints())) {
        i64 pair_count = static_cast<i64>(x.size()) * static_cast<i64>(y.size());
        DensePlan plan = dense_plan(x.ints(), y.ints());
        // dense wins when its word count beats the pairwise volume
        if (plan.ok && pair_count > kSparseShortcutPairs && plan.work <= 2 * pair_count)
            return FiniteSet::from_sorted_ints(dense_sumset(plan, meter));
        auto comb = [](i64 a, i64 b) { return a + b; };
        return FiniteSet::from_sorted_ints(
            pairwise_kernel(x.ints(), y.ints(), comb, int_same, meter));
    }

    std::vector<Rat> xs = x.as_rats();
    std::vector<Rat> ys = y.as_rats();
    auto comb = [](const Rat& a, const Rat& b) { return Rat(a + b); };
    return FiniteSet::from_sorted_rats(pairwise_kernel(xs, ys, comb, rat_same, meter));
}

FiniteSet productset_m(const FiniteSet& x, const FiniteSet& y, BudgetMeter& meter) {
    if (x.empty() || y.empty()) raise(errc::empty_input, "productset of empty set");

    if (x.mode() == SetMode::real || y.mode() == SetMode::real) {
        unsigned prec = std::min(x.mode() == SetMode::real ? x.precision() : UINT_MAX,
                                 y.mode() == SetMode::real ? y.precision() : UINT_MAX);
        std::vector<Real> xs = x.as_reals(prec);
        std::vector<Real> ys = y.as_reals(prec);
        RealSame same{mul_band(x, y)};
        auto comb = [](const Real& a, const Real& b) { return a * b; };
        return FiniteSet::from_sorted_reals(pairwise_kernel(xs, ys, comb, same, meter));
    }

    if (x.has_int_rep() && y.has_int_rep() && int_mul_safe(x.ints(), y.ints())) {
        auto comb = [](i64 a, i64 b) { return a * b; };
        return FiniteSet::from_sorted_ints(
            pairwise_kernel(x.ints(), y.ints(), comb, int_same, meter));
    }

    std::vector<Rat> xs = x.as_rats();
    std::vector<Rat> ys = y.as_rats();
    auto comb = [](const Rat& a, const Rat& b) { return Rat(a * b); };
    return FiniteSet::from_sorted_rats(pairwise_kernel(xs, ys, comb, rat_same, meter));
}

FiniteSet iterated_sumset_m(const FiniteSet& x, i64 k, BudgetMeter& meter) {
    if (k < 1) raise(errc::invalid_argument, "iterated_sumset requires k >= 1");
    FiniteSet cur = x;
    for (i64 i = 2; i <= k; ++i) cur = sumset_m(cur, x, meter);
    return cur;
}

FiniteSet iterated_product_m(const FiniteSet& x, i64 k, BudgetMeter& meter) {
    if (k < 1) raise(errc::invalid_argument, "iterated_product requires k >= 1");
    FiniteSet cur = x;
    for (i64 i = 2; i <= k; ++i) cur = productset_m(cur, x, meter);
    return cur;
}

} // namespace

FiniteSet negate_set(const FiniteSet& x) {
    if (x.mode() == SetMode::real) {
        std::vector<Real> v;
        v.reserve(x.size());
        for (std::size_t i = x.size(); i-- > 0;) v.push_back(-x.reals()[i]);
        return FiniteSet::from_sorted_reals(std::move(v));
    }
    if (x.has_int_rep() && x.ints().front() != INT64_MIN) {
        std::vector<i64> v;
        v.reserve(x.size());
        for (std::size_t i = x.size(); i-- > 0;) v.push_back(-x.ints()[i]);
        return FiniteSet::from_sorted_ints(std::move(v));
    }
    std::vector<Rat> rats = x.as_rats();
    std::vector<Rat> v;
    v.reserve(rats.size());
    for (std::size_t i = rats.size(); i-- > 0;) v.emplace_back(-rats[i]);
    return FiniteSet::from_sorted_rats(std::move(v));
}

FiniteSet dilate(const FiniteSet& x, const Scalar& c) {
    if (c.is_zero()) raise(errc::invalid_argument, "dilate by zero");
    std::vector<Scalar> v;
    v.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) v.push_back(x.at(i) * c);
    return make_set(v);
}

FiniteSet translate(const FiniteSet& x, const Scalar& c) {
    std::vector<Scalar> v;
    v.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) v.push_back(x.at(i) + c);
    return make_set(v);
}

FiniteSet sumset(const FiniteSet& x, const FiniteSet& y, const GrowthBudget& budget) {
    BudgetMeter meter(budget);
    return sumset_m(x, y, meter);
}

FiniteSet iterated_sumset(const FiniteSet& x, i64 k, const GrowthBudget& budget) {
    BudgetMeter meter(budget);
    return iterated_sumset_m(x, k, meter);
}

FiniteSet signed_combination(const FiniteSet& x, i64 k, i64 l, const GrowthBudget& budget) {
    if (k < 0 || l < 0 || k + l < 1)
        raise(errc::invalid_argument, "signed_combination requires k,l >= 0 and k+l >= 1");
    BudgetMeter meter(budget);
    if (l == 0) return iterated_sumset_m(x, k, meter);
    FiniteSet neg = negate_set(iterated_sumset_m(x, l, meter));
    if (k == 0) return neg;
    FiniteSet pos = iterated_sumset_m(x, k, meter);
    return sumset_m(pos, neg, meter);
}

FiniteSet productset(const FiniteSet& x, const FiniteSet& y, const GrowthBudget& budget) {
    BudgetMeter meter(budget);
    return productset_m(x, y, meter);
}

FiniteSet iterated_product(const FiniteSet& x, i64 k, const GrowthBudget& budget) {
    BudgetMeter meter(budget);
    return iterated_product_m(x, k, meter);
}

FiniteSet ratio_set(const FiniteSet& x, i64 k, i64 l, const GrowthBudget& budget) {
    if (k < 1 || l < 0) raise(errc::invalid_argument, "ratio_set requires k >= 1, l >= 0");
    if (x.contains(Scalar(Rat(0)))) raise(errc::zero_divisor, "ratio_set requires 0 not in X");
    BudgetMeter meter(budget);
    FiniteSet num = iterated_product_m(x, k, meter);
    if (l == 0) return num;
    FiniteSet den = iterated_product_m(x, l, meter);

    if (num.mode() == SetMode::real || den.mode() == SetMode::real) {
        unsigned prec = std::min(num.precision(), den.precision());
        std::vector<Real> inv;
        inv.reserve(den.size());
        Real one = real_from_int(1, prec);
        for (const Real& r : den.as_reals(prec)) inv.push_back(one / r);
        std::sort(inv.begin(), inv.end(), [](const Real& a, const Real& b) { return a < b; });
        FiniteSet invset = FiniteSet::from_sorted_reals(std::move(inv));
        return productset_m(num, invset, meter);
    }
    std::vector<Rat> inv;
    inv.reserve(den.size());
    for (const Rat& q : den.as_rats()) inv.emplace_back(1 / q);
    std::sort(inv.begin(), inv.end());
    FiniteSet invset = FiniteSet::from_sorted_rats(std::move(inv));
    return productset_m(num, invset, meter);
}

namespace {

// Indices i with A[i] + t in A (stored-digit match in real mode, within the
// artifact band).
std::vector<std::size_t> shifted_member_indices(const FiniteSet& a, const Scalar& t) {
    std::vector<std::size_t> out;
    const std::size_t n = a.size();
    if (a.mode() == SetMode::exact && t.exact()) {
        std::size_t j = 0;
        for (std::size_t i = 0; i < n; ++i) {
            Scalar target = a.at(i) + t;
            while (j < n && a.at(j) < target) ++j;
            if (j < n && a.at(j) == target) out.push_back(i);
            if (j == n) break;
        }
        return out;
    }
    unsigned prec = a.precision();
    std::vector<Real> vals = a.as_reals(prec);
    Real tr = t.to_real(prec);
    Real band = ldexp2(a.scale_hint() + abs(tr), -static_cast<long>(prec - kBandGuardBits));
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        Real target = vals[i] + tr;
        while (j < n && vals[j] < target - band) ++j;
        if (j < n && !(vals[j] > target + band)) out.push_back(i);
        if (j == n) break;
    }
    return out;
}

} // namespace

std::int64_t rep_count(const FiniteSet& a, const Scalar& t) {
    if (t.is_zero()) return static_cast<i64>(a.size());
    return static_cast<i64>(shifted_member_indices(a, t.sgn() > 0 ? t : Scalar(-t)).size());
}

FiniteSet shift_intersection(const FiniteSet& a, const Scalar& t) {
    // A(t) = A ∩ (A - t) = { x in A : x + t in A }.
    std::vector<Scalar> vals;
    for (std::size_t i : shifted_member_indices(a, t)) vals.push_back(a.at(i));
    if (vals.empty()) {
        FiniteSet empty;
        return empty;
    }
    return make_set(vals);
}

} // namespace growthlab
