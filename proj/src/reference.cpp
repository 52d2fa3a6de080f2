#include "growthlab/reference.hpp"

#include <algorithm>
#include <cmath>

#include "growthlab/error.hpp"

namespace growthlab::ref {

namespace {

Real real_band(const FiniteSet& x, const FiniteSet& y, bool product) {
    unsigned p = std::min(x.precision(), y.precision());
    Real s = product ? x.scale_hint() * y.scale_hint() : x.scale_hint() + y.scale_hint();
    if (product) {
        Real one = real_from_int(1, p);
        if (s < one) s = one;
    }
    return ldexp2(s, -static_cast<long>(p - kBandGuardBits));
}

std::vector<Real> band_dedup(std::vector<Real> vals, const Real& band) {
    std::sort(vals.begin(), vals.end(), [](const Real& a, const Real& b) { return a < b; });
    std::vector<Real> out;
    out.reserve(vals.size());
    for (Real& v : vals)
        if (out.empty() || (v - out.back()) > band) out.push_back(std::move(v));
    return out;
}

FiniteSet combine(const FiniteSet& x, const FiniteSet& y, bool product) {
    if (x.mode() == SetMode::real || y.mode() == SetMode::real) {
        unsigned prec = std::min(x.precision(), y.precision());
        std::vector<Real> xs = x.as_reals(prec);
        std::vector<Real> ys = y.as_reals(prec);
        std::vector<Real> all;
        all.reserve(xs.size() * ys.size());
        for (const Real& a : xs)
            for (const Real& b : ys) all.push_back(product ? a * b : a + b);
        return FiniteSet::from_sorted_reals(band_dedup(std::move(all), real_band(x, y, product)));
    }
    if (x.has_int_rep() && y.has_int_rep()) {
        bool safe = true;
        for (std::int64_t v : {x.ints().front(), x.ints().back()})
            for (std::int64_t w : {y.ints().front(), y.ints().back()}) {
                __int128 r = product ? __int128(v) * w : __int128(v) + w;
                safe &= r > INT64_MIN / 2 && r < INT64_MAX / 2;
            }
        if (safe) {
            std::vector<std::int64_t> all;
            all.reserve(x.size() * y.size());
            for (std::int64_t a : x.ints())
                for (std::int64_t b : y.ints()) all.push_back(product ? a * b : a + b);
            std::sort(all.begin(), all.end());
            all.erase(std::unique(all.begin(), all.end()), all.end());
            return FiniteSet::from_sorted_ints(std::move(all));
        }
    }
    std::vector<Rat> xs = x.as_rats();
    std::vector<Rat> ys = y.as_rats();
    std::vector<Rat> all;
    all.reserve(xs.size() * ys.size());
    for (const Rat& a : xs)
        for (const Rat& b : ys) all.push_back(product ? Rat(a * b) : Rat(a + b));
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return FiniteSet::from_sorted_rats(std::move(all));
}

} // namespace

FiniteSet sumset(const FiniteSet& x, const FiniteSet& y) { return combine(x, y, false); }
FiniteSet productset(const FiniteSet& x, const FiniteSet& y) { return combine(x, y, true); }

FiniteSet iterated_sumset(const FiniteSet& x, std::int64_t k) {
    if (k < 1) raise(errc::invalid_argument, "k >= 1");
    FiniteSet cur = x;
    for (std::int64_t i = 2; i <= k; ++i) cur = sumset(cur, x);
    return cur;
}

FiniteSet iterated_product(const FiniteSet& x, std::int64_t k) {
    if (k < 1) raise(errc::invalid_argument, "k >= 1");
    FiniteSet cur = x;
    for (std::int64_t i = 2; i <= k; ++i) cur = productset(cur, x);
    return cur;
}

FiniteSet signed_combination(const FiniteSet& x, std::int64_t k, std::int64_t l) {
    if (k + l < 1) raise(errc::invalid_argument, "k + l >= 1");
    if (l == 0) return iterated_sumset(x, k);
    std::vector<Scalar> neg;
    for (std::size_t i = x.size(); i-- > 0;) neg.push_back(-x.at(i));
    FiniteSet negx = make_set(neg);
    if (k == 0) return iterated_sumset(negx, l);
    return sumset(iterated_sumset(x, k), iterated_sumset(negx, l));
}

FiniteSet signed_combination_tuples(const FiniteSet& x, std::int64_t k, std::int64_t l) {
    if (x.mode() != SetMode::exact) raise(errc::invalid_argument, "tuple oracle is exact-mode");
    std::vector<Rat> elems = x.as_rats();
    const std::int64_t n = static_cast<std::int64_t>(elems.size());
    const std::int64_t arity = k + l;
    if (arity < 1) raise(errc::invalid_argument, "k + l >= 1");

    double tuple_count = std::pow(static_cast<double>(n), static_cast<double>(arity));
    if (tuple_count > 5e7) raise(errc::space_too_large, "tuple space too large for oracle");

    std::vector<Rat> all;
    std::vector<std::int64_t> idx(static_cast<std::size_t>(arity), 0);
    for (;;) {
        Rat v(0);
        for (std::int64_t p = 0; p < arity; ++p) {
            const Rat& e = elems[static_cast<std::size_t>(idx[static_cast<std::size_t>(p)])];
            if (p < k)
                v += e;
            else
                v -= e;
        }
        all.push_back(v);
        std::int64_t p = arity - 1;
        while (p >= 0 && ++idx[static_cast<std::size_t>(p)] == n) idx[static_cast<std::size_t>(p--)] = 0;
        if (p < 0) break;
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return FiniteSet::from_sorted_rats(std::move(all));
}

// Monotone non-decreasing double key: sign * (2^26 + clamp(exp) + |mantissa|).
// Sign classes land in disjoint ranges; ties (clamped exponents or sub-key
// resolution) are broken by exact comparison wherever the key is used.
double coarse_key(const Real& v) {
    if (v.is_zero()) return 0.0;
    long e = 0;
    double m = mpfr_get_d_2exp(&e, v.raw(), MPFR_RNDN); // |m| in [0.5, 1)
    double ec = std::clamp(static_cast<double>(e), -33554432.0, 33554432.0); // +-2^25
    double k = 67108864.0 + ec + std::fabs(m);                               // 2^26 offset
    return v.sgn() < 0 ? -k : k;
}

namespace {

/// |b - a| <= max(|a|,|b|) * 2^rel_log2, allocation-free.
bool rel_same(const Real& a, const Real& b, long rel_log2) {
    if (mpfr_equal_p(a.raw(), b.raw())) return true;
    struct Scratch {
        mpfr_t d, s;
        Scratch() {
            mpfr_init2(d, 64);
            mpfr_init2(s, 64);
        }
        ~Scratch() {
            mpfr_clear(d);
            mpfr_clear(s);
        }
    };
    static thread_local Scratch sc;
    mpfr_sub(sc.d, b.raw(), a.raw(), MPFR_RNDN);
    mpfr_abs(sc.d, sc.d, MPFR_RNDN);
    if (mpfr_cmpabs(a.raw(), b.raw()) >= 0)
        mpfr_abs(sc.s, a.raw(), MPFR_RNDN);
    else
        mpfr_abs(sc.s, b.raw(), MPFR_RNDN);
    mpfr_mul_2si(sc.s, sc.s, rel_log2, MPFR_RNDN);
    return mpfr_cmp(sc.d, sc.s) <= 0;
}

} // namespace

RealFold fold_sums(const std::vector<Real>& base, int k) {
    if (base.empty() || k < 1) raise(errc::invalid_argument, "fold_sums needs data and k >= 1");
    unsigned prec = base.front().prec();
    const long band_log2 = -static_cast<long>(prec - kBandGuardBits);

    std::vector<Real> cur = base;
    std::sort(cur.begin(), cur.end(), [](const Real& a, const Real& b) { return a < b; });
    for (int fold = 2; fold <= k; ++fold) {
        std::vector<Real> all;
        all.reserve(cur.size() * base.size());
        for (const Real& a : cur)
            for (const Real& b : base) all.push_back(a + b);
        std::vector<std::pair<double, std::uint32_t>> order;
        order.reserve(all.size());
        for (std::size_t i = 0; i < all.size(); ++i)
            order.emplace_back(coarse_key(all[i]), static_cast<std::uint32_t>(i));
        std::sort(order.begin(), order.end(), [&](const auto& x, const auto& y) {
            if (x.first != y.first) return x.first < y.first;
            return all[x.second] < all[y.second];
        });
        std::vector<Real> next;
        next.reserve(all.size());
        for (const auto& [key, i] : order) {
            (void)key;
            if (next.empty() || !rel_same(next.back(), all[i], band_log2))
                next.push_back(all[i]);
        }
        cur = std::move(next);
    }

    RealFold out;
    out.prec = prec;
    out.keys.reserve(cur.size());
    for (const Real& v : cur) out.keys.push_back(coarse_key(v));
    out.values = std::move(cur);
    return out;
}

bool member(const RealFold& s, const Real& w, long rel_log2_tol) {
    Real margin = ldexp2(abs(w), rel_log2_tol + 2);
    double klo = coarse_key(w - margin) - 1e-6;
    double khi = coarse_key(w + margin) + 1e-6;
    auto lo = std::lower_bound(s.keys.begin(), s.keys.end(), klo);
    auto hi = std::upper_bound(s.keys.begin(), s.keys.end(), khi);
    for (auto it = lo; it != hi; ++it) {
        std::size_t i = static_cast<std::size_t>(it - s.keys.begin());
        if (rel_same(s.values[i], w, rel_log2_tol)) return true;
    }
    return false;
}

bool member_difference(const RealFold& sk, const RealFold& sl, const Real& w, long rel_log2_tol) {
    for (const Real& v : sl.values)
        if (member(sk, w + v, rel_log2_tol)) return true;
    return false;
}

} // namespace growthlab::ref
