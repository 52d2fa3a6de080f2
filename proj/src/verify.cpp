#include "growthlab/verify.hpp"

#include <algorithm>
#include <bit>
#include <exception>

#include <omp.h>

#include "growthlab/setcore.hpp"

namespace growthlab::verify {

namespace {

using i64 = std::int64_t;

Rat rat_of(i64 v) { return Rat(static_cast<long>(v)); }

Scalar ratio_of(const Scalar& lhs, const Scalar& rhs, unsigned prec) {
    if (lhs.exact() && rhs.exact()) return lhs / rhs;
    return Scalar(lhs.to_real(prec) / rhs.to_real(prec));
}

void push_param(CheckResult& r, const std::string& k, const std::string& v) {
    r.params.emplace_back(k, v);
}

mpz_class pow_z(i64 base, i64 e) {
    mpz_class out;
    mpz_ui_pow_ui(out.get_mpz_t(), static_cast<unsigned long>(base),
                  static_cast<unsigned long>(e));
    return out;
}

} // namespace

nlohmann::ordered_json CheckResult::to_json() const {
    nlohmann::ordered_json j;
    j["name"] = name;
    j["lhs"] = lhs.to_string();
    j["rhs"] = rhs.to_string();
    j["ratio"] = ratio.to_string();
    j["holds"] = holds;
    j["direction"] = direction;
    nlohmann::ordered_json p;
    for (const auto& [k, v] : params) p[k] = v;
    j["params"] = p;
    return j;
}

CheckResult check_plunnecke(const FiniteSet& x, const FiniteSet& y, i64 k, i64 l,
                            const GrowthBudget& budget) {
    if (k + l < 2) raise(errc::invalid_argument, "plunnecke needs k + l > 1");
    CheckResult res;
    res.name = "plunnecke";
    res.direction = "upper";

    i64 lhs = static_cast<i64>(signed_combination(x, k, l, budget).size());
    i64 sum_xy = static_cast<i64>(sumset(x, y, budget).size());
    mpz_class num = pow_z(sum_xy, k + l);
    mpz_class den = pow_z(static_cast<i64>(y.size()), k + l - 1);
    Rat rhs(num, den);
    rhs.canonicalize();

    res.lhs = Scalar(rat_of(lhs));
    res.rhs = Scalar(rhs);
    res.ratio = res.lhs / res.rhs;
    res.holds = !(res.lhs > res.rhs);
    push_param(res, "k", std::to_string(k));
    push_param(res, "l", std::to_string(l));
    push_param(res, "|X|", std::to_string(x.size()));
    push_param(res, "|Y|", std::to_string(y.size()));
    return res;
}

CheckResult check_ruzsa(const FiniteSet& x, const FiniteSet& y, const FiniteSet& z,
                        const GrowthBudget& budget) {
    CheckResult res;
    res.name = "ruzsa_triangle";
    res.direction = "upper";

    FiniteSet neg_z = negate_set(z);
    i64 lhs = static_cast<i64>(sumset(y, neg_z, budget).size());
    i64 xy = static_cast<i64>(sumset(x, y, budget).size());
    i64 xz = static_cast<i64>(sumset(x, z, budget).size());
    Rat rhs(rat_of(xy) * rat_of(xz) / rat_of(static_cast<i64>(x.size())));

    res.lhs = Scalar(rat_of(lhs));
    res.rhs = Scalar(rhs);
    res.ratio = res.lhs / res.rhs;
    res.holds = !(res.lhs > res.rhs);
    push_param(res, "|X|", std::to_string(x.size()));
    push_param(res, "|Y|", std::to_string(y.size()));
    push_param(res, "|Z|", std::to_string(z.size()));
    return res;
}

CheckResult check_enr(const FiniteSet& a, const ConvexFunctionSpec& f, i64 k,
                      const GrowthBudget& budget, unsigned prec) {
    if (k < 1) raise(errc::invalid_argument, "enr needs k >= 1");
    CheckResult res;
    res.name = "enr";
    res.direction = "lower";

    i64 ka = static_cast<i64>(iterated_sumset(a, k, budget).size());
    FiniteSet fa = image_set(f, a, prec);
    i64 kfa = static_cast<i64>(iterated_sumset(fa, k, budget).size());

    Real n = real_from_int(static_cast<i64>(a.size()), prec);
    Real expo = real_from_int(3, prec) -
                ldexp2(real_from_int(1, prec), static_cast<long>(1 - k)); // 3 - 2^(1-k)
    res.lhs = Scalar(rat_of(ka) * rat_of(kfa));
    res.rhs = Scalar(pow(n, expo));
    res.ratio = ratio_of(res.lhs, res.rhs, prec);
    res.holds = !(res.lhs.to_real(prec) < res.rhs.to_real(prec));
    push_param(res, "k", std::to_string(k));
    push_param(res, "|kA|", std::to_string(ka));
    push_param(res, "|kf(A)|", std::to_string(kfa));
    push_param(res, "fn", f.name());
    return res;
}

CheckResult check_bom(const FiniteSet& a, const ConvexFunctionSpec& f, i64 k,
                      const GrowthBudget& budget, bool allow_k3, unsigned prec) {
    if (k < 1 || k > 3 || (k == 3 && !allow_k3))
        raise(errc::invalid_argument, "bom supports k in {1,2} (k=3 via override)");
    if (static_cast<i64>(a.size()) <= 10 * k)
        raise(errc::invalid_argument, "bom needs |A| > 10k");

    Interval hull;
    hull.lo = a.front();
    hull.hi = a.back();
    hull.lo_open = false;
    hull.hi_open = false;
    try {
        certify_k_convex(f, hull, static_cast<unsigned>(k), prec);
    } catch (const error& e) {
        if (e.code() == errc::certification_failure)
            raise(errc::not_k_convex, f.name() + " is not k-convex over the hull of A");
        throw;
    }

    CheckResult res;
    res.name = "bom";
    res.direction = "lower";

    i64 aaa = static_cast<i64>(signed_combination(a, 2, 1, budget).size());
    Rat doubling = rat_of(aaa) / rat_of(static_cast<i64>(a.size()));

    FiniteSet fa = image_set(f, a, prec);
    i64 two_k = i64(1) << k;
    i64 lhs = static_cast<i64>(signed_combination(fa, two_k, two_k - 1, budget).size());

    Real n = real_from_int(static_cast<i64>(a.size()), prec);
    Real log2n = log2(n);
    i64 k_exp = (i64(1) << (k + 1)) - k - 2;
    i64 log_exp = (i64(1) << (k + 2)) - k - 4;
    Real rhs = pow_si(n, k + 1) /
               (pow_si(Real(doubling, prec), k_exp) * pow_si(log2n, log_exp));

    res.lhs = Scalar(rat_of(lhs));
    res.rhs = Scalar(rhs);
    res.ratio = ratio_of(res.lhs, res.rhs, prec);
    res.holds = !(res.lhs.to_real(prec) < rhs);
    push_param(res, "k", std::to_string(k));
    push_param(res, "K", rat_to_string(doubling));
    push_param(res, "fn", f.name());
    push_param(res, "K_exponent", std::to_string(k_exp));
    push_param(res, "log_exponent", std::to_string(log_exp));
    return res;
}

namespace {

/// Iterated sumset with a fold-growth pre-estimate: before each fold,
/// projects the next size from the observed growth and stops early when the
/// projection already exceeds the budget.
FiniteSet iterated_sumset_estimated(const FiniteSet& x, i64 k, const GrowthBudget& budget) {
    FiniteSet cur = x;
    double prev = static_cast<double>(x.size());
    for (i64 i = 2; i <= k; ++i) {
        double growth = static_cast<double>(cur.size()) / prev;
        double projected = static_cast<double>(cur.size()) * std::max(1.0, growth);
        if (projected > 1.15 * static_cast<double>(budget.max_result_size))
            raise(errc::budget_exceeded, "projected fold size exceeds budget");
        prev = static_cast<double>(cur.size());
        cur = sumset(cur, x, budget);
    }
    return cur;
}

FiniteSet iterated_product_estimated(const FiniteSet& x, i64 k, const GrowthBudget& budget) {
    FiniteSet cur = x;
    double prev = static_cast<double>(x.size());
    for (i64 i = 2; i <= k; ++i) {
        double growth = static_cast<double>(cur.size()) / prev;
        double projected = static_cast<double>(cur.size()) * std::max(1.0, growth);
        if (projected > 1.15 * static_cast<double>(budget.max_result_size))
            raise(errc::budget_exceeded, "projected fold size exceeds budget");
        prev = static_cast<double>(cur.size());
        cur = productset(cur, x, budget);
    }
    return cur;
}

} // namespace

std::vector<CheckResult> check_main(const FiniteSet& a, const ConvexFunctionSpec& f,
                                    const GrowthBudget& budget, unsigned prec) {
    std::vector<CheckResult> out;
    const i64 n = static_cast<i64>(a.size());
    Real n_r = real_from_int(n, prec);
    Real e162 = real_from_int(3, prec) / real_from_int(2, prec) +
                real_from_int(1, prec) / real_from_int(162, prec);
    Real e54 = real_from_int(3, prec) / real_from_int(2, prec) +
               real_from_int(1, prec) / real_from_int(54, prec);

    int attempted = 0, completed = 0, skipped = 0;
    auto guarded = [&](auto&& fn) -> bool {
        ++attempted;
        try {
            fn();
            ++completed;
            return true;
        } catch (const error& e) {
            if (e.code() != errc::budget_exceeded) throw;
            ++skipped;
            return false;
        }
    };

    std::optional<i64> n16a, n8a, na16, n13f, n8f, n8m7, n5m4;
    std::optional<FiniteSet> fa;
    guarded([&] {
        FiniteSet a8 = iterated_sumset_estimated(a, 8, budget);
        n8a = static_cast<i64>(a8.size());
        FiniteSet a16 = sumset(a8, a8, budget);
        n16a = static_cast<i64>(a16.size());
    });
    if (a.front().sgn() > 0)
        guarded([&] { na16 = static_cast<i64>(iterated_product_estimated(a, 16, budget).size()); });
    guarded([&] { fa = image_set(f, a, prec); });
    if (fa) {
        guarded([&] { n13f = static_cast<i64>(iterated_sumset_estimated(*fa, 13, budget).size()); });
        guarded([&] { n8f = static_cast<i64>(iterated_sumset_estimated(*fa, 8, budget).size()); });
        guarded([&] { n5m4 = static_cast<i64>(signed_combination(*fa, 5, 4, budget).size()); });
    }
    guarded([&] { n8m7 = static_cast<i64>(signed_combination(a, 8, 7, budget).size()); });

    if (n16a && na16) {
        CheckResult r;
        r.name = "thm_main_sumproduct16";
        r.direction = "lower";
        i64 m = std::max(*n16a, *na16);
        r.lhs = Scalar(rat_of(m));
        r.rhs = Scalar(pow(n_r, e162));
        r.ratio = ratio_of(r.lhs, r.rhs, prec);
        r.holds = !(r.lhs.to_real(prec) < r.rhs.to_real(prec));
        push_param(r, "|16A|", std::to_string(*n16a));
        push_param(r, "|A^(16)|", std::to_string(*na16));
        push_param(r, "exponent", "3/2+1/162");
        out.push_back(std::move(r));
    }
    if (n16a && n13f) {
        CheckResult r;
        r.name = "thm_max_16_13f";
        r.direction = "lower";
        i64 m = std::max(*n16a, *n13f);
        r.lhs = Scalar(rat_of(m));
        r.rhs = Scalar(pow(n_r, e162));
        r.ratio = ratio_of(r.lhs, r.rhs, prec);
        r.holds = !(r.lhs.to_real(prec) < r.rhs.to_real(prec));
        push_param(r, "|16A|", std::to_string(*n16a));
        push_param(r, "|13f(A)|", std::to_string(*n13f));
        push_param(r, "fn", f.name());
        push_param(r, "exponent", "3/2+1/162");
        out.push_back(std::move(r));
    }
    if (n8m7 && n5m4 && n >= 2) { // log2 n vanishes at n = 1
        {
            CheckResult r;
            r.name = "thm_product_16_11";
            r.direction = "lower";
            Real lhs = pow_si(real_from_int(*n8m7, prec), 16) *
                       pow_si(real_from_int(*n5m4, prec), 11);
            Real rhs = pow_si(n_r, 41) / pow_si(log2(n_r), 77);
            r.lhs = Scalar(lhs);
            r.rhs = Scalar(rhs);
            r.ratio = Scalar(lhs / rhs);
            r.holds = !(lhs < rhs);
            push_param(r, "|8A-7A|", std::to_string(*n8m7));
            push_param(r, "|5f(A)-4f(A)|", std::to_string(*n5m4));
            push_param(r, "fn", f.name());
            out.push_back(std::move(r));
        }
        {
            CheckResult r;
            r.name = "thm_max_8m7_5m4";
            r.direction = "lower";
            i64 m = std::max(*n8m7, *n5m4);
            r.lhs = Scalar(rat_of(m));
            r.rhs = Scalar(pow(n_r, e54));
            r.ratio = ratio_of(r.lhs, r.rhs, prec);
            r.holds = !(r.lhs.to_real(prec) < r.rhs.to_real(prec));
            push_param(r, "exponent", "3/2+1/54");
            out.push_back(std::move(r));
        }
    }
    // triangle-inequality reductions; these are theorems and must hold
    if (n8m7 && n16a && n8a) {
        CheckResult r;
        r.name = "ruzsa_chain_sum";
        r.direction = "upper";
        r.lhs = Scalar(rat_of(*n8m7));
        r.rhs = Scalar(Rat(rat_of(*n16a) * rat_of(*n16a) / rat_of(*n8a)));
        r.ratio = r.lhs / r.rhs;
        r.holds = !(r.lhs > r.rhs);
        push_param(r, "|8A|", std::to_string(*n8a));
        push_param(r, "|16A|", std::to_string(*n16a));
        out.push_back(std::move(r));
    }
    if (n5m4 && n13f && n8f) {
        CheckResult r;
        r.name = "ruzsa_chain_fn";
        r.direction = "upper";
        r.lhs = Scalar(rat_of(*n5m4));
        r.rhs = Scalar(Rat(rat_of(*n13f) * rat_of(*n13f) / rat_of(*n8f)));
        r.ratio = r.lhs / r.rhs;
        r.holds = !(r.lhs > r.rhs);
        push_param(r, "|8f(A)|", std::to_string(*n8f));
        push_param(r, "|13f(A)|", std::to_string(*n13f));
        push_param(r, "fn", f.name());
        out.push_back(std::move(r));
    }

    CheckResult cov;
    cov.name = "main_coverage";
    cov.direction = "info";
    cov.lhs = Scalar(Rat(1));
    cov.rhs = Scalar(Rat(1));
    cov.ratio = Scalar(Rat(1));
    cov.holds = true;
    push_param(cov, "attempted", std::to_string(attempted));
    push_param(cov, "completed", std::to_string(completed));
    push_param(cov, "skipped_budget", std::to_string(skipped));
    out.push_back(std::move(cov));
    return out;
}

std::vector<CheckResult> check_cor43(const FiniteSet& a, const Scalar& t,
                                     const GrowthBudget& budget, unsigned prec) {
    if (t.is_zero()) raise(errc::zero_shift, "cor43 needs t != 0");
    if (!(a.front().sgn() > 0)) raise(errc::domain_violation, "cor43 needs positive A");

    std::vector<CheckResult> out;
    const i64 n = static_cast<i64>(a.size());
    Real n_r = real_from_int(n, prec);

    i64 aa = static_cast<i64>(productset(a, a, budget).size());
    Rat doubling = Rat(rat_of(aa) / rat_of(n));
    i64 r_count = rep_count(a, t);

    {
        CheckResult r;
        r.name = "cor43_representations";
        r.direction = "upper";
        Real k_r(doubling, prec);
        Real expo = real_from_int(2, prec) / real_from_int(3, prec) -
                    real_from_int(1, prec) / real_from_int(123, prec);
        Real rhs = pow(k_r, real_from_int(405, prec) / real_from_int(41, prec)) * pow(n_r, expo);
        r.lhs = Scalar(rat_of(r_count));
        r.rhs = Scalar(rhs);
        r.ratio = ratio_of(r.lhs, r.rhs, prec);
        r.holds = !(r.lhs.to_real(prec) > rhs);
        push_param(r, "t", t.to_string());
        push_param(r, "K", rat_to_string(doubling));
        push_param(r, "r", std::to_string(r_count));
        out.push_back(std::move(r));
    }

    FiniteSet at = shift_intersection(a, t);
    if (!at.empty()) {
        CheckResult r;
        r.name = "cor43_chain";
        r.direction = "upper";
        Real e54 = real_from_int(3, prec) / real_from_int(2, prec) +
                   real_from_int(1, prec) / real_from_int(54, prec);
        r.lhs = Scalar(pow(real_from_int(static_cast<i64>(at.size()), prec), e54));
        r.rhs = Scalar(pow_si(Real(doubling, prec), 15) * n_r);
        r.ratio = ratio_of(r.lhs, r.rhs, prec);
        r.holds = !(r.lhs.to_real(prec) > r.rhs.to_real(prec));
        push_param(r, "|A(t)|", std::to_string(at.size()));
        out.push_back(std::move(r));

        if (at.size() >= 2) {
            try {
                i64 ratio87 = static_cast<i64>(ratio_set(at, 8, 7, budget).size());
                CheckResult q;
                q.name = "cor42_ratio_set";
                q.direction = "lower";
                q.lhs = Scalar(rat_of(ratio87));
                q.rhs = Scalar(pow(real_from_int(static_cast<i64>(at.size()), prec), e54));
                q.ratio = ratio_of(q.lhs, q.rhs, prec);
                q.holds = !(q.lhs.to_real(prec) < q.rhs.to_real(prec));
                push_param(q, "|A(t)^(8)/A(t)^(7)|", std::to_string(ratio87));
                out.push_back(std::move(q));
            } catch (const error& e) {
                if (e.code() != errc::budget_exceeded) throw;
            }
        }
    }
    return out;
}

namespace {

std::vector<std::vector<i64>> enumerate_small_sets(i64 universe_bound, i64 max_size) {
    std::vector<std::vector<i64>> sets;
    const i64 u = universe_bound + 1;
    if (u > 24) raise(errc::space_too_large, "universe too large to enumerate");
    for (i64 mask = 1; mask < (i64(1) << u); ++mask) {
        if (std::popcount(static_cast<std::uint64_t>(mask)) > max_size) continue;
        std::vector<i64> v;
        for (i64 b = 0; b < u; ++b)
            if (mask & (i64(1) << b)) v.push_back(b);
        sets.push_back(std::move(v));
    }
    return sets;
}

} // namespace

std::int64_t exhaustive_check_count(i64 universe_bound, i64 max_size, i64 max_fold) {
    i64 sets = 0;
    const i64 u = universe_bound + 1;
    for (i64 mask = 1; mask < (i64(1) << u); ++mask)
        if (std::popcount(static_cast<std::uint64_t>(mask)) <= max_size) ++sets;
    i64 folds = 0;
    for (i64 k = 0; k <= max_fold; ++k)
        for (i64 l = 0; k + l <= max_fold; ++l)
            if (k + l >= 2) ++folds;
    return sets * sets * folds + sets * sets * sets;
}

std::vector<CheckResult> exhaustive_oracle(i64 universe_bound, i64 max_size, i64 max_fold,
                                           const GrowthBudget& budget) {
    if (exhaustive_check_count(universe_bound, max_size, max_fold) > 10'000'000)
        raise(errc::space_too_large, "exhaustive oracle space exceeds 10^7 checks");

    std::vector<std::vector<i64>> raw = enumerate_small_sets(universe_bound, max_size);
    std::vector<FiniteSet> sets;
    sets.reserve(raw.size());
    for (auto& v : raw) sets.push_back(FiniteSet::from_sorted_ints(std::move(v)));

    std::vector<std::pair<i64, i64>> folds;
    for (i64 k = 0; k <= max_fold; ++k)
        for (i64 l = 0; k + l <= max_fold; ++l)
            if (k + l >= 2) folds.emplace_back(k, l);

    const i64 ns = static_cast<i64>(sets.size());
    std::vector<std::vector<CheckResult>> violations(static_cast<std::size_t>(ns));
    std::exception_ptr fail;

#pragma omp parallel for schedule(dynamic, 1)
    for (i64 xi = 0; xi < ns; ++xi) {
        try {
            std::vector<CheckResult> local;
            for (i64 yi = 0; yi < ns; ++yi) {
                for (auto [k, l] : folds) {
                    CheckResult r = check_plunnecke(sets[static_cast<std::size_t>(xi)],
                                                    sets[static_cast<std::size_t>(yi)], k, l,
                                                    budget);
                    if (!r.holds) local.push_back(std::move(r));
                }
                for (i64 zi = 0; zi < ns; ++zi) {
                    CheckResult r =
                        check_ruzsa(sets[static_cast<std::size_t>(xi)],
                                    sets[static_cast<std::size_t>(yi)],
                                    sets[static_cast<std::size_t>(zi)], budget);
                    if (!r.holds) local.push_back(std::move(r));
                }
            }
            violations[static_cast<std::size_t>(xi)] = std::move(local);
        } catch (...) {
#pragma omp critical
            if (!fail) fail = std::current_exception();
        }
    }
    if (fail) std::rethrow_exception(fail);

    std::vector<CheckResult> out;
    for (auto& v : violations)
        for (auto& r : v) out.push_back(std::move(r));
    return out;
}

FiniteSet positive_reduction(const FiniteSet& a) {
    std::vector<Scalar> pos, neg;
    for (std::size_t i = 0; i < a.size(); ++i) {
        Scalar v = a.at(i);
        if (v.sgn() > 0)
            pos.push_back(v);
        else if (v.sgn() < 0)
            neg.push_back(-v);
    }
    std::vector<Scalar>& chosen = pos.size() >= neg.size() ? pos : neg;
    if (chosen.empty()) raise(errc::invalid_argument, "set has no nonzero elements");
    if (2 * chosen.size() + 1 < a.size())
        raise(errc::internal, "sign reduction bound violated");
    return make_set(chosen);
}

} // namespace growthlab::verify
