#include "growthlab/convexfn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace growthlab {

bool Interval::contains(const Scalar& x) const {
    if (lo) {
        int c = cmp(x, *lo);
        if (c < 0 || (c == 0 && lo_open)) return false;
    }
    if (hi) {
        int c = cmp(x, *hi);
        if (c > 0 || (c == 0 && hi_open)) return false;
    }
    return true;
}

std::string Interval::to_string() const {
    std::ostringstream os;
    os << (lo_open ? '(' : '[') << (lo ? lo->to_string() : std::string("-inf")) << ", "
       << (hi ? hi->to_string() : std::string("+inf")) << (hi_open ? ')' : ']');
    return os.str();
}

ConvexFunctionSpec ConvexFunctionSpec::log_e() {
    return ConvexFunctionSpec(FnKind::log_e, Rat(0), Interval::greater_than(Scalar(Rat(0))));
}
ConvexFunctionSpec ConvexFunctionSpec::exp_e() {
    return ConvexFunctionSpec(FnKind::exp_e, Rat(0), Interval::all());
}
ConvexFunctionSpec ConvexFunctionSpec::cube() {
    // strictly convex on [0, inf); the closed endpoint keeps gap evaluation
    // at 0 available
    Interval dom;
    dom.lo = Scalar(Rat(0));
    dom.lo_open = false;
    return ConvexFunctionSpec(FnKind::cube, Rat(0), dom);
}
ConvexFunctionSpec ConvexFunctionSpec::log_shift(Rat lambda) {
    if (sgn(lambda) <= 0) raise(errc::invalid_argument, "log_shift requires lambda > 0");
    return ConvexFunctionSpec(FnKind::log_shift, std::move(lambda), Interval::all());
}
ConvexFunctionSpec ConvexFunctionSpec::square() {
    return ConvexFunctionSpec(FnKind::square, Rat(0), Interval::greater_than(Scalar(Rat(0))));
}

ConvexFunctionSpec ConvexFunctionSpec::parse(const std::string& spec) {
    if (spec == "ln") return log_e();
    if (spec == "exp") return exp_e();
    if (spec == "cube") return cube();
    if (spec == "square") return square();
    if (spec.rfind("logshift:", 0) == 0) {
        std::string body = spec.substr(9);
        auto eq = body.find('=');
        if (eq != std::string::npos) body = body.substr(eq + 1);
        return log_shift(parse_rat(body));
    }
    raise(errc::parse_error, "unknown function spec: " + spec);
}

std::string ConvexFunctionSpec::name() const {
    switch (kind_) {
        case FnKind::log_e: return "ln";
        case FnKind::exp_e: return "exp";
        case FnKind::cube: return "cube";
        case FnKind::square: return "square";
        case FnKind::log_shift: return "logshift:lambda=" + rat_to_string(lambda_);
    }
    return "?";
}

bool ConvexFunctionSpec::convex() const { return kind_ != FnKind::log_e; }

Interval ConvexFunctionSpec::gap_range(const Real& d) const {
    Scalar zero{Rat(0)};
    switch (kind_) {
        case FnKind::log_e: return Interval::greater_than(zero);
        case FnKind::exp_e: return Interval::greater_than(zero);
        case FnKind::cube: return Interval::greater_than(Scalar(d * d * d));
        case FnKind::square: return Interval::greater_than(Scalar(d * d));
        case FnKind::log_shift: return Interval::open(zero, Scalar(d));
    }
    raise(errc::internal, "unreachable");
}

namespace {

void check_domain(const ConvexFunctionSpec& f, const Real& x) {
    if (!f.domain().contains(Scalar(x)))
        raise(errc::domain_violation,
              f.name() + " evaluated outside domain " + f.domain().to_string());
}

// ln is the only registered kind whose formulas need a guard beyond R.
void check_smooth(const ConvexFunctionSpec& f, const Real& x) {
    if (f.kind() == FnKind::log_e && x.sgn() <= 0)
        raise(errc::domain_violation, "ln evaluated at a nonpositive point");
}

Real exp_r(const Real& x) { return exp(x); }

Real eval_impl(const ConvexFunctionSpec& f, const Real& x) {
    unsigned p = x.prec();
    switch (f.kind()) {
        case FnKind::log_e: return log(x);
        case FnKind::exp_e: return exp_r(x);
        case FnKind::cube: return x * x * x;
        case FnKind::square: return x * x;
        case FnKind::log_shift: return log(exp_r(x) + Real(f.lambda(), p));
    }
    raise(errc::internal, "unreachable");
}

Real deriv_impl(const ConvexFunctionSpec& f, unsigned j, const Real& x) {
    if (j == 0) return eval_impl(f, x);
    unsigned p = x.prec();
    Real one = real_from_int(1, p);
    switch (f.kind()) {
        case FnKind::log_e: {
            // (-1)^(j-1) (j-1)! / x^j
            Real r = one / pow_si(x, static_cast<long>(j));
            long fact = 1;
            for (unsigned i = 2; i < j; ++i) fact *= i;
            r = r * real_from_int(j % 2 == 1 ? fact : -fact, p);
            return r;
        }
        case FnKind::exp_e: return exp_r(x);
        case FnKind::cube:
            switch (j) {
                case 1: return real_from_int(3, p) * x * x;
                case 2: return real_from_int(6, p) * x;
                case 3: return real_from_int(6, p);
                default: return Real(p);
            }
        case FnKind::square:
            switch (j) {
                case 1: return real_from_int(2, p) * x;
                case 2: return real_from_int(2, p);
                default: return Real(p);
            }
        case FnKind::log_shift: {
            Real u = exp_r(x);
            Real lam(f.lambda(), p);
            Real s = u + lam;
            switch (j) {
                case 1: return u / s;
                case 2: return lam * u / (s * s);
                case 3: return lam * u * (lam - u) / (s * s * s);
                case 4: return lam * u * (lam * lam - real_from_int(4, p) * lam * u + u * u) / (s * s * s * s);
            }
        }
    }
    raise(errc::internal, "unreachable");
}

} // namespace

Real eval(const ConvexFunctionSpec& f, const Real& x) {
    check_domain(f, x);
    return eval_impl(f, x);
}

Real deriv(const ConvexFunctionSpec& f, unsigned j, const Real& x) {
    if (j > 4) raise(errc::unsupported, "derivatives registered to order 4");
    check_domain(f, x);
    return deriv_impl(f, j, x);
}

Real gap_eval(const ConvexFunctionSpec& f, const Real& d, const Real& x) {
    if (d.sgn() <= 0) raise(errc::invalid_argument, "gap requires d > 0");
    return eval(f, x + d) - eval(f, x);
}

namespace {

Real fd_deriv(const ConvexFunctionSpec& f, const Real& d, unsigned j, const Real& x) {
    return deriv(f, j, x + d) - deriv(f, j, x);
}

void check_gap_range(const ConvexFunctionSpec& f, const Real& d, const Real& y) {
    if (!f.gap_range(d).contains(Scalar(y)))
        raise(errc::range_violation, "value outside the range of f_d");
}

/// Monotone bisection for f_d(x) = y; f_d is strictly increasing for every
/// strictly convex registered kind.
Real gap_inverse_bisect(const ConvexFunctionSpec& f, const Real& d, const Real& y) {
    unsigned p = y.prec();
    Real lo(p), hi(p);
    const int kExpandMax = 4096;

    if (f.domain().lo) {
        // domain (a, inf): walk down toward a for the lower bracket
        Real a = f.domain().lo->to_real(p);
        Real step = real_from_int(1, p);
        lo = a + step;
        int it = 0;
        while (gap_eval(f, d, lo) >= y) {
            step = ldexp2(step, -1);
            lo = a + step;
            if (++it > kExpandMax) raise(errc::no_convergence, "bracket expansion failed (low)");
        }
        hi = lo + real_from_int(1, p);
        it = 0;
        while (gap_eval(f, d, hi) <= y) {
            hi = a + (hi - a) * real_from_int(2, p);
            if (++it > kExpandMax) raise(errc::no_convergence, "bracket expansion failed (high)");
        }
    } else {
        lo = Real(p);
        Real step = real_from_int(1, p);
        int it = 0;
        while (gap_eval(f, d, lo) >= y) {
            lo = lo - step;
            step = step * real_from_int(2, p);
            if (++it > kExpandMax) raise(errc::no_convergence, "bracket expansion failed (low)");
        }
        hi = lo + step;
        it = 0;
        while (gap_eval(f, d, hi) <= y) {
            hi = hi + step;
            step = step * real_from_int(2, p);
            if (++it > kExpandMax) raise(errc::no_convergence, "bracket expansion failed (high)");
        }
    }

    const unsigned iters = p + 64;
    Real half = ldexp2(real_from_int(1, p), -1);
    for (unsigned i = 0; i < iters; ++i) {
        Real mid = (lo + hi) * half;
        if (mid == lo || mid == hi) break;
        if (gap_eval(f, d, mid) < y)
            lo = mid;
        else
            hi = mid;
    }
    return (lo + hi) * half;
}

Real expm1_r(const Real& x) {
    Real r(x.prec());
    mpfr_expm1(r.raw(), x.raw(), MPFR_RNDN);
    return r;
}

} // namespace

Real gap_inverse(const ConvexFunctionSpec& f, const Real& d, const Real& y) {
    if (d.sgn() <= 0) raise(errc::invalid_argument, "gap requires d > 0");
    check_gap_range(f, d, y);
    unsigned p = y.prec();
    switch (f.kind()) {
        case FnKind::log_e:
            // f_d(x) = ln((x+d)/x), inverse d / (e^y - 1)
            return d / expm1_r(y);
        case FnKind::log_shift: {
            // inverse ln(lambda (e^y - 1) / (e^d - e^y))
            Real lam(f.lambda(), p);
            Real den = exp_r(d) - exp_r(y);
            if (den.sgn() <= 0) raise(errc::range_violation, "value outside the range of f_d");
            return log(lam * expm1_r(y) / den);
        }
        case FnKind::exp_e:
        case FnKind::cube:
        case FnKind::square: return gap_inverse_bisect(f, d, y);
    }
    raise(errc::internal, "unreachable");
}

Real gap_inverse_deriv(const ConvexFunctionSpec& f, const Real& d, unsigned j, const Real& y) {
    if (j < 1 || j > 3) raise(errc::unsupported, "gap inverse derivatives registered for j in 1..3");
    check_gap_range(f, d, y);
    unsigned p = y.prec();
    switch (f.kind()) {
        case FnKind::log_e: {
            Real ey = exp_r(y);
            Real em1 = expm1_r(y);
            switch (j) {
                case 1: return -d * ey / (em1 * em1);
                case 2: return d * ey * (ey + real_from_int(1, p)) / (em1 * em1 * em1);
                case 3: {
                    Real q = ey * ey + real_from_int(4, p) * ey + real_from_int(1, p);
                    return -d * ey * q / (em1 * em1 * em1 * em1);
                }
            }
            break;
        }
        case FnKind::log_shift: {
            Real ey = exp_r(y);
            Real ed = exp_r(d);
            Real em1 = expm1_r(y);
            Real dif = ed - ey;
            if (dif.sgn() <= 0) raise(errc::range_violation, "value outside the range of f_d");
            Real edm1 = ed - real_from_int(1, p);
            switch (j) {
                case 1: return edm1 * ey / (em1 * dif);
                case 2: return edm1 * ey * (ey * ey - ed) / (em1 * em1 * dif * dif);
                case 3: {
                    Real e2 = ey * ey;
                    Real q = e2 * e2 + (ed + real_from_int(1, p)) * e2 * ey -
                             real_from_int(6, p) * ed * e2 + (ed * ed + ed) * ey + ed * ed;
                    return edm1 * ey * q / (em1 * em1 * em1 * dif * dif * dif);
                }
            }
            break;
        }
        default:
            raise(errc::unsupported, "no closed-form gap inverse derivative for " + f.name());
    }
    raise(errc::internal, "unreachable");
}

Scalar eval(const ConvexFunctionSpec& f, const Scalar& x, unsigned prec) {
    return Scalar(eval(f, x.to_real(prec)));
}
Scalar deriv(const ConvexFunctionSpec& f, unsigned j, const Scalar& x, unsigned prec) {
    return Scalar(deriv(f, j, x.to_real(prec)));
}
Scalar gap_eval(const ConvexFunctionSpec& f, const Scalar& d, const Scalar& x, unsigned prec) {
    return Scalar(gap_eval(f, d.to_real(prec), x.to_real(prec)));
}
Scalar gap_inverse(const ConvexFunctionSpec& f, const Scalar& d, const Scalar& y, unsigned prec) {
    return Scalar(gap_inverse(f, d.to_real(prec), y.to_real(prec)));
}
Scalar gap_inverse_deriv(const ConvexFunctionSpec& f, const Scalar& d, unsigned j,
                         const Scalar& y, unsigned prec) {
    return Scalar(gap_inverse_deriv(f, d.to_real(prec), j, y.to_real(prec)));
}

FiniteSet image_set(const ConvexFunctionSpec& f, const FiniteSet& a, unsigned prec) {
    std::vector<Real> vals;
    vals.reserve(a.size());
    for (const Real& x : a.as_reals(prec)) vals.push_back(eval(f, x));
    for (std::size_t i = 1; i < vals.size(); ++i)
        if (!(vals[i - 1] < vals[i]))
            raise(errc::ambiguous_separation,
                  "image of distinct points collides at working precision");
    return FiniteSet::from_sorted_reals(std::move(vals));
}

// ---------------------------------------------------------------------------
// certification
// ---------------------------------------------------------------------------

namespace {

/// First three derivatives of f_d^-1 at y: registered closed forms where
/// available, otherwise the inverse-function rule with a single inversion.
std::array<Real, 3> inv_derivs_at(const ConvexFunctionSpec& f, const Real& d, const Real& y) {
    if (f.kind() == FnKind::log_e || f.kind() == FnKind::log_shift)
        return {gap_inverse_deriv(f, d, 1, y), gap_inverse_deriv(f, d, 2, y),
                gap_inverse_deriv(f, d, 3, y)};
    Real x = gap_inverse(f, d, y);
    unsigned p = y.prec();
    Real p1 = fd_deriv(f, d, 1, x);
    if (p1.is_zero()) raise(errc::certification_failure, "f_d has vanishing derivative");
    Real p2 = fd_deriv(f, d, 2, x);
    Real p3 = fd_deriv(f, d, 3, x);
    return {real_from_int(1, p) / p1, -p2 / (p1 * p1 * p1),
            (real_from_int(3, p) * p2 * p2 - p1 * p3) / pow_si(p1, 5)};
}

Real inv_deriv_any(const ConvexFunctionSpec& f, const Real& d, unsigned j, const Real& y) {
    return inv_derivs_at(f, d, y)[j - 1];
}

struct ZeroWindow {
    Real lo, hi;
};

} // namespace

ConvexityCertificate certify(const ConvexFunctionSpec& f, const Scalar& d,
                             const Interval& target, unsigned max_zeros, unsigned prec) {
    Real dr = d.to_real(prec);
    if (dr.sgn() <= 0) raise(errc::invalid_argument, "gap requires d > 0");
    Interval j_range = f.gap_range(dr);

    ConvexityCertificate cert;
    cert.function_id = f.name();
    cert.interval = target;
    cert.order = 3;

    if (f.kind() == FnKind::log_e) {
        // All three closed-form derivatives are nonvanishing on (0, inf).
        if (target.lo && !j_range.contains(*target.lo) && target.lo->sgn() <= 0)
            raise(errc::range_violation, "target not inside J");
        cert.method = "closed-form";
        cert.zero_count = 0;
        cert.subintervals = {target};
        return cert;
    }

    if (!target.bounded())
        raise(errc::invalid_argument, "interval-subdivision certification needs a bounded target");
    Real lo = target.lo->to_real(prec);
    Real hi = target.hi->to_real(prec);
    if (!(lo < hi)) raise(errc::invalid_argument, "empty certification target");
    if (!j_range.contains(*target.lo) || !j_range.contains(*target.hi))
        raise(errc::range_violation, "target not inside J");

    cert.method = "interval-subdivision";

    const int kSamples = 257;
    Real width = hi - lo;
    Real h = width / real_from_int(kSamples, prec);
    Real half = ldexp2(real_from_int(1, prec), -1);

    std::vector<ZeroWindow> windows;
    unsigned zero_total = 0;

    // one inversion per sample point covers all three derivatives
    std::vector<Real> pts;
    pts.reserve(kSamples);
    std::vector<std::array<int, 3>> all_signs(kSamples);
    for (int i = 0; i < kSamples; ++i) {
        Real y = lo + h * (real_from_int(i, prec) + half);
        std::array<Real, 3> ds = inv_derivs_at(f, dr, y);
        all_signs[static_cast<std::size_t>(i)] = {ds[0].sgn(), ds[1].sgn(), ds[2].sgn()};
        pts.push_back(std::move(y));
    }

    for (unsigned j = 1; j <= 3; ++j) {
        std::vector<int> signs(kSamples);
        for (int i = 0; i < kSamples; ++i)
            signs[static_cast<std::size_t>(i)] = all_signs[static_cast<std::size_t>(i)][j - 1];

        int exact_zeros = 0;
        for (int s : signs) exact_zeros += s == 0;
        if (exact_zeros > kSamples / 8)
            raise(errc::certification_failure,
                  "derivative " + std::to_string(j) + " of f_d^-1 is identically zero on target");

        for (int i = 0; i < kSamples; ++i) {
            if (signs[static_cast<std::size_t>(i)] == 0) {
                Real w = ldexp2(h, -16);
                windows.push_back({pts[static_cast<std::size_t>(i)] - w,
                                   pts[static_cast<std::size_t>(i)] + w});
                ++zero_total;
            } else if (i + 1 < kSamples && signs[static_cast<std::size_t>(i + 1)] != 0 &&
                       signs[static_cast<std::size_t>(i)] !=
                           signs[static_cast<std::size_t>(i + 1)]) {
                Real a = pts[static_cast<std::size_t>(i)];
                Real b = pts[static_cast<std::size_t>(i + 1)];
                int sa = signs[static_cast<std::size_t>(i)];
                for (int it = 0; it < 48; ++it) {
                    Real mid = (a + b) * half;
                    int sm = inv_deriv_any(f, dr, j, mid).sgn();
                    if (sm == 0) {
                        a = mid - ldexp2(b - a, -8);
                        b = mid + ldexp2(b - a, -8);
                        break;
                    }
                    if (sm == sa)
                        a = mid;
                    else
                        b = mid;
                }
                windows.push_back({a, b});
                ++zero_total;
            }
        }
        if (zero_total > max_zeros)
            raise(errc::certification_failure, "zero count exceeds requested bound");
    }

    std::sort(windows.begin(), windows.end(),
              [](const ZeroWindow& a, const ZeroWindow& b) { return a.lo < b.lo; });
    std::vector<ZeroWindow> merged;
    for (ZeroWindow& w : windows) {
        if (!merged.empty() && !(w.lo > merged.back().hi))
            merged.back().hi = max(merged.back().hi, w.hi);
        else
            merged.push_back(w);
    }

    cert.zero_count = zero_total;

    Real cursor = lo;
    auto emit_piece = [&](const Real& a, const Real& b) {
        if (!(a < b)) return;
        // confirm sign constancy of all three derivatives on the piece
        const int kVerify = 64;
        Real step = (b - a) / real_from_int(kVerify, prec);
        std::array<int, 3> s0{0, 0, 0};
        for (int i = 0; i < kVerify; ++i) {
            Real y = a + step * (real_from_int(i, prec) + half);
            std::array<Real, 3> ds = inv_derivs_at(f, dr, y);
            for (unsigned j = 0; j < 3; ++j) {
                int s = ds[j].sgn();
                if (s == 0) raise(errc::certification_failure, "zero inside certified piece");
                if (s0[j] == 0) s0[j] = s;
                if (s != s0[j])
                    raise(errc::certification_failure, "sign change inside certified piece");
            }
        }
        Interval piece;
        piece.lo = Scalar(a);
        piece.hi = Scalar(b);
        piece.lo_open = false;
        piece.hi_open = false;
        cert.subintervals.push_back(piece);
    };
    for (const ZeroWindow& w : merged) {
        emit_piece(cursor, w.lo);
        cursor = w.hi;
    }
    emit_piece(cursor, hi);
    if (cert.subintervals.empty())
        raise(errc::certification_failure, "no sign-constant piece survived");
    return cert;
}

namespace {

enum class ZeroInfo { never, point, identically_zero };

struct DerivZeros {
    ZeroInfo info;
    std::vector<Real> points;
};

DerivZeros deriv_zeros(const ConvexFunctionSpec& f, unsigned j, unsigned prec) {
    switch (f.kind()) {
        case FnKind::log_e:
        case FnKind::exp_e: return {ZeroInfo::never, {}};
        case FnKind::cube:
            if (j <= 2) return {ZeroInfo::point, {Real(prec)}}; // x = 0
            if (j == 3) return {ZeroInfo::never, {}};
            return {ZeroInfo::identically_zero, {}};
        case FnKind::square:
            if (j == 1) return {ZeroInfo::point, {Real(prec)}};
            if (j == 2) return {ZeroInfo::never, {}};
            return {ZeroInfo::identically_zero, {}};
        case FnKind::log_shift: {
            Real lam(f.lambda(), prec);
            if (j <= 2) return {ZeroInfo::never, {}};
            if (j == 3) return {ZeroInfo::point, {log(lam)}};
            // f'''' zeros at u = lambda (2 +- sqrt 3)
            Real three = real_from_int(3, prec);
            Real root(prec);
            mpfr_sqrt(root.raw(), three.raw(), MPFR_RNDN);
            Real two = real_from_int(2, prec);
            return {ZeroInfo::point, {log(lam * (two - root)), log(lam * (two + root))}};
        }
    }
    raise(errc::internal, "unreachable");
}

} // namespace

ConvexityCertificate certify_k_convex(const ConvexFunctionSpec& f, const Interval& I,
                                      unsigned k, unsigned prec) {
    if (k > 3) raise(errc::invalid_argument, "k-convexity supported for k <= 3");
    if (f.kind() == FnKind::log_e && I.lo && I.lo->sgn() < 0)
        raise(errc::domain_violation, "ln is not defined left of 0");

    for (unsigned j = 1; j <= k + 1; ++j) {
        DerivZeros z = deriv_zeros(f, j, prec);
        if (z.info == ZeroInfo::identically_zero)
            raise(errc::certification_failure,
                  "derivative " + std::to_string(j) + " of " + f.name() + " is identically zero");
        for (const Real& pt : z.points)
            if (I.contains(Scalar(pt)))
                raise(errc::certification_failure, "derivative " + std::to_string(j) + " of " +
                                                       f.name() + " vanishes inside the interval");
    }

    // Sampling confirmation on a bounded window of I.
    Real lo = I.lo ? I.lo->to_real(prec) : real_from_int(-16, prec);
    Real hi = I.hi ? I.hi->to_real(prec) : max(lo + real_from_int(1, prec), real_from_int(16, prec));
    if (f.kind() == FnKind::log_e && lo.sgn() <= 0) lo = ldexp2(max(hi, real_from_int(1, prec)), -20);
    if (lo < hi) {
        const int kVerify = 33;
        Real half = ldexp2(real_from_int(1, prec), -1);
        Real step = (hi - lo) / real_from_int(kVerify, prec);
        for (unsigned j = 1; j <= k + 1; ++j) {
            int s0 = 0;
            for (int i = 0; i < kVerify; ++i) {
                Real x = lo + step * (real_from_int(i, prec) + half);
                check_smooth(f, x);
                int s = deriv_impl(f, j, x).sgn();
                if (s == 0 || (s0 != 0 && s != s0))
                    raise(errc::certification_failure, "sampled derivative vanishes on interval");
                s0 = s;
            }
        }
    }

    ConvexityCertificate cert;
    cert.function_id = f.name();
    cert.interval = I;
    cert.order = k;
    cert.method = "closed-form";
    cert.zero_count = 0;
    cert.subintervals = {I};
    return cert;
}

} // namespace growthlab
