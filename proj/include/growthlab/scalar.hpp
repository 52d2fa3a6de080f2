#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include <gmpxx.h>
#include <mpfr.h>

#include "growthlab/error.hpp"

namespace growthlab {

/// Exact rational, kept in lowest terms by GMP.
using Rat = mpq_class;

constexpr unsigned kDefaultPrecision = 128;
constexpr unsigned kMinPrecision = 64;

/// Guard bits separating rounding artifacts from genuine distinctness in
/// derived real sets: values closer than scale * 2^-(prec-kBandGuardBits)
/// are treated as one value.
constexpr unsigned kBandGuardBits = 12;

Rat parse_rat(const std::string& text); // "p/q", "-3", or decimal "1.25"
std::string rat_to_string(const Rat& q);
bool rat_fits_int64(const Rat& q, std::int64_t& out);

/// Arbitrary-precision binary real (MPFR), radius-free: a Real is exactly the
/// stored floating-point value at its precision. Comparisons are on stored
/// digits. Binary ops round to nearest at max(precision of operands).
class Real {
public:
    Real() { mpfr_init2(v_, kDefaultPrecision); mpfr_set_zero(v_, 1); }
    explicit Real(unsigned prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
    Real(const Rat& q, unsigned prec) {
        mpfr_init2(v_, prec);
        mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN);
    }
    Real(long v, unsigned prec) { mpfr_init2(v_, prec); mpfr_set_si(v_, v, MPFR_RNDN); }

    Real(const Real& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    Real(Real&& o) noexcept {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_swap(v_, o.v_);
    }
    Real& operator=(const Real& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    Real& operator=(Real&& o) noexcept {
        if (this != &o) mpfr_swap(v_, o.v_);
        return *this;
    }
    ~Real() { mpfr_clear(v_); }

    static Real from_string(const std::string& s, unsigned prec);
    static Real from_double(double d, unsigned prec) {
        Real r(prec);
        mpfr_set_d(r.v_, d, MPFR_RNDN);
        return r;
    }

    unsigned prec() const { return static_cast<unsigned>(mpfr_get_prec(v_)); }
    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

    int sgn() const { return mpfr_sgn(v_); }
    bool is_zero() const { return mpfr_zero_p(v_); }
    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

    /// Decimal string with enough digits that re-reading at the same
    /// precision recovers the value bit for bit.
    std::string to_string() const;

    friend int cmp(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_); }
    friend bool operator<(const Real& a, const Real& b) { return cmp(a, b) < 0; }
    friend bool operator>(const Real& a, const Real& b) { return cmp(a, b) > 0; }
    friend bool operator<=(const Real& a, const Real& b) { return cmp(a, b) <= 0; }
    friend bool operator>=(const Real& a, const Real& b) { return cmp(a, b) >= 0; }
    friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_); }
    friend bool operator!=(const Real& a, const Real& b) { return !(a == b); }

    friend Real operator+(const Real& a, const Real& b) {
        Real r(std::max(a.prec(), b.prec()));
        mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend Real operator-(const Real& a, const Real& b) {
        Real r(std::max(a.prec(), b.prec()));
        mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend Real operator*(const Real& a, const Real& b) {
        Real r(std::max(a.prec(), b.prec()));
        mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend Real operator/(const Real& a, const Real& b) {
        if (b.is_zero()) raise(errc::zero_divisor, "real division by zero");
        Real r(std::max(a.prec(), b.prec()));
        mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend Real operator-(const Real& a) {
        Real r(a.prec());
        mpfr_neg(r.v_, a.v_, MPFR_RNDN);
        return r;
    }

    friend Real abs(const Real& a) {
        Real r(a.prec());
        mpfr_abs(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend Real ldexp2(const Real& a, long e) {
        Real r(a.prec());
        mpfr_mul_2si(r.v_, a.v_, e, MPFR_RNDN);
        return r;
    }
    friend Real log(const Real& a) {
        Real r(a.prec());
        mpfr_log(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend Real log2(const Real& a) {
        Real r(a.prec());
        mpfr_log2(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend Real exp(const Real& a) {
        Real r(a.prec());
        mpfr_exp(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend Real pow(const Real& a, const Real& b) {
        Real r(std::max(a.prec(), b.prec()));
        mpfr_pow(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend Real pow_si(const Real& a, long e) {
        Real r(a.prec());
        mpfr_pow_si(r.v_, a.v_, e, MPFR_RNDN);
        return r;
    }
    friend Real max(const Real& a, const Real& b) { return a < b ? b : a; }
    friend Real min(const Real& a, const Real& b) { return a < b ? a : b; }

private:
    mpfr_t v_;
};

Real real_from_int(std::int64_t v, unsigned prec);

enum class ScalarMode { exact, real };

/// A number in one of two modes: exact rational or arbitrary-precision real.
/// Mixed-mode arithmetic promotes the exact operand to the real operand's
/// precision.
class Scalar {
public:
    Scalar() : v_(Rat(0)) {}
    Scalar(const Rat& q) : v_(q) {}
    Scalar(Rat&& q) : v_(std::move(q)) {}
    Scalar(const Real& r) : v_(r) {}
    Scalar(Real&& r) : v_(std::move(r)) {}
    explicit Scalar(std::int64_t v) : v_(Rat(static_cast<long>(v))) {}

    ScalarMode mode() const {
        return std::holds_alternative<Rat>(v_) ? ScalarMode::exact : ScalarMode::real;
    }
    bool exact() const { return mode() == ScalarMode::exact; }

    const Rat& rat() const { return std::get<Rat>(v_); }
    const Real& real() const { return std::get<Real>(v_); }

    Real to_real(unsigned prec) const {
        return exact() ? Real(rat(), prec) : real();
    }

    int sgn() const { return exact() ? ::sgn(rat()) : real().sgn(); }
    bool is_zero() const { return sgn() == 0; }

    std::string to_string() const; // "p/q" (exact) or decimal@prec (real)

    friend Scalar operator+(const Scalar& a, const Scalar& b) { return binop(a, b, Op::add); }
    friend Scalar operator-(const Scalar& a, const Scalar& b) { return binop(a, b, Op::sub); }
    friend Scalar operator*(const Scalar& a, const Scalar& b) { return binop(a, b, Op::mul); }
    friend Scalar operator/(const Scalar& a, const Scalar& b) { return binop(a, b, Op::div); }
    friend Scalar operator-(const Scalar& a) {
        return a.exact() ? Scalar(Rat(-a.rat())) : Scalar(-a.real());
    }

    friend int cmp(const Scalar& a, const Scalar& b);
    friend bool operator<(const Scalar& a, const Scalar& b) { return cmp(a, b) < 0; }
    friend bool operator>(const Scalar& a, const Scalar& b) { return cmp(a, b) > 0; }
    friend bool operator<=(const Scalar& a, const Scalar& b) { return cmp(a, b) <= 0; }
    friend bool operator>=(const Scalar& a, const Scalar& b) { return cmp(a, b) >= 0; }
    friend bool operator==(const Scalar& a, const Scalar& b) { return cmp(a, b) == 0; }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return cmp(a, b) != 0; }

private:
    enum class Op { add, sub, mul, div };
    static Scalar binop(const Scalar& a, const Scalar& b, Op op);

    std::variant<Rat, Real> v_;
};

} // namespace growthlab
