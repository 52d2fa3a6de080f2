#pragma once

#include <optional>
#include <string>
#include <vector>

#include "growthlab/finite_set.hpp"
#include "growthlab/scalar.hpp"

namespace growthlab {

/// Possibly unbounded open/closed interval.
struct Interval {
    std::optional<Scalar> lo; // nullopt = -inf
    std::optional<Scalar> hi; // nullopt = +inf
    bool lo_open = true;
    bool hi_open = true;

    static Interval all() { return {}; }
    static Interval greater_than(Scalar a) { return {std::move(a), std::nullopt, true, true}; }
    static Interval closed(Scalar a, Scalar b) { return {std::move(a), std::move(b), false, false}; }
    static Interval open(Scalar a, Scalar b) { return {std::move(a), std::move(b), true, true}; }

    bool contains(const Scalar& x) const;
    bool bounded() const { return lo.has_value() && hi.has_value(); }
    std::string to_string() const;
};

enum class FnKind { log_e, exp_e, cube, log_shift, square };

/// Registered strictly convex/concave function with closed-form derivatives
/// to order 4. square is registered only as the negative certification case.
class ConvexFunctionSpec {
public:
    static ConvexFunctionSpec log_e();              // ln x on (0, inf), concave
    static ConvexFunctionSpec exp_e();              // e^x on R, convex
    static ConvexFunctionSpec cube();               // x^3 on (0, inf), convex
    static ConvexFunctionSpec log_shift(Rat lambda); // ln(e^x + lambda) on R, convex
    static ConvexFunctionSpec square();             // x^2 on (0, inf), convex

    /// CLI syntax: ln | exp | cube | logshift:lambda=<rational> | square
    static ConvexFunctionSpec parse(const std::string& spec);

    FnKind kind() const { return kind_; }
    const Rat& lambda() const { return lambda_; }
    const Interval& domain() const { return domain_; }
    std::string name() const;

    bool convex() const;          // strictly convex (else strictly concave)
    bool gap_increasing() const { return convex(); } // f_d monotone direction
    Interval gap_range(const Real& d) const;          // J, the range of f_d

private:
    ConvexFunctionSpec(FnKind k, Rat lambda, Interval dom)
        : kind_(k), lambda_(std::move(lambda)), domain_(std::move(dom)) {}
    FnKind kind_;
    Rat lambda_;
    Interval domain_;
};

Real eval(const ConvexFunctionSpec& f, const Real& x);
Real deriv(const ConvexFunctionSpec& f, unsigned j, const Real& x); // j <= 4
Real gap_eval(const ConvexFunctionSpec& f, const Real& d, const Real& x); // f_d(x)
Real gap_inverse(const ConvexFunctionSpec& f, const Real& d, const Real& y);
Real gap_inverse_deriv(const ConvexFunctionSpec& f, const Real& d, unsigned j, const Real& y);

// Scalar wrappers at an explicit working precision.
Scalar eval(const ConvexFunctionSpec& f, const Scalar& x, unsigned prec);
Scalar deriv(const ConvexFunctionSpec& f, unsigned j, const Scalar& x, unsigned prec);
Scalar gap_eval(const ConvexFunctionSpec& f, const Scalar& d, const Scalar& x, unsigned prec);
Scalar gap_inverse(const ConvexFunctionSpec& f, const Scalar& d, const Scalar& y, unsigned prec);
Scalar gap_inverse_deriv(const ConvexFunctionSpec& f, const Scalar& d, unsigned j,
                         const Scalar& y, unsigned prec);

/// f(A) as a real-mode FiniteSet at the given precision. Requires A inside
/// the domain; f is strictly increasing for every registered kind on its
/// domain, so the image order matches the set order.
FiniteSet image_set(const ConvexFunctionSpec& f, const FiniteSet& a, unsigned prec);

struct ConvexityCertificate {
    std::string function_id;
    Interval interval;
    unsigned order = 3;                 // derivatives certified: 1..order
    std::string method;                 // "closed-form" | "interval-subdivision"
    unsigned zero_count = 0;            // m
    std::vector<Interval> subintervals; // pairwise disjoint, sign-constant pieces
};

/// Certifies that the first three derivatives of f_d^-1 have at most
/// max_zeros zeros on `target` (a subinterval of J) and produces the
/// sign-constant pieces. A derivative that is identically zero cannot be
/// certified (unbounded zero set) and raises CertificationFailure.
ConvexityCertificate certify(const ConvexFunctionSpec& f, const Scalar& d,
                             const Interval& target, unsigned max_zeros, unsigned prec);

/// Certifies f^(1), ..., f^(k+1) nonvanishing on I (k-convexity), k <= 3.
ConvexityCertificate certify_k_convex(const ConvexFunctionSpec& f, const Interval& I,
                                      unsigned k, unsigned prec);

} // namespace growthlab
