#pragma once

#include <stdexcept>
#include <string>

namespace growthlab {

enum class errc {
    empty_input,
    ambiguous_separation,
    budget_exceeded,
    zero_divisor,
    domain_violation,
    range_violation,
    no_convergence,
    unsupported,
    certification_failure,
    not_k_convex,
    too_small,
    degenerate_split,
    bucket_too_small,
    inclusion_violation,
    certificate_mismatch,
    zero_shift,
    space_too_large,
    invalid_argument,
    parse_error,
    internal,
};

/// Library-wide exception carrying an error code; the CLI maps codes to exit
/// codes (2 usage, 3 budget, 4 domain/precondition).
class error : public std::runtime_error {
public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) { throw error(code, what); }

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::empty_input: return "EmptyInput";
        case errc::ambiguous_separation: return "AmbiguousSeparation";
        case errc::budget_exceeded: return "BudgetExceeded";
        case errc::zero_divisor: return "ZeroDivisor";
        case errc::domain_violation: return "DomainViolation";
        case errc::range_violation: return "RangeViolation";
        case errc::no_convergence: return "NoConvergence";
        case errc::unsupported: return "Unsupported";
        case errc::certification_failure: return "CertificationFailure";
        case errc::not_k_convex: return "NotKConvex";
        case errc::too_small: return "TooSmall";
        case errc::degenerate_split: return "DegenerateSplit";
        case errc::bucket_too_small: return "BucketTooSmall";
        case errc::inclusion_violation: return "InclusionViolation";
        case errc::certificate_mismatch: return "CertificateMismatch";
        case errc::zero_shift: return "ZeroShift";
        case errc::space_too_large: return "SpaceTooLarge";
        case errc::invalid_argument: return "InvalidArgument";
        case errc::parse_error: return "ParseError";
        case errc::internal: return "InternalError";
    }
    return "UnknownError";
}

} // namespace growthlab
