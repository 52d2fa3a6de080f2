#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "growthlab/finite_set.hpp"

namespace testutil {

inline growthlab::Rat rq(long num, long den) {
    growthlab::Rat q(num, den);
    q.canonicalize();
    return q;
}

inline growthlab::FiniteSet iset(std::initializer_list<std::int64_t> v) {
    std::vector<growthlab::Scalar> s;
    for (std::int64_t x : v) s.emplace_back(growthlab::Rat(static_cast<long>(x)));
    return growthlab::make_set(s);
}

inline growthlab::FiniteSet qset(std::initializer_list<const char*> v) {
    std::vector<growthlab::Scalar> s;
    for (const char* x : v) s.emplace_back(growthlab::parse_rat(x));
    return growthlab::make_set(s);
}

inline std::vector<std::int64_t> as_ints(const growthlab::FiniteSet& s) {
    REQUIRE(s.has_int_rep());
    return s.ints();
}

inline bool rel_close(const growthlab::Real& a, const growthlab::Real& b, long log2_tol) {
    using growthlab::Real;
    Real diff = abs(a - b);
    Real scale = max(abs(a), abs(b));
    if (scale.is_zero()) return diff.is_zero();
    return !(diff > ldexp2(scale, log2_tol));
}

} // namespace testutil
