#include "growthlab/scalar.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

namespace growthlab {

Rat parse_rat(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) raise(errc::parse_error, "empty scalar");

    auto slash = s.find('/');
    if (slash != std::string::npos) {
        mpq_class q;
        if (mpq_set_str(q.get_mpq_t(), s.c_str(), 10) != 0 || sgn(q.get_den()) == 0)
            raise(errc::parse_error, "bad rational: " + text);
        if (sgn(q.get_den()) < 0) {
            // mpq_set_str accepts negative denominators; normalize sign first.
            mpq_neg(q.get_mpq_t(), q.get_mpq_t());
            mpz_neg(mpq_denref(q.get_mpq_t()), mpq_denref(q.get_mpq_t()));
        }
        q.canonicalize();
        return q;
    }

    auto dot = s.find('.');
    auto epos = s.find_first_of("eE");
    long exp10 = 0;
    if (epos != std::string::npos) {
        char* end = nullptr;
        exp10 = std::strtol(s.c_str() + epos + 1, &end, 10);
        if (end == nullptr || *end != '\0') raise(errc::parse_error, "bad exponent: " + text);
        s = s.substr(0, epos);
        dot = s.find('.');
    }

    std::string digits = s;
    long frac_len = 0;
    if (dot != std::string::npos) {
        frac_len = static_cast<long>(s.size() - dot - 1);
        digits = s.substr(0, dot) + s.substr(dot + 1);
    }
    if (digits.empty() || digits == "-" || digits == "+")
        raise(errc::parse_error, "bad scalar: " + text);
    for (std::size_t i = 0; i < digits.size(); ++i) {
        char c = digits[i];
        if (!(std::isdigit(static_cast<unsigned char>(c)) || (i == 0 && (c == '-' || c == '+'))))
            raise(errc::parse_error, "bad scalar: " + text);
    }

    mpz_class num(digits, 10);
    mpz_class den(1);
    long e = exp10 - frac_len;
    if (e > 0) {
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(e));
        num *= p;
    } else if (e < 0) {
        mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(-e));
    }
    Rat q(num, den);
    q.canonicalize();
    return q;
}

std::string rat_to_string(const Rat& q) {
    std::ostringstream os;
    if (q.get_den() == 1)
        os << q.get_num();
    else
        os << q.get_num() << "/" << q.get_den();
    return os.str();
}

bool rat_fits_int64(const Rat& q, std::int64_t& out) {
    if (q.get_den() != 1) return false;
    const mpz_class& n = q.get_num();
    if (!n.fits_slong_p()) return false;
    long v = n.get_si();
    out = static_cast<std::int64_t>(v);
    return true;
}

Real Real::from_string(const std::string& s, unsigned prec) {
    Real r(prec);
    if (mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN) != 0 && mpfr_nan_p(r.v_))
        raise(errc::parse_error, "bad real: " + s);
    return r;
}

std::string Real::to_string() const {
    if (mpfr_zero_p(v_)) return "0";
    mpfr_exp_t e = 0;
    // n=0 digits: enough for exact round trip at this precision.
    char* raw = mpfr_get_str(nullptr, &e, 10, 0, v_, MPFR_RNDN);
    std::string digits(raw);
    mpfr_free_str(raw);

    bool neg = !digits.empty() && digits[0] == '-';
    std::string mant = neg ? digits.substr(1) : digits;
    // Strip redundant trailing zeros (keeps round trips while shortening APs etc.)
    std::size_t last = mant.find_last_not_of('0');
    if (last != std::string::npos && last + 1 < mant.size() && last >= 1)
        mant = mant.substr(0, last + 1);

    std::ostringstream os;
    if (neg) os << '-';
    os << mant[0];
    if (mant.size() > 1) os << '.' << mant.substr(1);
    os << 'e' << (e - 1);
    return os.str();
}

Real real_from_int(std::int64_t v, unsigned prec) {
    Real r(prec);
    mpfr_set_sj(r.raw(), v, MPFR_RNDN);
    return r;
}

std::string Scalar::to_string() const {
    if (exact()) return rat_to_string(rat());
    return real().to_string() + "@" + std::to_string(real().prec());
}

int cmp(const Scalar& a, const Scalar& b) {
    if (a.exact() && b.exact()) return ::cmp(a.rat(), b.rat());
    if (!a.exact() && !b.exact()) return cmp(a.real(), b.real());
    if (a.exact()) return -mpfr_cmp_q(b.real().raw(), a.rat().get_mpq_t());
    return mpfr_cmp_q(a.real().raw(), b.rat().get_mpq_t());
}

Scalar Scalar::binop(const Scalar& a, const Scalar& b, Op op) {
    if (a.exact() && b.exact()) {
        const Rat& x = a.rat();
        const Rat& y = b.rat();
        switch (op) {
            case Op::add: return Scalar(Rat(x + y));
            case Op::sub: return Scalar(Rat(x - y));
            case Op::mul: return Scalar(Rat(x * y));
            case Op::div:
                if (::sgn(y) == 0) raise(errc::zero_divisor, "rational division by zero");
                return Scalar(Rat(x / y));
        }
    }
    unsigned prec = !a.exact() ? a.real().prec() : b.real().prec();
    if (!a.exact() && !b.exact()) prec = std::max(a.real().prec(), b.real().prec());
    Real x = a.to_real(prec);
    Real y = b.to_real(prec);
    switch (op) {
        case Op::add: return Scalar(x + y);
        case Op::sub: return Scalar(x - y);
        case Op::mul: return Scalar(x * y);
        case Op::div: return Scalar(x / y);
    }
    raise(errc::internal, "unreachable");
}

} // namespace growthlab
