#include "growthlab/finite_set.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "growthlab/rng.hpp"

namespace growthlab {

namespace {

void require_strictly_increasing_ints(const std::vector<std::int64_t>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i - 1] >= v[i]) raise(errc::internal, "int set not strictly increasing");
}

} // namespace

FiniteSet FiniteSet::from_sorted_ints(std::vector<std::int64_t> v) {
    require_strictly_increasing_ints(v);
    FiniteSet s;
    s.mode_ = SetMode::exact;
    s.int_rep_ = true;
    s.ints_ = std::move(v);
    return s;
}

FiniteSet FiniteSet::from_sorted_rats(std::vector<Rat> v) {
    // Demote to the int64 representation when possible.
    std::vector<std::int64_t> ints;
    ints.reserve(v.size());
    bool all_int = true;
    for (const Rat& q : v) {
        std::int64_t x;
        if (!rat_fits_int64(q, x)) { all_int = false; break; }
        ints.push_back(x);
    }
    if (all_int) return from_sorted_ints(std::move(ints));

    for (std::size_t i = 1; i < v.size(); ++i)
        if (::cmp(v[i - 1], v[i]) >= 0) raise(errc::internal, "rat set not strictly increasing");
    FiniteSet s;
    s.mode_ = SetMode::exact;
    s.int_rep_ = false;
    s.rats_ = std::move(v);
    return s;
}

FiniteSet FiniteSet::from_sorted_reals(std::vector<Real> v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i - 1] < v[i])) raise(errc::internal, "real set not strictly increasing");
    FiniteSet s;
    s.mode_ = SetMode::real;
    s.int_rep_ = false;
    s.reals_ = std::move(v);
    return s;
}

Scalar FiniteSet::at(std::size_t i) const {
    if (int_rep_) return Scalar(Rat(static_cast<long>(ints_[i])));
    if (mode_ == SetMode::exact) return Scalar(rats_[i]);
    return Scalar(reals_[i]);
}

unsigned FiniteSet::precision() const {
    if (mode_ != SetMode::real || reals_.empty()) return kDefaultPrecision;
    unsigned p = reals_.front().prec();
    for (const Real& r : reals_) p = std::min(p, r.prec());
    return p;
}

Real FiniteSet::scale_hint() const {
    unsigned p = precision();
    if (empty()) return Real(p);
    if (mode_ == SetMode::real) return max(abs(reals_.front()), abs(reals_.back()));
    Scalar lo = front();
    Scalar hi = back();
    Rat m = ::cmp(abs(lo.rat()), abs(hi.rat())) > 0 ? abs(lo.rat()) : abs(hi.rat());
    return Real(m, p);
}

Scalar FiniteSet::min_gap() const {
    if (size() < 2) raise(errc::invalid_argument, "min_gap needs at least two elements");
    Scalar best = at(1) - at(0);
    for (std::size_t i = 2; i < size(); ++i) {
        Scalar g = at(i) - at(i - 1);
        if (g < best) best = g;
    }
    return best;
}

std::vector<Rat> FiniteSet::as_rats() const {
    if (mode_ != SetMode::exact) raise(errc::invalid_argument, "as_rats on real set");
    if (!int_rep_) return rats_;
    std::vector<Rat> out;
    out.reserve(ints_.size());
    for (std::int64_t v : ints_) out.emplace_back(static_cast<long>(v));
    return out;
}

std::vector<Real> FiniteSet::as_reals(unsigned prec) const {
    std::vector<Real> out;
    out.reserve(size());
    if (mode_ == SetMode::real) {
        for (const Real& r : reals_) out.push_back(r);
        return out;
    }
    if (int_rep_) {
        for (std::int64_t v : ints_) out.push_back(real_from_int(v, prec));
    } else {
        for (const Rat& q : rats_) out.emplace_back(q, prec);
    }
    return out;
}

bool FiniteSet::contains(const Scalar& x) const {
    std::size_t lo = 0, hi = size();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        int c = cmp(at(mid), x);
        if (c == 0) return true;
        if (c < 0) lo = mid + 1; else hi = mid;
    }
    return false;
}

bool operator==(const FiniteSet& a, const FiniteSet& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.at(i) != b.at(i)) return false;
    return true;
}

FiniteSet make_set_exact(std::vector<Rat> values) {
    if (values.empty()) raise(errc::empty_input, "empty set");
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return FiniteSet::from_sorted_rats(std::move(values));
}

FiniteSet make_set_real(std::vector<Real> values, std::optional<Real> tolerance) {
    if (values.empty()) raise(errc::empty_input, "empty set");
    std::sort(values.begin(), values.end(),
              [](const Real& a, const Real& b) { return a < b; });
    values.erase(std::unique(values.begin(), values.end(),
                             [](const Real& a, const Real& b) { return a == b; }),
                 values.end());

    unsigned prec = values.front().prec();
    for (const Real& r : values) prec = std::min(prec, r.prec());
    Real tol(prec);
    if (tolerance) {
        tol = *tolerance;
        if (tol.sgn() < 0) raise(errc::invalid_argument, "tolerance must be >= 0");
    } else {
        Real scale = max(abs(values.front()), abs(values.back()));
        tol = ldexp2(scale, -static_cast<long>(prec / 2));
    }
    for (std::size_t i = 1; i < values.size(); ++i) {
        Real gap = values[i] - values[i - 1];
        if (!(gap > tol)) {
            raise(errc::ambiguous_separation,
                  "distinct values closer than tolerance near index " + std::to_string(i));
        }
    }
    return FiniteSet::from_sorted_reals(std::move(values));
}

FiniteSet make_set(const std::vector<Scalar>& values, std::optional<Scalar> tolerance) {
    if (values.empty()) raise(errc::empty_input, "empty set");
    bool any_real = false;
    for (const Scalar& s : values) any_real |= !s.exact();

    if (!any_real) {
        if (tolerance && !tolerance->is_zero())
            raise(errc::invalid_argument, "exact mode requires tolerance 0");
        std::vector<Rat> v;
        v.reserve(values.size());
        for (const Scalar& s : values) v.push_back(s.rat());
        return make_set_exact(std::move(v));
    }

    unsigned prec = kDefaultPrecision;
    for (const Scalar& s : values)
        if (!s.exact()) prec = std::min(prec, s.real().prec());
    std::vector<Real> v;
    v.reserve(values.size());
    for (const Scalar& s : values) v.push_back(s.to_real(prec));
    std::optional<Real> tol;
    if (tolerance) tol = tolerance->to_real(prec);
    return make_set_real(std::move(v), tol);
}

FiniteSet read_set(std::istream& in) {
    std::vector<Scalar> values;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        if (line[start] == '#') continue;
        std::size_t end = line.find_last_not_of(" \t\r");
        values.emplace_back(parse_rat(line.substr(start, end - start + 1)));
    }
    return make_set(values);
}

FiniteSet read_set_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(errc::parse_error, "cannot open set file: " + path);
    return read_set(in);
}

void write_set(std::ostream& out, const FiniteSet& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        Scalar v = s.at(i);
        if (v.exact())
            out << rat_to_string(v.rat()) << "\n";
        else
            out << v.real().to_string() << "\n";
    }
}

void write_set_file(const std::string& path, const FiniteSet& s) {
    std::ofstream out(path);
    if (!out) raise(errc::parse_error, "cannot open output file: " + path);
    write_set(out, s);
}

namespace {

// "key=value,key=value" after the generator tag.
std::vector<std::pair<std::string, std::string>> parse_kv(const std::string& body) {
    std::vector<std::pair<std::string, std::string>> kv;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) raise(errc::parse_error, "expected key=value in: " + body);
        kv.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
    return kv;
}

std::string kv_get(const std::vector<std::pair<std::string, std::string>>& kv,
                   const std::string& key) {
    for (const auto& [k, v] : kv)
        if (k == key) return v;
    raise(errc::parse_error, "missing generator field: " + key);
}

} // namespace

FiniteSet set_from_spec(const std::string& spec) {
    auto colon = spec.find(':');
    std::string tag = colon == std::string::npos ? "" : spec.substr(0, colon);

    if (tag == "ap" || tag == "gp" || tag == "random" || tag == "inline") {
        std::string body = spec.substr(colon + 1);
        if (tag == "inline") {
            std::vector<Scalar> values;
            std::stringstream ss(body);
            std::string item;
            while (std::getline(ss, item, ',')) values.emplace_back(parse_rat(item));
            return make_set(values);
        }
        auto kv = parse_kv(body);
        long n = std::stol(kv_get(kv, "n"));
        if (n <= 0) raise(errc::parse_error, "generator needs n >= 1");
        if (tag == "ap") {
            Rat start = parse_rat(kv_get(kv, "start"));
            Rat step = parse_rat(kv_get(kv, "step"));
            if (sgn(step) == 0) raise(errc::parse_error, "ap step must be nonzero");
            std::vector<Rat> v;
            Rat cur = start;
            for (long i = 0; i < n; ++i, cur += step) v.push_back(cur);
            return make_set_exact(std::move(v));
        }
        if (tag == "gp") {
            Rat start = parse_rat(kv_get(kv, "start"));
            Rat ratio = parse_rat(kv_get(kv, "ratio"));
            if (sgn(start) == 0 || sgn(ratio) <= 0 || ratio == 1)
                raise(errc::parse_error, "gp needs start != 0 and ratio > 0, != 1");
            std::vector<Rat> v;
            Rat cur = start;
            for (long i = 0; i < n; ++i, cur *= ratio) v.push_back(cur);
            return make_set_exact(std::move(v));
        }
        // random
        std::string uni = kv_get(kv, "universe");
        auto dots = uni.find("..");
        if (dots == std::string::npos) raise(errc::parse_error, "universe must be lo..hi");
        std::int64_t lo = std::stoll(uni.substr(0, dots));
        std::int64_t hi = std::stoll(uni.substr(dots + 2));
        std::uint64_t seed = std::stoull(kv_get(kv, "seed"));
        return FiniteSet::from_sorted_ints(
            random_distinct_integers(seed, static_cast<std::size_t>(n), lo, hi));
    }

    return read_set_file(spec);
}

} // namespace growthlab
