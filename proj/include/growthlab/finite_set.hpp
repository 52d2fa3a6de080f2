#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "growthlab/scalar.hpp"

namespace growthlab {

enum class SetMode { exact, real };

/// Strictly increasing, duplicate-free sequence of scalars. Exact sets are
/// stored as int64 when every element is a small integer (the common case for
/// experiment inputs), otherwise as rationals. Real sets store MPFR values at
/// a uniform working precision.
///
/// Real-mode distinctness regime: construction (make_set) treats bit-identical
/// values as equal, rejects distinct values closer than the tolerance, and
/// keeps everything else. Derived sets produced by the kernels instead merge
/// values within scale * 2^-(prec - kBandGuardBits), which is where rounding
/// artifacts of mathematically equal combinations land; see setcore.hpp.
class FiniteSet {
public:
    FiniteSet() = default;

    static FiniteSet from_sorted_ints(std::vector<std::int64_t> v);
    static FiniteSet from_sorted_rats(std::vector<Rat> v);
    static FiniteSet from_sorted_reals(std::vector<Real> v);

    SetMode mode() const { return mode_; }
    bool empty() const { return size() == 0; }
    std::size_t size() const {
        return int_rep_ ? ints_.size() : (mode_ == SetMode::exact ? rats_.size() : reals_.size());
    }

    bool has_int_rep() const { return int_rep_; }
    const std::vector<std::int64_t>& ints() const { return ints_; }
    const std::vector<Rat>& rats() const { return rats_; }
    const std::vector<Real>& reals() const { return reals_; }

    Scalar at(std::size_t i) const;
    Scalar front() const { return at(0); }
    Scalar back() const { return at(size() - 1); }

    /// Minimal precision across elements (real mode), kDefaultPrecision otherwise.
    unsigned precision() const;

    /// Magnitude hint max(|min|,|max|) used for band computations.
    Real scale_hint() const;

    /// Minimal pairwise gap ("separation"); meaningful for size >= 2.
    Scalar min_gap() const;

    std::vector<Rat> as_rats() const;              // exact mode only
    std::vector<Real> as_reals(unsigned prec) const;

    bool contains(const Scalar& x) const;          // stored-digit comparison

    friend bool operator==(const FiniteSet& a, const FiniteSet& b);

private:
    SetMode mode_ = SetMode::exact;
    bool int_rep_ = true;
    std::vector<std::int64_t> ints_;
    std::vector<Rat> rats_;
    std::vector<Real> reals_;
};

/// Sort + dedup + distinctness validation. Exact mode requires tolerance 0.
/// Real mode: duplicates (bit-identical) merge; two distinct values within
/// tolerance raise AmbiguousSeparation. Default tolerance (when nullopt):
/// scale * 2^-(prec/2).
FiniteSet make_set(const std::vector<Scalar>& values,
                   std::optional<Scalar> tolerance = std::nullopt);

FiniteSet make_set_exact(std::vector<Rat> values);
FiniteSet make_set_real(std::vector<Real> values,
                        std::optional<Real> tolerance = std::nullopt);

// --- set file format: one scalar per line ("7/3", "-3", "1.25"),
// '#' comments, blank lines ignored ---
FiniteSet read_set(std::istream& in);
FiniteSet read_set_file(const std::string& path);
void write_set(std::ostream& out, const FiniteSet& s);
void write_set_file(const std::string& path, const FiniteSet& s);

// --- generator specs: "ap:n=16,start=1,step=1", "gp:n=16,start=1,ratio=2",
// "random:n=16,universe=1..1000,seed=5", "inline:1,2,7/3", "file.txt" ---
FiniteSet set_from_spec(const std::string& spec);

} // namespace growthlab
