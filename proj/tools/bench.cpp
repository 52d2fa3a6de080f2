// Benchmark: OpenMP kernels against the serial reference implementation.
// Each row checks that both paths return identical sets before timing is
// reported, so the speedup numbers are for verified-equal results.

#include <chrono>
#include <cstdio>
#include <functional>

#include <omp.h>

#include "growthlab/reference.hpp"
#include "growthlab/rng.hpp"
#include "growthlab/setcore.hpp"

namespace gl = growthlab;

namespace {

double time_ms(const std::function<void()>& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void row(const char* name, std::size_t n, std::size_t result,
         double serial_ms, double parallel_ms, bool equal) {
    std::printf("%-34s %8zu %10zu %11.1f %11.1f %8.2fx  %s\n", name, n, result, serial_ms,
                parallel_ms, serial_ms / parallel_ms, equal ? "ok" : "MISMATCH");
}

} // namespace

int main() {
    gl::GrowthBudget budget;
    budget.max_pair_evaluations = 100'000'000'000;
    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%-34s %8s %10s %11s %11s %9s\n", "case", "n", "result", "serial ms",
                "openmp ms", "speedup");

    { // dense integer path: AP sumset
        gl::FiniteSet a = gl::set_from_spec("ap:n=4000,start=1,step=3");
        gl::FiniteSet ref_out, fast_out;
        double s = time_ms([&] { ref_out = gl::ref::sumset(a, a); });
        double p = time_ms([&] { fast_out = gl::sumset(a, a, budget); });
        row("sumset AP (dense int path)", a.size(), fast_out.size(), s, p, ref_out == fast_out);
    }
    { // random integers, wide universe
        gl::FiniteSet a = gl::FiniteSet::from_sorted_ints(
            gl::random_distinct_integers(7, 1200, 1, 1'000'000'000));
        gl::FiniteSet ref_out, fast_out;
        double s = time_ms([&] { ref_out = gl::ref::sumset(a, a); });
        double p = time_ms([&] { fast_out = gl::sumset(a, a, budget); });
        row("sumset random wide int", a.size(), fast_out.size(), s, p, ref_out == fast_out);
    }
    { // iterated fold on an AP
        gl::FiniteSet a = gl::set_from_spec("ap:n=10000,start=1,step=1");
        gl::FiniteSet fast_out;
        double p = time_ms([&] { fast_out = gl::iterated_sumset(a, 8, budget); });
        gl::FiniteSet small = gl::set_from_spec("ap:n=600,start=1,step=1");
        gl::FiniteSet ref_small, fast_small;
        double s = time_ms([&] { ref_small = gl::ref::iterated_sumset(small, 8); });
        double ps = time_ms([&] { fast_small = gl::iterated_sumset(small, 8, budget); });
        row("8-fold sumset AP n=600", small.size(), fast_small.size(), s, ps,
            ref_small == fast_small);
        std::printf("%-34s %8zu %10zu %11s %11.1f\n", "8-fold sumset AP n=10000 (dense)",
                    a.size(), fast_out.size(), "-", p);
    }
    { // rational kernel
        std::vector<gl::Rat> vals;
        gl::SplitMix64 rng(11);
        for (int i = 0; i < 400; ++i) {
            gl::Rat q(static_cast<long>(1 + rng.next_below(100000)),
                      static_cast<long>(1 + rng.next_below(64)));
            q.canonicalize();
            vals.push_back(std::move(q));
        }
        gl::FiniteSet a = gl::make_set_exact(vals);
        gl::FiniteSet ref_out, fast_out;
        double s = time_ms([&] { ref_out = gl::ref::sumset(a, a); });
        double p = time_ms([&] { fast_out = gl::sumset(a, a, budget); });
        row("sumset random rationals", a.size(), fast_out.size(), s, p, ref_out == fast_out);
    }
    { // real (128-bit) kernel
        gl::FiniteSet base = gl::FiniteSet::from_sorted_ints(
            gl::random_distinct_integers(23, 700, 1, 1'000'000));
        std::vector<gl::Real> vals;
        for (const gl::Real& r : base.as_reals(128)) vals.push_back(log(r));
        gl::FiniteSet a = gl::FiniteSet::from_sorted_reals(std::move(vals));
        gl::FiniteSet ref_out, fast_out;
        double s = time_ms([&] { ref_out = gl::ref::sumset(a, a); });
        double p = time_ms([&] { fast_out = gl::sumset(a, a, budget); });
        row("sumset 128-bit reals (ln image)", a.size(), fast_out.size(), s, p,
            ref_out == fast_out);
    }
    { // signed combination, the 8A-7A shape
        gl::FiniteSet a = gl::FiniteSet::from_sorted_ints(
            gl::random_distinct_integers(5, 8, 1, 1'000'000));
        gl::FiniteSet ref_out, fast_out;
        double s = time_ms([&] { ref_out = gl::ref::signed_combination(a, 5, 4); });
        double p = time_ms([&] { fast_out = gl::signed_combination(a, 5, 4, budget); });
        row("signed 5X-4X, 8 random ints", a.size(), fast_out.size(), s, p,
            ref_out == fast_out);
    }
    return 0;
}
