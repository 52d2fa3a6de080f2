#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "growthlab/budget.hpp"
#include "growthlab/finite_set.hpp"

namespace growthlab::search {

enum class Objective { eightfold, sumproduct16, claim_product };

Objective objective_from_string(const std::string& s);
std::string objective_name(Objective o);

/// Simulated-annealing configuration over an integer lattice universe
/// lo, lo+granularity, ..., hi. All randomness flows from `seed` through the
/// counter-based SplitMix64 stream.
struct SearchConfig {
    std::int64_t n = 8;
    std::int64_t moves_per_round = 32;
    std::int64_t rounds = 64;
    std::uint64_t seed = 1;
    Objective objective = Objective::eightfold;
    Rat temp_initial = Rat(1, 2);
    Rat temp_decay = Rat(9, 10);
    Rat universe_lo = Rat(1);
    Rat universe_hi = Rat(1024);
    Rat granularity = Rat(1);
    GrowthBudget budget;

    void validate() const;
    /// Flat key-value format with [search] / [temperature] / [universe]
    /// sections; '#' comments.
    static SearchConfig load(std::istream& in);
    static SearchConfig load_file(const std::string& path);
};

struct TraceRow {
    std::int64_t round;
    double best_objective;
    std::int64_t accepted;
    double temperature;
};

struct SearchTrace {
    std::vector<TraceRow> rows;
    std::int64_t evaluations = 0;
    std::int64_t rejected_budget = 0;
};

/// log2(max{|kA|, |A^(k)|}) / log2|A| for k in {8,16}, or the witnessed
/// product exponent (16 log2|8A-7A| + 11 log2|A^(5)/A^(4)|) / log2|A|.
Scalar objective_value(const FiniteSet& a, Objective kind, const GrowthBudget& budget);

struct SearchResult {
    FiniteSet best;
    double best_objective = 0.0;
    SearchTrace trace;
};

/// Deterministic annealing run; budget-violating candidates count as
/// rejected moves.
SearchResult local_search(const SearchConfig& config);

/// Independent restarts with seeds seed, seed+1, ...; winner by
/// (objective, seed) order. Restarts may run in parallel.
SearchResult portfolio_search(const SearchConfig& config, int restarts);

void write_trace_csv(std::ostream& out, const SearchTrace& trace);

} // namespace growthlab::search
