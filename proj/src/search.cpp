#include "growthlab/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <omp.h>

#include "growthlab/rng.hpp"
#include "growthlab/setcore.hpp"

namespace growthlab::search {

namespace {

using i64 = std::int64_t;

double log2_count(i64 v) { return std::log2(static_cast<double>(v)); }

} // namespace

Objective objective_from_string(const std::string& s) {
    if (s == "eightfold") return Objective::eightfold;
    if (s == "sumproduct16") return Objective::sumproduct16;
    if (s == "claim_product") return Objective::claim_product;
    raise(errc::parse_error, "unknown objective: " + s);
}

std::string objective_name(Objective o) {
    switch (o) {
        case Objective::eightfold: return "eightfold";
        case Objective::sumproduct16: return "sumproduct16";
        case Objective::claim_product: return "claim_product";
    }
    return "?";
}

void SearchConfig::validate() const {
    if (n < 4) raise(errc::invalid_argument, "search needs n >= 4");
    if (rounds < 0 || moves_per_round < 1) raise(errc::invalid_argument, "bad round counts");
    if (!(sgn(temp_decay) > 0) || !(temp_decay < 1))
        raise(errc::invalid_argument, "decay must be in (0,1)");
    if (sgn(temp_initial) <= 0) raise(errc::invalid_argument, "initial temperature must be > 0");
    if (sgn(granularity) <= 0) raise(errc::invalid_argument, "granularity must be > 0");
    if (!(universe_lo < universe_hi)) raise(errc::invalid_argument, "empty universe");
    Rat span = (universe_hi - universe_lo) / granularity;
    if (span < Rat(static_cast<long>(n)))
        raise(errc::invalid_argument, "universe lattice smaller than n");
    budget.validate();
}

SearchConfig SearchConfig::load(std::istream& in) {
    SearchConfig cfg;
    std::string line, section;
    while (std::getline(in, line)) {
        auto start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        auto end = line.find_last_not_of(" \t\r");
        std::string s = line.substr(start, end - start + 1);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[' && s.back() == ']') {
            section = s.substr(1, s.size() - 2);
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos) raise(errc::parse_error, "expected key = value: " + s);
        auto trim = [](std::string t) {
            auto a = t.find_first_not_of(" \t");
            auto b = t.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : t.substr(a, b - a + 1);
        };
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));

        if (section == "search" || section.empty()) {
            if (key == "n") cfg.n = std::stoll(val);
            else if (key == "moves_per_round") cfg.moves_per_round = std::stoll(val);
            else if (key == "rounds") cfg.rounds = std::stoll(val);
            else if (key == "seed") cfg.seed = std::stoull(val);
            else if (key == "objective") cfg.objective = objective_from_string(val);
            else if (key == "max_result_size") cfg.budget.max_result_size = std::stoll(val);
            else if (key == "max_pair_evaluations") cfg.budget.max_pair_evaluations = std::stoll(val);
            else raise(errc::parse_error, "unknown search key: " + key);
        } else if (section == "temperature") {
            if (key == "initial") cfg.temp_initial = parse_rat(val);
            else if (key == "decay") cfg.temp_decay = parse_rat(val);
            else raise(errc::parse_error, "unknown temperature key: " + key);
        } else if (section == "universe") {
            if (key == "lo") cfg.universe_lo = parse_rat(val);
            else if (key == "hi") cfg.universe_hi = parse_rat(val);
            else if (key == "granularity") cfg.granularity = parse_rat(val);
            else raise(errc::parse_error, "unknown universe key: " + key);
        } else {
            raise(errc::parse_error, "unknown section: " + section);
        }
    }
    cfg.validate();
    return cfg;
}

SearchConfig SearchConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(errc::parse_error, "cannot open config: " + path);
    return load(in);
}

Scalar objective_value(const FiniteSet& a, Objective kind, const GrowthBudget& budget) {
    if (!(a.front().sgn() > 0)) raise(errc::domain_violation, "objective needs positive sets");
    const double logn = log2_count(static_cast<i64>(a.size()));
    double value = 0.0;
    switch (kind) {
        case Objective::eightfold:
        case Objective::sumproduct16: {
            i64 k = kind == Objective::eightfold ? 8 : 16;
            i64 s = static_cast<i64>(iterated_sumset(a, k, budget).size());
            i64 p = static_cast<i64>(iterated_product(a, k, budget).size());
            // trivial growth floor: |kA| >= |A|, so the exponent is >= 1
            if (std::max(s, p) < static_cast<i64>(a.size()))
                raise(errc::internal, "k-fold set smaller than the set itself");
            value = log2_count(std::max(s, p)) / logn;
            break;
        }
        case Objective::claim_product: {
            i64 s = static_cast<i64>(signed_combination(a, 8, 7, budget).size());
            i64 p = static_cast<i64>(ratio_set(a, 5, 4, budget).size());
            value = (16.0 * log2_count(s) + 11.0 * log2_count(p)) / logn;
            break;
        }
    }
    return Scalar(Real::from_double(value, 64));
}

namespace {

struct LatticeUniverse {
    Rat lo, gran;
    i64 points; // indices 0..points-1 map to lo + i * gran
};

FiniteSet set_from_indices(const LatticeUniverse& u, const std::vector<i64>& idx) {
    std::vector<Rat> vals;
    vals.reserve(idx.size());
    for (i64 i : idx) vals.push_back(Rat(u.lo + Rat(static_cast<long>(i)) * u.gran));
    std::sort(vals.begin(), vals.end());
    return FiniteSet::from_sorted_rats(std::move(vals));
}

double eval_or_reject(const LatticeUniverse& u, const std::vector<i64>& idx, Objective kind,
                      const GrowthBudget& budget, SearchTrace& trace, bool& ok) {
    ++trace.evaluations;
    try {
        FiniteSet a = set_from_indices(u, idx);
        Scalar v = objective_value(a, kind, budget);
        ok = true;
        return v.real().to_double();
    } catch (const error& e) {
        if (e.code() != errc::budget_exceeded && e.code() != errc::zero_divisor &&
            e.code() != errc::domain_violation)
            throw;
        ++trace.rejected_budget;
        ok = false;
        return 0.0;
    }
}

} // namespace

SearchResult local_search(const SearchConfig& config) {
    config.validate();
    LatticeUniverse u;
    u.lo = config.universe_lo;
    u.gran = config.granularity;
    Rat span = (config.universe_hi - config.universe_lo) / config.granularity;
    // number of lattice points inside [lo, hi]
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), span.get_num().get_mpz_t(), span.get_den().get_mpz_t());
    u.points = static_cast<i64>(fl.get_si()) + 1;

    SplitMix64 rng(config.seed);
    SearchTrace trace;

    // initial set: evenly spread lattice points (an AP seed)
    std::vector<i64> cur;
    for (i64 i = 0; i < config.n; ++i)
        cur.push_back(i * std::max<i64>(1, (u.points - 1) / std::max<i64>(1, config.n - 1)));
    std::sort(cur.begin(), cur.end());

    bool ok = false;
    double cur_obj = eval_or_reject(u, cur, config.objective, config.budget, trace, ok);
    if (!ok) raise(errc::invalid_argument, "initial set violates the budget");

    std::vector<i64> best = cur;
    double best_obj = cur_obj;

    double temp = mpq_get_d(config.temp_initial.get_mpq_t());
    const double decay = mpq_get_d(config.temp_decay.get_mpq_t());

    for (i64 round = 0; round < config.rounds; ++round) {
        i64 accepted = 0;
        for (i64 mv = 0; mv < config.moves_per_round; ++mv) {
            std::vector<i64> cand = cur;
            std::uint64_t kind = rng.next() % 10;
            if (kind < 8) {
                // replace one element
                std::size_t pos = static_cast<std::size_t>(rng.next_below(cand.size()));
                i64 nv = static_cast<i64>(rng.next_below(static_cast<std::uint64_t>(u.points)));
                if (std::find(cand.begin(), cand.end(), nv) != cand.end()) continue;
                cand[pos] = nv;
                std::sort(cand.begin(), cand.end());
            } else if (kind == 8) {
                // translate by +-1 lattice step
                i64 dir = rng.next() % 2 == 0 ? 1 : -1;
                bool fits = true;
                for (i64& v : cand) {
                    v += dir;
                    fits &= v >= 0 && v < u.points;
                }
                if (!fits) continue;
            } else {
                // dilate by 2 around the origin of the lattice
                bool fits = true;
                for (i64& v : cand) {
                    v *= 2;
                    fits &= v < u.points;
                }
                if (!fits) continue;
            }

            bool cand_ok = false;
            double cand_obj =
                eval_or_reject(u, cand, config.objective, config.budget, trace, cand_ok);
            if (!cand_ok) continue;

            bool accept = cand_obj <= cur_obj;
            if (!accept && temp > 0.0) {
                double p = std::exp(-(cand_obj - cur_obj) / temp);
                accept = rng.next_unit() < p;
            }
            if (accept) {
                cur = std::move(cand);
                cur_obj = cand_obj;
                ++accepted;
                if (cur_obj < best_obj) {
                    best = cur;
                    best_obj = cur_obj;
                }
            }
        }
        trace.rows.push_back({round, best_obj, accepted, temp});
        temp *= decay;
    }

    SearchResult res;
    res.best = set_from_indices(u, best);
    res.best_objective = best_obj;
    res.trace = std::move(trace);
    return res;
}

SearchResult portfolio_search(const SearchConfig& config, int restarts) {
    if (restarts < 1) raise(errc::invalid_argument, "restarts >= 1");
    std::vector<SearchResult> results(static_cast<std::size_t>(restarts));
    std::exception_ptr fail;
#pragma omp parallel for schedule(dynamic, 1)
    for (int r = 0; r < restarts; ++r) {
        try {
            SearchConfig c = config;
            c.seed = config.seed + static_cast<std::uint64_t>(r);
            results[static_cast<std::size_t>(r)] = local_search(c);
        } catch (...) {
#pragma omp critical
            if (!fail) fail = std::current_exception();
        }
    }
    if (fail) std::rethrow_exception(fail);
    // winner by (objective, seed index) order
    std::size_t best = 0;
    for (std::size_t r = 1; r < results.size(); ++r)
        if (results[r].best_objective < results[best].best_objective) best = r;
    return std::move(results[best]);
}

void write_trace_csv(std::ostream& out, const SearchTrace& trace) {
    out << "round,best_objective,accepted,temperature\n";
    char buf[128];
    for (const TraceRow& r : trace.rows) {
        std::snprintf(buf, sizeof(buf), "%lld,%.12g,%lld,%.12g\n",
                      static_cast<long long>(r.round), r.best_objective,
                      static_cast<long long>(r.accepted), r.temperature);
        out << buf;
    }
}

} // namespace growthlab::search
