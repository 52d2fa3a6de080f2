// growthlab: exact set-growth experiments from the command line.
//
// Commands: compute, pipeline, verify, search, repr. Machine output goes to
// stdout, diagnostics to stderr. Exit codes: 0 ok, 2 usage/parse, 3 budget,
// 4 domain/precondition, 1 internal.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include "growthlab/convexfn.hpp"
#include "growthlab/finite_set.hpp"
#include "growthlab/reference.hpp"
#include "growthlab/search.hpp"
#include "growthlab/setcore.hpp"
#include "growthlab/squeeze.hpp"
#include "growthlab/verify.hpp"

namespace gl = growthlab;
using nlohmann::ordered_json;

namespace {

int exit_code_for(gl::errc c) {
    switch (c) {
        case gl::errc::parse_error:
        case gl::errc::invalid_argument: return 2;
        case gl::errc::budget_exceeded:
        case gl::errc::space_too_large: return 3;
        case gl::errc::domain_violation:
        case gl::errc::range_violation:
        case gl::errc::too_small:
        case gl::errc::zero_divisor:
        case gl::errc::zero_shift:
        case gl::errc::empty_input:
        case gl::errc::ambiguous_separation:
        case gl::errc::degenerate_split:
        case gl::errc::bucket_too_small:
        case gl::errc::not_k_convex:
        case gl::errc::certification_failure:
        case gl::errc::unsupported: return 4;
        default: return 1;
    }
}

unsigned env_precision() {
    const char* env = std::getenv("GROWTHLAB_PRECISION");
    if (!env) return gl::kDefaultPrecision;
    long v = std::atol(env);
    if (v < static_cast<long>(gl::kMinPrecision))
        gl::raise(gl::errc::invalid_argument, "GROWTHLAB_PRECISION must be >= 64");
    return static_cast<unsigned>(v);
}

struct CommonOpts {
    unsigned precision = env_precision();
    gl::GrowthBudget budget;
    std::string output = "-";
    std::string format = "json";
    int jobs = 0;

    void attach(CLI::App* app) {
        app->add_option("--precision", precision, "working precision in bits (>= 64)");
        app->add_option("--budget-size", budget.max_result_size, "max result set size");
        app->add_option("--budget-pairs", budget.max_pair_evaluations, "max pair evaluations");
        app->add_option("--output,-o", output, "output path ('-' = stdout)");
        app->add_option("--format", format, "json | csv")
            ->check(CLI::IsMember({"json", "csv"}));
        app->add_option("--jobs,-j", jobs, "worker threads (0 = runtime default)");
    }
    void apply() const {
        if (precision < gl::kMinPrecision)
            gl::raise(gl::errc::invalid_argument, "precision must be >= 64");
        if (jobs > 0) omp_set_num_threads(jobs);
    }
};

void emit(const CommonOpts& opts, const std::string& text) {
    if (opts.output == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(opts.output);
    if (!out) gl::raise(gl::errc::parse_error, "cannot open output: " + opts.output);
    out << text;
}

struct OpSpec {
    std::string kind;
    std::int64_t k = 1, l = 0;
    gl::Rat t;
};

OpSpec parse_op(const std::string& spec) {
    OpSpec op;
    auto colon = spec.find(':');
    op.kind = spec.substr(0, colon);
    if (colon != std::string::npos) {
        std::stringstream ss(spec.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto eq = item.find('=');
            if (eq == std::string::npos)
                gl::raise(gl::errc::parse_error, "op needs key=value fields: " + spec);
            std::string key = item.substr(0, eq);
            std::string val = item.substr(eq + 1);
            if (key == "k") op.k = std::stoll(val);
            else if (key == "l") op.l = std::stoll(val);
            else if (key == "t") op.t = gl::parse_rat(val);
            else gl::raise(gl::errc::parse_error, "unknown op field: " + key);
        }
    }
    return op;
}

int cmd_compute(const CommonOpts& opts, const std::string& set_spec, const std::string& op_spec) {
    gl::FiniteSet a = gl::set_from_spec(set_spec);
    OpSpec op = parse_op(op_spec);

    std::int64_t card = 0;
    if (op.kind == "sum") card = static_cast<std::int64_t>(gl::iterated_sumset(a, op.k, opts.budget).size());
    else if (op.kind == "signed")
        card = static_cast<std::int64_t>(gl::signed_combination(a, op.k, op.l, opts.budget).size());
    else if (op.kind == "prod")
        card = static_cast<std::int64_t>(gl::iterated_product(a, op.k, opts.budget).size());
    else if (op.kind == "ratio")
        card = static_cast<std::int64_t>(gl::ratio_set(a, op.k, op.l, opts.budget).size());
    else if (op.kind == "card") card = static_cast<std::int64_t>(a.size());
    else if (op.kind == "repcount") card = gl::rep_count(a, gl::Scalar(op.t));
    else if (op.kind == "shift")
        card = static_cast<std::int64_t>(gl::shift_intersection(a, gl::Scalar(op.t)).size());
    else gl::raise(gl::errc::parse_error, "unknown op: " + op.kind);

    if (opts.format == "csv") {
        std::ostringstream os;
        os << "set,op,cardinality\n" << set_spec << "," << op_spec << "," << card << "\n";
        emit(opts, os.str());
    } else {
        ordered_json j;
        j["set"] = set_spec;
        j["op"] = op_spec;
        j["cardinality"] = card;
        emit(opts, j.dump() + "\n");
    }
    return 0;
}

int cmd_pipeline(const CommonOpts& opts, const std::string& set_spec, const std::string& fn_spec) {
    gl::FiniteSet a = gl::set_from_spec(set_spec);
    gl::ConvexFunctionSpec f = gl::ConvexFunctionSpec::parse(fn_spec);
    gl::squeeze::WitnessReport rep = gl::squeeze::full_pipeline(a, f, opts.budget, opts.precision);
    emit(opts, rep.to_json().dump(2) + "\n");
    return 0;
}

int cmd_verify(const CommonOpts& opts, const std::string& suite, const std::string& check,
               const std::string& set_spec, const std::string& set2_spec,
               const std::string& set3_spec, const std::string& fn_spec, const std::string& t_str,
               std::int64_t k, std::int64_t l, std::int64_t universe, std::int64_t max_size,
               std::int64_t max_fold, std::int64_t corpus_count, std::uint64_t seed_base) {
    std::ostringstream os;
    auto line = [&](const gl::verify::CheckResult& r) { os << r.to_json().dump() << "\n"; };

    if (suite == "exhaustive") {
        auto violations = gl::verify::exhaustive_oracle(universe, max_size, max_fold, opts.budget);
        for (const auto& v : violations) line(v);
        std::int64_t checks = gl::verify::exhaustive_check_count(universe, max_size, max_fold);
        os << "{\"name\":\"exhaustive\",\"checks\":" << checks
           << ",\"violations\":" << violations.size() << "}\n";
        std::cerr << checks << " checks, " << violations.size() << " violations\n";
        emit(opts, os.str());
        return violations.empty() ? 0 : 1;
    }

    if (suite == "corpus") {
        gl::ConvexFunctionSpec f = gl::ConvexFunctionSpec::parse(fn_spec.empty() ? "ln" : fn_spec);
        for (std::int64_t i = 0; i < corpus_count; ++i) {
            std::ostringstream spec;
            std::int64_t n = 8 + static_cast<std::int64_t>((seed_base + i) % 25);
            spec << "random:n=" << n << ",universe=1..10000,seed=" << (seed_base + i);
            gl::FiniteSet a = gl::set_from_spec(spec.str());
            for (const auto& r : gl::verify::check_main(a, f, opts.budget, opts.precision)) line(r);
        }
        emit(opts, os.str());
        return 0;
    }

    // single checks
    if (check == "plunnecke") {
        gl::FiniteSet x = gl::set_from_spec(set_spec);
        gl::FiniteSet y = gl::set_from_spec(set2_spec.empty() ? set_spec : set2_spec);
        line(gl::verify::check_plunnecke(x, y, k, l, opts.budget));
    } else if (check == "ruzsa") {
        gl::FiniteSet x = gl::set_from_spec(set_spec);
        gl::FiniteSet y = gl::set_from_spec(set2_spec.empty() ? set_spec : set2_spec);
        gl::FiniteSet z = gl::set_from_spec(set3_spec.empty() ? set_spec : set3_spec);
        line(gl::verify::check_ruzsa(x, y, z, opts.budget));
    } else if (check == "enr") {
        gl::FiniteSet a = gl::set_from_spec(set_spec);
        gl::ConvexFunctionSpec f = gl::ConvexFunctionSpec::parse(fn_spec.empty() ? "ln" : fn_spec);
        line(gl::verify::check_enr(a, f, k, opts.budget, opts.precision));
    } else if (check == "bom") {
        gl::FiniteSet a = gl::set_from_spec(set_spec);
        gl::ConvexFunctionSpec f = gl::ConvexFunctionSpec::parse(fn_spec.empty() ? "ln" : fn_spec);
        line(gl::verify::check_bom(a, f, k, opts.budget, k == 3, opts.precision));
    } else if (check == "main") {
        gl::FiniteSet a = gl::set_from_spec(set_spec);
        gl::ConvexFunctionSpec f = gl::ConvexFunctionSpec::parse(fn_spec.empty() ? "ln" : fn_spec);
        for (const auto& r : gl::verify::check_main(a, f, opts.budget, opts.precision)) line(r);
    } else if (check == "cor43") {
        gl::FiniteSet a = gl::set_from_spec(set_spec);
        gl::Scalar t(gl::parse_rat(t_str.empty() ? "1" : t_str));
        for (const auto& r : gl::verify::check_cor43(a, t, opts.budget, opts.precision)) line(r);
    } else {
        gl::raise(gl::errc::parse_error, "unknown check: " + check);
    }
    emit(opts, os.str());
    return 0;
}

int cmd_search(const CommonOpts& opts, const std::string& config_path, const std::string& trace_path,
               const std::string& best_path, int restarts) {
    gl::search::SearchConfig cfg = gl::search::SearchConfig::load_file(config_path);
    if (opts.budget.max_result_size != gl::GrowthBudget{}.max_result_size ||
        opts.budget.max_pair_evaluations != gl::GrowthBudget{}.max_pair_evaluations)
        cfg.budget = opts.budget;
    gl::search::SearchResult res = restarts > 1 ? gl::search::portfolio_search(cfg, restarts)
                                                : gl::search::local_search(cfg);

    std::ofstream trace(trace_path);
    if (!trace) gl::raise(gl::errc::parse_error, "cannot open trace output: " + trace_path);
    gl::search::write_trace_csv(trace, res.trace);
    gl::write_set_file(best_path, res.best);

    ordered_json j;
    j["objective"] = gl::search::objective_name(cfg.objective);
    j["best_objective"] = res.best_objective;
    j["evaluations"] = res.trace.evaluations;
    j["rejected_budget"] = res.trace.rejected_budget;
    j["trace"] = trace_path;
    j["best_set"] = best_path;
    emit(opts, j.dump() + "\n");
    return 0;
}

int cmd_repr(const CommonOpts& opts, const std::string& input) {
    std::ifstream in(input);
    if (!in) gl::raise(gl::errc::parse_error, "cannot open report: " + input);
    ordered_json j = ordered_json::parse(in);
    std::ostringstream os;
    os << "witness report\n";
    for (auto& [key, value] : j.items()) {
        if (value.is_object()) {
            os << "  " << key << ":\n";
            for (auto& [k2, v2] : value.items())
                os << "    " << k2 << " = " << (v2.is_string() ? v2.get<std::string>() : v2.dump())
                   << "\n";
        } else {
            os << "  " << key << " = " << (value.is_string() ? value.get<std::string>() : value.dump())
               << "\n";
        }
    }
    emit(opts, os.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact-arithmetic laboratory for iterated sum/product growth"};
    app.require_subcommand(1);

    CommonOpts opts;

    std::string set_spec, set2_spec, set3_spec, op_spec, fn_spec = "ln", t_str;
    std::string suite, check = "main";
    std::int64_t k = 1, l = 0, universe = 6, max_size = 3, max_fold = 3;
    std::int64_t corpus_count = 16;
    std::uint64_t seed_base = 1;
    std::string config_path, trace_path = "trace.csv", best_path = "best_set.txt", report_path;
    int restarts = 1;

    CLI::App* compute = app.add_subcommand("compute", "set cardinalities under iterated operations");
    compute->add_option("--set", set_spec, "set source (file | ap:... | gp:... | random:... | inline:...)")
        ->required();
    compute->add_option("--op", op_spec, "sum:k= | signed:k=,l= | prod:k= | ratio:k=,l= | repcount:t= | shift:t= | card")
        ->required();
    opts.attach(compute);

    CLI::App* pipeline = app.add_subcommand("pipeline", "run the squeezing pipeline and report witnesses");
    pipeline->add_option("--set", set_spec, "set source")->required();
    pipeline->add_option("--fn", fn_spec, "ln | exp | cube | logshift:lambda=<rational> | square");
    opts.attach(pipeline);

    CLI::App* verify = app.add_subcommand("verify", "inequality checkers and oracles");
    verify->add_option("--suite", suite, "exhaustive | corpus");
    verify->add_option("--check", check, "plunnecke | ruzsa | enr | bom | main | cor43");
    verify->add_option("--set", set_spec, "set source");
    verify->add_option("--set2", set2_spec, "second set (plunnecke Y / ruzsa Y)");
    verify->add_option("--set3", set3_spec, "third set (ruzsa Z)");
    verify->add_option("--fn", fn_spec, "function spec");
    verify->add_option("--t", t_str, "shift for cor43");
    verify->add_option("--k", k, "fold k");
    verify->add_option("--l", l, "fold l");
    verify->add_option("--universe", universe, "exhaustive universe bound");
    verify->add_option("--max-size", max_size, "exhaustive max set size");
    verify->add_option("--max-fold", max_fold, "exhaustive max k+l");
    verify->add_option("--count", corpus_count, "corpus size");
    verify->add_option("--seed-base", seed_base, "corpus seed base");
    opts.attach(verify);

    CLI::App* search = app.add_subcommand("search", "anneal toward small growth exponents");
    search->add_option("--config", config_path, "search config file")->required();
    search->add_option("--trace", trace_path, "trace CSV output path");
    search->add_option("--best-out", best_path, "best set output path");
    search->add_option("--restarts", restarts, "parallel portfolio restarts");
    opts.attach(search);

    CLI::App* repr = app.add_subcommand("repr", "pretty-print a report");
    repr->add_option("--input", report_path, "report JSON path")->required();
    opts.attach(repr);

    CLI11_PARSE(app, argc, argv);

    try {
        opts.apply();
        if (app.got_subcommand(compute)) return cmd_compute(opts, set_spec, op_spec);
        if (app.got_subcommand(pipeline)) return cmd_pipeline(opts, set_spec, fn_spec);
        if (app.got_subcommand(verify))
            return cmd_verify(opts, suite, check, set_spec, set2_spec, set3_spec, fn_spec, t_str,
                              k, l, universe, max_size, max_fold, corpus_count, seed_base);
        if (app.got_subcommand(search))
            return cmd_search(opts, config_path, trace_path, best_path, restarts);
        if (app.got_subcommand(repr)) return cmd_repr(opts, report_path);
    } catch (const gl::error& e) {
        std::cerr << gl::errc_name(e.code()) << ": " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
