#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "growthlab/finite_set.hpp"
#include "growthlab/setcore.hpp"
#include "test_util.hpp"

#ifndef GROWTHLAB_CLI_PATH
#define GROWTHLAB_CLI_PATH "growthlab"
#endif

namespace {

struct RunOutput {
    int exit_code;
    std::string stdout_text;
};

RunOutput run_cli(const std::string& args) {
    std::string out_path = "/tmp/growthlab_cli_out.txt";
    std::string cmd = std::string(GROWTHLAB_CLI_PATH) + " " + args + " > " + out_path + " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    std::ifstream in(out_path);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WEXITSTATUS(rc), ss.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("compute: AP and GP identities through the CLI") {
    RunOutput r = run_cli("compute --set ap:n=8,start=0,step=1 --op sum:k=16");
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("\"cardinality\":113") != std::string::npos);

    r = run_cli("compute --set gp:n=8,start=1,ratio=2 --op prod:k=16");
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("\"cardinality\":113") != std::string::npos);

    r = run_cli("compute --set ap:n=8,start=0,step=1 --op sum:k=16 --format csv");
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find(",113") != std::string::npos);
}

TEST_CASE("compute on a set file matches the library call") {
    const char* path = "/tmp/growthlab_cli_set.txt";
    {
        std::ofstream out(path);
        out << "# golden-file fixture\n\n8\n3\n1\n5\n13\n2\n21\n34\n";
    }
    growthlab::FiniteSet a = growthlab::read_set_file(path);
    growthlab::GrowthBudget budget;
    std::size_t expect = growthlab::signed_combination(a, 8, 7, budget).size();

    RunOutput r = run_cli(std::string("compute --set ") + path + " --op signed:k=8,l=7");
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("\"cardinality\":" + std::to_string(expect)) != std::string::npos);
}

TEST_CASE("set files round trip") {
    const char* path = "/tmp/growthlab_cli_roundtrip.txt";
    growthlab::FiniteSet a = testutil::qset({"7/3", "5/4", "-3", "12"});
    growthlab::write_set_file(path, a);
    CHECK(growthlab::read_set_file(path) == a);
}

TEST_CASE("exit codes: usage 2, budget 3, precondition 4") {
    CHECK(run_cli("compute --set ap:n=8,start=0,step=1 --op bogus:k=1").exit_code == 2);
    CHECK(run_cli("compute --set nonsense///file --op sum:k=2").exit_code == 2);
    CHECK(run_cli("compute --set ap:n=100,start=0,step=1 --op sum:k=8 --budget-size 50").exit_code ==
          3);
    CHECK(run_cli("pipeline --set ap:n=4,start=1,step=1 --fn ln").exit_code == 4);
    CHECK(run_cli("pipeline --set inline:-9,-7,-5,-3,-1,1,2,3 --fn ln").exit_code == 4);
    CHECK(run_cli("compute --set inline:0,1,2 --op ratio:k=2,l=1").exit_code == 4);
}

TEST_CASE("pipeline report: golden structure for GP with ln") {
    RunOutput r = run_cli("pipeline --set gp:n=16,start=1,ratio=2 --fn ln");
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("\"claim1_count\": 56") != std::string::npos);
    CHECK(r.stdout_text.find("\"claim2_count\": 15") != std::string::npos);
    CHECK(r.stdout_text.find("\"claim3_size\": 1") != std::string::npos);

    RunOutput ap = run_cli("pipeline --set ap:n=16,start=1,step=1 --fn ln");
    CHECK(ap.exit_code == 0);
    CHECK(ap.stdout_text.find("claim1-degenerate-split") != std::string::npos);
}

TEST_CASE("verify and repr run end to end") {
    RunOutput r = run_cli("verify --suite exhaustive --universe 2 --max-size 2 --max-fold 2");
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("\"violations\":0") != std::string::npos);

    run_cli("pipeline --set gp:n=16,start=1,ratio=2 --fn ln -o /tmp/growthlab_rep.json");
    RunOutput rep = run_cli("repr --input /tmp/growthlab_rep.json");
    CHECK(rep.exit_code == 0);
    CHECK(rep.stdout_text.find("claim1_count = 56") != std::string::npos);
}

TEST_CASE("search command reproduces byte-identical outputs") {
    const char* cfg_path = "/tmp/growthlab_sc.cfg";
    {
        std::ofstream out(cfg_path);
        out << "[search]\nn = 4\nmoves_per_round = 8\nrounds = 6\nseed = 7\n"
               "objective = eightfold\n[temperature]\ninitial = 1/2\ndecay = 9/10\n"
               "[universe]\nlo = 1\nhi = 32\ngranularity = 1\n";
    }
    std::string args = std::string("search --config ") + cfg_path +
                       " --trace /tmp/growthlab_trace1.csv --best-out /tmp/growthlab_best1.txt";
    CHECK(run_cli(args).exit_code == 0);
    std::string args2 = std::string("search --config ") + cfg_path +
                        " --trace /tmp/growthlab_trace2.csv --best-out /tmp/growthlab_best2.txt";
    CHECK(run_cli(args2).exit_code == 0);
    CHECK(slurp("/tmp/growthlab_trace1.csv") == slurp("/tmp/growthlab_trace2.csv"));
    CHECK(slurp("/tmp/growthlab_best1.txt") == slurp("/tmp/growthlab_best2.txt"));
    CHECK(!slurp("/tmp/growthlab_trace1.csv").empty());
}
