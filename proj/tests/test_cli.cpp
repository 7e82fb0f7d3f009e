#include "snnls/experiments.hpp"
#include "snnls/iohub.hpp"
#include "snnls/matcore.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace snnls;

namespace {

struct CmdResult {
    int status = -1;
    std::string output;
};

CmdResult run_cli(const std::string& args) {
    const std::string cmd = std::string(SNNLS_CLI_PATH) + " " + args + " 2>&1";
    CmdResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) res.output.append(buf, n);
    const int rc = pclose(pipe);
    res.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return res;
}

std::string make_temp_dir() {
    char tmpl[] = "/tmp/snnls_cli_XXXXXX";
    char* dir = mkdtemp(tmpl);
    REQUIRE(dir != nullptr);
    return std::string(dir);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// A small consistent problem: X = W Htrue with a 2-sparse code.
struct Problem {
    std::string dir;
    std::string x_path;
    std::string w_path;
};

Problem make_problem() {
    Problem p;
    p.dir = make_temp_dir();
    const NonNegMatrix W = gen_dictionary(8, 12, 7001);
    const NonNegMatrix H = gen_sparse_codes(12, 2, 2, 7002);
    const Matrix X = gemm(W.mat(), H.mat());
    p.x_path = p.dir + "/x.csv";
    p.w_path = p.dir + "/w.mtx";
    write_matrix(p.x_path, X);
    write_matrix(p.w_path, W.mat());
    return p;
}

}  // namespace

TEST_CASE("help exits cleanly") {
    const CmdResult res = run_cli("--help");
    CHECK(res.status == 0);
    CHECK(res.output.find("solve") != std::string::npos);
    CHECK(res.output.find("factorize") != std::string::npos);
}

TEST_CASE("unknown flags are usage errors") {
    const CmdResult res = run_cli("solve --definitely-not-a-flag");
    CHECK(res.status == 2);
}

TEST_CASE("missing input files exit with the path in the message") {
    const std::string out = make_temp_dir();
    const CmdResult res =
        run_cli("solve --x /tmp/does_not_exist.csv --w /tmp/also_missing.mtx --prior exp --outdir " +
                out);
    CHECK(res.status == 2);
    CHECK(res.output.find("does_not_exist.csv") != std::string::npos);
}

TEST_CASE("block priors require a block size") {
    const Problem p = make_problem();
    const CmdResult res =
        run_cli("solve --x " + p.x_path + " --w " + p.w_path + " --prior brst --outdir " + p.dir);
    CHECK(res.status == 2);
    CHECK(res.output.find("--blocks") != std::string::npos);
}

TEST_CASE("solve produces parseable artifacts") {
    const Problem p = make_problem();
    const std::string out = p.dir + "/run1";
    const CmdResult res = run_cli("solve --x " + p.x_path + " --w " + p.w_path +
                                  " --prior rst --tau 1 --lambda 0.001 --inner-iters 20" +
                                  " --outer-cap 40 --outdir " + out);
    CAPTURE(res.output);
    REQUIRE(res.status == 0);

    const NonNegMatrix H = read_matrix(out + "/h.mtx");
    CHECK(H.mat().rows() == 12);
    CHECK(H.mat().cols() == 2);

    const std::string trace = slurp(out + "/objective_trace.csv");
    CHECK(trace.rfind("iteration,objective", 0) == 0);

    const nlohmann::json rep = nlohmann::json::parse(slurp(out + "/solve_report.json"));
    CHECK(rep.at("schema_version") == 1);
    CHECK(rep.at("prior").at("family") == "rst");
    CHECK(rep.at("result").at("iterations").get<int>() >= 1);
    CHECK(rep.at("result").contains("kkt_normalized_residual"));
    CHECK(rep.at("result").at("converged").is_boolean());
}

TEST_CASE("solve reruns are byte identical") {
    const Problem p = make_problem();
    const std::string args = "solve --x " + p.x_path + " --w " + p.w_path +
                             " --prior rgdp --tau 0.5 --lambda 0.01 --inner-iters 15" +
                             " --outer-cap 25 --outdir ";
    const std::string out1 = p.dir + "/a", out2 = p.dir + "/b";
    REQUIRE(run_cli(args + out1).status == 0);
    REQUIRE(run_cli(args + out2).status == 0);
    for (const char* f : {"/h.mtx", "/objective_trace.csv", "/solve_report.json"}) {
        CAPTURE(f);
        CHECK(slurp(out1 + f) == slurp(out2 + f));
    }
}

TEST_CASE("benchmark reruns are byte identical") {
    const std::string dir = make_temp_dir();
    const std::string args =
        "bench-snnls --d 10 --n 20 --m 3 --k-list 2 --trials 1 --seed 5 --lambdas 0.01"
        " --methods rl2,l1 --inner-iters 25 --outer-cap 5 --anneal-steps 1 --outdir ";
    const std::string out1 = dir + "/a", out2 = dir + "/b";
    const CmdResult r1 = run_cli(args + out1);
    CAPTURE(r1.output);
    REQUIRE(r1.status == 0);
    REQUIRE(run_cli(args + out2).status == 0);
    for (const char* f : {"/recovery.csv", "/bench_snnls_report.json"}) {
        CAPTURE(f);
        CHECK(slurp(out1 + f) == slurp(out2 + f));
    }
    const std::string csv = slurp(out1 + "/recovery.csv");
    CHECK(csv.rfind("method,k,d,n,m,block_size,trials,lambda,mean_error", 0) == 0);
}

TEST_CASE("benchmark flags override config files") {
    const std::string dir = make_temp_dir();
    {
        std::ofstream ini(dir + "/bench.ini");
        ini << "[trial]\nd = 10\nn = 20\nm = 3\nk_list = 2\ntrials = 1\nlambdas = 0.01\n"
               "methods = l1\ninner_iters = 20\nouter_cap = 4\nanneal_steps = 0\nseed = 9\n";
    }
    const CmdResult res = run_cli("bench-snnls --config " + dir + "/bench.ini --trials 2 --outdir " +
                                  dir + "/out");
    CAPTURE(res.output);
    REQUIRE(res.status == 0);
    const nlohmann::json rep = nlohmann::json::parse(slurp(dir + "/out/bench_snnls_report.json"));
    CHECK(rep.at("spec").at("trials") == 2);   // flag wins
    CHECK(rep.at("spec").at("d") == 10);       // ini wins over default
}

TEST_CASE("block benchmark runs the pursuit baseline") {
    const std::string dir = make_temp_dir();
    const CmdResult res = run_cli(
        "bench-block --d 12 --n 16 --m 2 --k-list 1 --block-size 4 --trials 1 --seed 3"
        " --lambdas 0.01 --methods brst,nnbomp --inner-iters 20 --outer-cap 4 --anneal-steps 1"
        " --outdir " + dir);
    CAPTURE(res.output);
    REQUIRE(res.status == 0);
    const std::string csv = slurp(dir + "/recovery.csv");
    CHECK(csv.find("nnbomp") != std::string::npos);
    CHECK(csv.find("brst") != std::string::npos);
}

TEST_CASE("factorize writes both factors") {
    const Problem p = make_problem();
    const std::string out = p.dir + "/fact";
    const CmdResult res = run_cli("factorize --x " + p.x_path +
                                  " --rank 3 --prior-h exp --lambda 0.01 --outer-cap 15 --seed 2" +
                                  " --outdir " + out);
    CAPTURE(res.output);
    REQUIRE(res.status == 0);
    const NonNegMatrix W = read_matrix(out + "/w.mtx");
    const NonNegMatrix H = read_matrix(out + "/h.mtx");
    CHECK(W.mat().rows() == 8);
    CHECK(W.mat().cols() == 3);
    CHECK(H.mat().rows() == 3);
    CHECK(H.mat().cols() == 2);
    const nlohmann::json rep = nlohmann::json::parse(slurp(out + "/factorize_report.json"));
    CHECK(rep.at("result").contains("relative_residual"));
}

TEST_CASE("diag reports on an existing solution") {
    const Problem p = make_problem();
    const std::string solve_out = p.dir + "/solved";
    REQUIRE(run_cli("solve --x " + p.x_path + " --w " + p.w_path +
                    " --prior exp --lambda 0.01 --inner-iters 20 --outer-cap 20 --outdir " +
                    solve_out)
                .status == 0);
    const std::string out = p.dir + "/diag";
    const CmdResult res = run_cli("diag --x " + p.x_path + " --w " + p.w_path + " --h " +
                                  solve_out + "/h.mtx --prior exp --lambda 0.01 --outdir " + out);
    CAPTURE(res.output);
    REQUIRE(res.status == 0);
    const nlohmann::json rep = nlohmann::json::parse(slurp(out + "/diag_report.json"));
    CHECK(rep.at("kkt").contains("normalized_residual"));
    CHECK(rep.at("objective").is_number());
    const std::string csv = slurp(out + "/sparsity_profile.csv");
    CHECK(csv.rfind("rank,average_magnitude", 0) == 0);
}

TEST_CASE("subcommand is required") {
    const CmdResult res = run_cli("");
    CHECK(res.status == 2);
}
