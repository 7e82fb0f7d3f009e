#include "snnls/baselines.hpp"
#include "snnls/diagnostics.hpp"
#include "snnls/experiments.hpp"
#include "snnls/iohub.hpp"
#include "snnls/matcore.hpp"
#include "snnls/priors.hpp"
#include "snnls/snmf.hpp"
#include "snnls/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace snnls;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string default_outdir() {
    const char* env = std::getenv("SNNLS_OUTDIR");
    return env && *env ? env : ".";
}

fs::path prepare_outdir(const std::string& outdir) {
    fs::path p(outdir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw ValidationError("cannot create output directory '" + outdir + "': " + ec.message());
    return p;
}

void write_trace_csv(const fs::path& path, const std::vector<double>& trace) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open file for writing: " + path.string());
    out << "iteration,objective\n";
    for (size_t i = 0; i < trace.size(); ++i) out << i << ',' << fmt17(trace[i]) << '\n';
    if (!out) throw ValidationError("write failed: " + path.string());
}

// Assembles the final report: stamps the schema version, replaces any
// non-finite numbers with null and folds the replacement notes into the
// warnings list.
void finalize_report(json report, std::vector<std::string> warnings, const fs::path& path) {
    report["schema_version"] = kReportSchemaVersion;
    std::vector<std::string> sanitize_notes;
    json clean = sanitize_json(report, sanitize_notes);
    for (const std::string& w : sanitize_notes) warnings.push_back(w);
    clean["warnings"] = warnings;
    write_report(clean, path.string());
}

PriorSpec make_prior(const std::string& name, double tau, int block_size, int n_rows) {
    PriorSpec prior;
    prior.family = family_from_name(name);
    prior.tau = tau;
    if (prior.is_block()) {
        if (block_size < 1)
            throw ValidationError("prior '" + name + "' requires --blocks <size>");
        prior.blocks = BlockStructure::contiguous(n_rows, block_size);
    } else if (block_size > 0) {
        throw ValidationError("--blocks is only meaningful for block priors");
    }
    prior.validate(n_rows);
    return prior;
}

json prior_json(const std::string& name, double tau, int block_size) {
    json j;
    j["family"] = name;
    j["tau"] = tau;
    if (block_size > 0) j["block_size"] = block_size;
    return j;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

json runtime_field(const Timer& timer, bool timings) {
    return timings ? json(timer.seconds()) : json(nullptr);
}

// ---------------------------------------------------------------- solve ----

struct SolveArgs {
    std::string x_path, w_path, h0_path, outdir = default_outdir();
    std::string prior_name = "rgdp", rule = "general";
    double tau = 0.1, lambda = 0.01, conv_tol = 1e-9, zero_tol = 1e-12;
    int blocks = 0, inner_iters = 1, outer_cap = 1000, anneal_steps = 0;
    double anneal_tau0 = 1.0, anneal_factor = 10.0;
    bool timings = false;
};

int cmd_solve(const SolveArgs& a) {
    Timer timer;
    const NonNegMatrix X = read_matrix(a.x_path);
    const NonNegMatrix W = read_matrix(a.w_path);
    const PriorSpec prior = make_prior(a.prior_name, a.tau, a.blocks, W.cols());

    SolverConfig cfg;
    cfg.lambda = a.lambda;
    cfg.inner_iters = a.inner_iters;
    cfg.outer_cap = a.outer_cap;
    cfg.conv_tol = a.conv_tol;
    cfg.zero_tol = a.zero_tol;
    cfg.update_rule = update_rule_from_name(a.rule);
    if (a.anneal_steps > 0) {
        AnnealSchedule sched;
        sched.tau0 = a.anneal_tau0;
        sched.factor = a.anneal_factor;
        sched.max_steps = a.anneal_steps;
        cfg.anneal = sched;
    }

    SolverResult res;
    if (!a.h0_path.empty()) {
        const NonNegMatrix H0 = read_matrix(a.h0_path);
        res = snnls_solve(X, W, H0, prior, cfg);
    } else {
        res = snnls_solve(X, W, prior, cfg);
    }

    const fs::path out = prepare_outdir(a.outdir);
    write_matrix((out / "h.mtx").string(), res.H, MatrixFormat::MatrixMarket);
    write_trace_csv(out / "objective_trace.csv", res.objective_trace);

    const SparsityProfile sp = sparsity_profile(res.H);
    int max_above = 0;
    double mean_above = 0.0;
    for (int c : sp.above_threshold) {
        max_above = std::max(max_above, c);
        mean_above += c;
    }
    if (!sp.above_threshold.empty()) mean_above /= static_cast<double>(sp.above_threshold.size());

    json report;
    report["command"] = "solve";
    report["inputs"] = {{"x", a.x_path}, {"w", a.w_path}};
    if (!a.h0_path.empty()) report["inputs"]["h0"] = a.h0_path;
    report["prior"] = prior_json(a.prior_name, a.tau, a.blocks);
    report["config"] = {{"lambda", a.lambda},
                        {"inner_iters", a.inner_iters},
                        {"outer_cap", a.outer_cap},
                        {"conv_tol", a.conv_tol},
                        {"zero_tol", a.zero_tol},
                        {"update_rule", a.rule}};
    report["config"]["anneal"] =
        a.anneal_steps > 0 ? json({{"tau0", a.anneal_tau0},
                                   {"factor", a.anneal_factor},
                                   {"max_steps", a.anneal_steps}})
                           : json(nullptr);
    report["result"] = {{"iterations", res.iterations},
                        {"converged", res.converged},
                        {"kkt_normalized_residual", res.kkt_residual},
                        {"stationarity_condition_held", res.stationarity_condition_held},
                        {"objective_initial", res.objective_trace.front()},
                        {"objective_final", res.objective_trace.back()},
                        {"anneal_taus", res.anneal_taus},
                        {"sparsity", {{"threshold", sp.threshold},
                                      {"max_above_threshold", max_above},
                                      {"mean_above_threshold", mean_above}}}};
    report["runtime_seconds"] = runtime_field(timer, a.timings);
    finalize_report(std::move(report), res.warnings, out / "solve_report.json");

    std::cout << "solve: " << res.iterations << " outer iterations, objective "
              << fmt17(res.objective_trace.back()) << ", kkt residual "
              << fmt17(res.kkt_residual) << (res.converged ? "" : " (cap reached)") << "\n";
    return 0;
}

// ------------------------------------------------------------ factorize ----

struct FactorizeArgs {
    std::string x_path, w0_path, h0_path, outdir = default_outdir();
    std::string prior_h = "exp", prior_w = "none";
    double tau_h = 0.1, tau_w = 0.1, lambda = 0.01, conv_tol = 1e-9;
    int rank = 0, blocks_h = 0, blocks_w = 0, inner_iters = 1, outer_cap = 200;
    uint64_t seed = 1;
    bool no_normalize = false, timings = false;
};

int cmd_factorize(const FactorizeArgs& a) {
    Timer timer;
    const NonNegMatrix X = read_matrix(a.x_path);
    if (a.rank < 1) throw ValidationError("--rank must be at least 1");
    const PriorSpec prior_h = make_prior(a.prior_h, a.tau_h, a.blocks_h, a.rank);
    const PriorSpec prior_w = make_prior(a.prior_w, a.tau_w, a.blocks_w, a.rank);

    SolverConfig cfg;
    cfg.lambda = a.lambda;
    cfg.inner_iters = a.inner_iters;
    cfg.conv_tol = a.conv_tol;

    SnmfOptions opts;
    opts.outer_cap = a.outer_cap;
    opts.normalize_w = !a.no_normalize;
    if (!a.w0_path.empty()) opts.w0 = std::move(read_matrix(a.w0_path)).take();
    if (!a.h0_path.empty()) opts.h0 = std::move(read_matrix(a.h0_path)).take();
    // Random rectified-Gaussian warm start unless files are given: the
    // all-ones default is a symmetric point that keeps every atom identical.
    if (!opts.w0) opts.w0 = std::move(gen_dictionary(X.rows(), a.rank, mix_seed(a.seed, 0))).take();
    if (!opts.h0) {
        Rng rng(mix_seed(a.seed, 1));
        Matrix h(a.rank, X.cols());
        for (int i = 0; i < h.rows(); ++i)
            for (int j = 0; j < h.cols(); ++j) h(i, j) = std::fabs(rng.normal());
        opts.h0 = std::move(h);
    }

    const FactorizationResult res = snmf_solve(X, a.rank, prior_h, prior_w, cfg, opts);

    const fs::path out = prepare_outdir(a.outdir);
    write_matrix((out / "w.mtx").string(), res.W, MatrixFormat::MatrixMarket);
    write_matrix((out / "h.mtx").string(), res.H, MatrixFormat::MatrixMarket);
    write_trace_csv(out / "objective_trace.csv", res.objective_trace);

    const double xnorm = std::sqrt(frobenius_norm_sq(X.mat()));
    const double rel_residual =
        xnorm > 0.0 ? std::sqrt(residual_sum_squares(X.mat(), res.W, res.H)) / xnorm : 0.0;

    json report;
    report["command"] = "factorize";
    report["inputs"] = {{"x", a.x_path}};
    report["rank"] = a.rank;
    report["seed"] = a.seed;
    report["prior_h"] = prior_json(a.prior_h, a.tau_h, a.blocks_h);
    report["prior_w"] = prior_json(a.prior_w, a.tau_w, a.blocks_w);
    report["config"] = {{"lambda", a.lambda},
                        {"inner_iters", a.inner_iters},
                        {"outer_cap", a.outer_cap},
                        {"conv_tol", a.conv_tol},
                        {"normalize_w", !a.no_normalize}};
    report["result"] = {{"outer_iterations", res.outer_iters},
                        {"converged", res.converged},
                        {"relative_residual", rel_residual},
                        {"kkt_w", res.kkt_w},
                        {"kkt_h", res.kkt_h},
                        {"objective_initial", res.objective_trace.front()},
                        {"objective_final", res.objective_trace.back()}};
    report["runtime_seconds"] = runtime_field(timer, a.timings);
    finalize_report(std::move(report), res.warnings, out / "factorize_report.json");

    std::cout << "factorize: " << res.outer_iters << " rounds, relative residual "
              << fmt17(rel_residual) << (res.converged ? "" : " (cap reached)") << "\n";
    return 0;
}

// ---------------------------------------------------------------- bench ----

struct BenchArgs {
    std::string config_path, outdir = default_outdir();
    TrialSpec base;
    std::vector<int> k_list;
    std::vector<std::string> method_names;
    bool no_refine = false, timings = false;
    // Option pointers so explicit flags can override config-file values.
    CLI::Option *opt_d = nullptr, *opt_n = nullptr, *opt_m = nullptr, *opt_trials = nullptr,
                *opt_seed = nullptr, *opt_lambdas = nullptr, *opt_tau = nullptr,
                *opt_inner = nullptr, *opt_outer = nullptr, *opt_anneal = nullptr,
                *opt_jobs = nullptr, *opt_noise = nullptr, *opt_block = nullptr,
                *opt_k = nullptr, *opt_methods = nullptr, *opt_refine = nullptr;
    int d = 0, n = 0, m = 0, trials = 0, inner = 0, outer = 0, anneal = 0, jobs = 0, block = 0;
    uint64_t seed = 0;
    double tau = 0.0, noise = 0.0;
    std::vector<double> lambdas;
};

void add_bench_options(CLI::App* cmd, BenchArgs& a, bool block_suite) {
    a.base.block_size = block_suite ? 8 : 0;
    a.base.d = block_suite ? 80 : 100;
    a.base.n = block_suite ? 160 : 400;
    a.k_list = {10};
    cmd->add_option("--config", a.config_path, "INI config file (CLI flags override it)");
    cmd->add_option("--outdir", a.outdir, "output directory");
    a.opt_d = cmd->add_option("--d", a.d, "signal dimension");
    a.opt_n = cmd->add_option("--n", a.n, "dictionary atoms");
    a.opt_m = cmd->add_option("--m", a.m, "number of signals");
    a.opt_k = cmd->add_option("--k-list", a.k_list, "sparsity levels to sweep")->delimiter(',');
    a.opt_trials = cmd->add_option("--trials", a.trials, "trials per cell");
    a.opt_seed = cmd->add_option("--seed", a.seed, "master seed");
    a.opt_lambdas = cmd->add_option("--lambdas", a.lambdas, "lambda sweep")->delimiter(',');
    a.opt_tau = cmd->add_option("--tau-rl1", a.tau, "tau for the reweighted-l1 family");
    a.opt_inner = cmd->add_option("--inner-iters", a.inner, "multiplicative updates per weight refresh");
    a.opt_outer = cmd->add_option("--outer-cap", a.outer, "maximum weight refreshes");
    a.opt_anneal = cmd->add_option("--anneal-steps", a.anneal, "annealing ladder steps");
    a.opt_jobs = cmd->add_option("--jobs", a.jobs, "worker threads");
    a.opt_noise = cmd->add_option("--noise-sigma", a.noise, "additive noise level (0 = noiseless)");
    a.opt_methods =
        cmd->add_option("--methods", a.method_names, "solvers to run")->delimiter(',');
    a.opt_refine = cmd->add_flag("--no-refine", a.no_refine, "skip the top-k polish");
    if (block_suite) a.opt_block = cmd->add_option("--block-size", a.block, "entries per block");
    cmd->add_flag("--timings", a.timings, "include wall-clock timings in outputs");
}

void apply_bench_config(BenchArgs& a, bool block_suite) {
    TrialSpec& s = a.base;
    if (!a.config_path.empty()) {
        const IniConfig ini = read_ini(a.config_path);
        const std::string sec = "trial";
        s.d = ini.get_int(sec, "d", s.d);
        s.n = ini.get_int(sec, "n", s.n);
        s.m = ini.get_int(sec, "m", s.m);
        s.trials = ini.get_int(sec, "trials", s.trials);
        s.seed = static_cast<uint64_t>(ini.get_int(sec, "seed", static_cast<int>(s.seed)));
        s.tau_rl1 = ini.get_double(sec, "tau_rl1", s.tau_rl1);
        s.inner_iters = ini.get_int(sec, "inner_iters", s.inner_iters);
        s.outer_cap = ini.get_int(sec, "outer_cap", s.outer_cap);
        s.anneal_max_steps = ini.get_int(sec, "anneal_steps", s.anneal_max_steps);
        s.jobs = ini.get_int(sec, "jobs", s.jobs);
        s.noise_sigma = ini.get_double(sec, "noise_sigma", s.noise_sigma);
        s.block_size = ini.get_int(sec, "block_size", s.block_size);
        s.refine = ini.get_int(sec, "refine", s.refine ? 1 : 0) != 0;
        if (ini.has(sec, "k")) a.k_list = {ini.get_int(sec, "k", a.k_list.front())};
        auto split_list = [](const std::string& text) {
            std::vector<std::string> items;
            std::string cur;
            for (char c : text) {
                if (c == ',') {
                    items.push_back(cur);
                    cur.clear();
                } else {
                    cur.push_back(c);
                }
            }
            items.push_back(cur);
            return items;
        };
        if (ini.has(sec, "k_list")) {
            a.k_list.clear();
            for (const std::string& t : split_list(ini.get(sec, "k_list")))
                a.k_list.push_back(std::stoi(t));
        }
        if (ini.has(sec, "lambdas")) {
            s.lambdas.clear();
            for (const std::string& t : split_list(ini.get(sec, "lambdas")))
                s.lambdas.push_back(std::stod(t));
        }
        if (ini.has(sec, "methods")) {
            s.methods.clear();
            for (const std::string& t : split_list(ini.get(sec, "methods")))
                s.methods.push_back(method_from_name(t));
        }
    }
    if (a.opt_d->count()) s.d = a.d;
    if (a.opt_n->count()) s.n = a.n;
    if (a.opt_m->count()) s.m = a.m;
    if (a.opt_trials->count()) s.trials = a.trials;
    if (a.opt_seed->count()) s.seed = a.seed;
    if (a.opt_lambdas->count()) s.lambdas = a.lambdas;
    if (a.opt_tau->count()) s.tau_rl1 = a.tau;
    if (a.opt_inner->count()) s.inner_iters = a.inner;
    if (a.opt_outer->count()) s.outer_cap = a.outer;
    if (a.opt_anneal->count()) s.anneal_max_steps = a.anneal;
    if (a.opt_jobs->count()) s.jobs = a.jobs;
    if (a.opt_noise->count()) s.noise_sigma = a.noise;
    if (block_suite && a.opt_block->count()) s.block_size = a.block;
    if (a.opt_refine->count()) s.refine = !a.no_refine;
    if (a.opt_methods->count()) {
        s.methods.clear();
        for (const std::string& t : a.method_names) s.methods.push_back(method_from_name(t));
    }
}

int cmd_bench(BenchArgs& a, bool block_suite) {
    Timer timer;
    apply_bench_config(a, block_suite);
    const fs::path out = prepare_outdir(a.outdir);

    std::vector<RecoveryReport> reports;
    for (int k : a.k_list) {
        TrialSpec s = a.base;
        s.k = k;
        reports.push_back(run_recovery_suite(s));
    }

    std::ofstream csv(out / "recovery.csv");
    if (!csv) throw ValidationError("cannot open file for writing: " + (out / "recovery.csv").string());
    csv << "method,k,d,n,m,block_size,trials,lambda,mean_error,std_error,"
           "mean_error_refined,std_error_refined,failures,mean_seconds\n";
    for (const RecoveryReport& rep : reports) {
        for (const MethodStats& row : rep.rows) {
            csv << method_name(row.method) << ',' << rep.spec.k << ',' << rep.spec.d << ','
                << rep.spec.n << ',' << rep.spec.m << ',' << rep.spec.block_size << ','
                << rep.spec.trials << ',' << fmt17(row.lambda_used) << ','
                << fmt17(row.mean_error) << ',' << fmt17(row.std_error) << ','
                << fmt17(row.mean_error_refined) << ',' << fmt17(row.std_error_refined) << ','
                << row.failures << ',' << (a.timings ? fmt17(row.mean_seconds) : "") << '\n';
        }
    }
    if (!csv) throw ValidationError("write failed: " + (out / "recovery.csv").string());
    csv.close();

    json report;
    report["command"] = block_suite ? "bench-block" : "bench-snnls";
    {
        const TrialSpec& s = a.base;
        json spec_json = {{"d", s.d},
                          {"n", s.n},
                          {"m", s.m},
                          {"k_list", a.k_list},
                          {"block_size", s.block_size},
                          {"trials", s.trials},
                          {"seed", s.seed},
                          {"lambdas", s.lambdas},
                          {"tau_rl1", s.tau_rl1},
                          {"inner_iters", s.inner_iters},
                          {"outer_cap", s.outer_cap},
                          {"anneal_steps", s.anneal_max_steps},
                          {"noise_sigma", s.noise_sigma},
                          {"refine", s.refine},
                          {"jobs", s.jobs}};
        report["spec"] = spec_json;
    }
    json rows = json::array();
    std::vector<std::string> warnings;
    for (const RecoveryReport& rep : reports) {
        json methods_json = json::array();
        for (const MethodStats& row : rep.rows) {
            json r = {{"method", method_name(row.method)},
                      {"k", rep.spec.k},
                      {"lambda", row.lambda_used},
                      {"mean_error", row.mean_error},
                      {"std_error", row.std_error},
                      {"mean_error_refined", row.mean_error_refined},
                      {"std_error_refined", row.std_error_refined},
                      {"failures", row.failures},
                      {"errors", row.errors},
                      {"errors_refined", row.errors_refined}};
            r["mean_seconds"] = a.timings ? json(row.mean_seconds) : json(nullptr);
            if (row.failures > 0)
                warnings.push_back(std::string(method_name(row.method)) + " at k=" +
                                   std::to_string(rep.spec.k) + ": " +
                                   std::to_string(row.failures) + " failed trials");
            methods_json.push_back(std::move(r));
        }
        rows.push_back(std::move(methods_json));
    }
    report["rows"] = std::move(rows);
    report["runtime_seconds"] = runtime_field(timer, a.timings);
    finalize_report(std::move(report), warnings,
                    out / (block_suite ? "bench_block_report.json" : "bench_snnls_report.json"));

    for (const RecoveryReport& rep : reports)
        for (const MethodStats& row : rep.rows)
            std::cout << method_name(row.method) << " k=" << rep.spec.k
                      << " mean_error=" << fmt17(row.mean_error)
                      << " refined=" << fmt17(row.mean_error_refined)
                      << " lambda=" << fmt17(row.lambda_used) << "\n";
    return 0;
}

// ----------------------------------------------------------------- diag ----

struct DiagArgs {
    std::string x_path, w_path, h_path, outdir = default_outdir();
    std::string prior_name = "rgdp";
    double tau = 0.1, lambda = 0.01, threshold = 1e-6;
    int blocks = 0;
    bool timings = false;
};

int cmd_diag(const DiagArgs& a) {
    Timer timer;
    const NonNegMatrix X = read_matrix(a.x_path);
    const NonNegMatrix W = read_matrix(a.w_path);
    const NonNegMatrix H = read_matrix(a.h_path);
    const PriorSpec prior = make_prior(a.prior_name, a.tau, a.blocks, W.cols());

    const KktReport kkt = kkt_residual(X.mat(), W.mat(), H.mat(), prior, a.lambda);
    const SparsityProfile sp = sparsity_profile(H.mat(), a.threshold);
    const double obj = objective(X.mat(), W.mat(), H.mat(), prior, a.lambda);

    const fs::path out = prepare_outdir(a.outdir);
    {
        std::ofstream csv(out / "sparsity_profile.csv");
        if (!csv)
            throw ValidationError("cannot open file for writing: " +
                                  (out / "sparsity_profile.csv").string());
        csv << "rank,average_magnitude\n";
        for (size_t r = 0; r < sp.average_sorted.size(); ++r)
            csv << (r + 1) << ',' << fmt17(sp.average_sorted[r]) << '\n';
        if (!csv) throw ValidationError("write failed: " + (out / "sparsity_profile.csv").string());
    }

    int max_above = 0;
    double mean_above = 0.0;
    for (int c : sp.above_threshold) {
        max_above = std::max(max_above, c);
        mean_above += c;
    }
    if (!sp.above_threshold.empty()) mean_above /= static_cast<double>(sp.above_threshold.size());

    json report;
    report["command"] = "diag";
    report["inputs"] = {{"x", a.x_path}, {"w", a.w_path}, {"h", a.h_path}};
    report["prior"] = prior_json(a.prior_name, a.tau, a.blocks);
    report["lambda"] = a.lambda;
    report["kkt"] = {{"normalized_residual", kkt.normalized_norm},
                     {"condition_held", kkt.condition_held}};
    report["objective"] = obj;
    report["sparsity"] = {{"threshold", sp.threshold},
                          {"above_threshold", sp.above_threshold},
                          {"max_above_threshold", max_above},
                          {"mean_above_threshold", mean_above}};
    report["runtime_seconds"] = runtime_field(timer, a.timings);
    finalize_report(std::move(report), {}, out / "diag_report.json");

    std::cout << "diag: objective " << fmt17(obj) << ", kkt residual "
              << fmt17(kkt.normalized_norm) << ", max entries above " << fmt17(a.threshold)
              << " per column: " << max_above << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse non-negative least squares and matrix factorization toolkit"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    CLI::App* solve = app.add_subcommand("solve", "sparse NNLS with a fixed dictionary");
    solve->add_option("--x", solve_args.x_path, "data matrix (.mtx/.csv)")->required();
    solve->add_option("--w", solve_args.w_path, "dictionary matrix")->required();
    solve->add_option("--h0", solve_args.h0_path, "initial coefficients (default all-ones)");
    solve->add_option("--prior", solve_args.prior_name,
                      "prior family: rg, exp, rst, rgdp, none, brst, brgdp")
        ->required();
    solve->add_option("--tau", solve_args.tau, "prior shape parameter");
    solve->add_option("--lambda", solve_args.lambda, "regularization weight");
    solve->add_option("--blocks", solve_args.blocks, "contiguous block size (block priors)");
    solve->add_option("--update-rule", solve_args.rule, "general, plain, or l1");
    solve->add_option("--inner-iters", solve_args.inner_iters, "updates per weight refresh");
    solve->add_option("--outer-cap", solve_args.outer_cap, "maximum weight refreshes");
    solve->add_option("--conv-tol", solve_args.conv_tol, "stall threshold (relative)");
    solve->add_option("--zero-tol", solve_args.zero_tol, "zero snapping threshold");
    solve->add_option("--anneal-steps", solve_args.anneal_steps, "annealing ladder steps");
    solve->add_option("--anneal-tau0", solve_args.anneal_tau0, "annealing start tau");
    solve->add_option("--anneal-factor", solve_args.anneal_factor, "annealing division factor");
    solve->add_option("--outdir", solve_args.outdir, "output directory");
    solve->add_flag("--timings", solve_args.timings, "include wall-clock timings in outputs");

    FactorizeArgs fact_args;
    CLI::App* fact = app.add_subcommand("factorize", "sparse NMF (optionally sparse W)");
    fact->add_option("--x", fact_args.x_path, "data matrix (.mtx/.csv)")->required();
    fact->add_option("--rank", fact_args.rank, "inner dimension")->required();
    fact->add_option("--prior-h", fact_args.prior_h, "prior family for H");
    fact->add_option("--prior-w", fact_args.prior_w, "prior family for W (none = plain)");
    fact->add_option("--tau-h", fact_args.tau_h, "shape parameter for H's prior");
    fact->add_option("--tau-w", fact_args.tau_w, "shape parameter for W's prior");
    fact->add_option("--blocks-h", fact_args.blocks_h, "block size for H's prior");
    fact->add_option("--blocks-w", fact_args.blocks_w, "block size for W's prior");
    fact->add_option("--lambda", fact_args.lambda, "regularization weight");
    fact->add_option("--inner-iters", fact_args.inner_iters, "updates per factor pass");
    fact->add_option("--outer-cap", fact_args.outer_cap, "alternation rounds");
    fact->add_option("--conv-tol", fact_args.conv_tol, "stall threshold (relative)");
    fact->add_option("--seed", fact_args.seed, "random warm-start seed");
    fact->add_option("--w0", fact_args.w0_path, "warm-start dictionary file");
    fact->add_option("--h0", fact_args.h0_path, "warm-start coefficients file");
    fact->add_flag("--no-normalize", fact_args.no_normalize, "skip column normalization of W");
    fact->add_option("--outdir", fact_args.outdir, "output directory");
    fact->add_flag("--timings", fact_args.timings, "include wall-clock timings in outputs");

    BenchArgs bench_args;
    CLI::App* bench = app.add_subcommand("bench-snnls", "synthetic sparse recovery benchmark");
    add_bench_options(bench, bench_args, false);

    BenchArgs block_args;
    CLI::App* bench_block = app.add_subcommand("bench-block", "block-sparse recovery benchmark");
    add_bench_options(bench_block, block_args, true);

    DiagArgs diag_args;
    CLI::App* diag = app.add_subcommand("diag", "stationarity and sparsity diagnostics");
    // Long-only help so the coefficient flag --h does not collide with -h.
    diag->set_help_flag("--help", "print help and exit");
    diag->add_option("--x", diag_args.x_path, "data matrix")->required();
    diag->add_option("--w", diag_args.w_path, "dictionary matrix")->required();
    diag->add_option("--h", diag_args.h_path, "coefficient matrix")->required();
    diag->add_option("--prior", diag_args.prior_name, "prior family")->required();
    diag->add_option("--tau", diag_args.tau, "prior shape parameter");
    diag->add_option("--lambda", diag_args.lambda, "regularization weight");
    diag->add_option("--blocks", diag_args.blocks, "contiguous block size (block priors)");
    diag->add_option("--threshold", diag_args.threshold, "sparsity count threshold");
    diag->add_option("--outdir", diag_args.outdir, "output directory");
    diag->add_flag("--timings", diag_args.timings, "include wall-clock timings in outputs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (solve->parsed()) return cmd_solve(solve_args);
        if (fact->parsed()) return cmd_factorize(fact_args);
        if (bench->parsed()) return cmd_bench(bench_args, false);
        if (bench_block->parsed()) return cmd_bench(block_args, true);
        if (diag->parsed()) return cmd_diag(diag_args);
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 3;
    }
}
