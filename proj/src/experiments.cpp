#include "snnls/experiments.hpp"

#include "snnls/baselines.hpp"
#include "snnls/matcore.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

namespace snnls {

uint64_t Rng::next() {
    // splitmix64
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]: log stays finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

int Rng::uniform_int(int bound) {
    if (bound <= 0) throw ValidationError("Rng::uniform_int: bound must be positive");
    const uint64_t b = static_cast<uint64_t>(bound);
    // Reject the incomplete top range so every residue is equally likely.
    const uint64_t limit = UINT64_MAX - UINT64_MAX % b;
    uint64_t r;
    do {
        r = next();
    } while (r >= limit);
    return static_cast<int>(r % b);
}

uint64_t mix_seed(uint64_t master, uint64_t stream) {
    Rng r(master ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
    return r.next();
}

NonNegMatrix gen_dictionary(int d, int n, uint64_t seed) {
    if (d < 1 || n < 1) throw ValidationError("gen_dictionary: dimensions must be positive");
    Rng rng(seed);
    Matrix w(d, n);
    for (int r = 0; r < d; ++r) {
        double* row = w.row_ptr(r);
        for (int c = 0; c < n; ++c) row[c] = std::fabs(rng.normal());
    }
    normalize_columns(w);
    return NonNegMatrix(std::move(w));
}

NonNegMatrix gen_sparse_codes(int n, int m, int k, uint64_t seed, const BlockStructure* blocks) {
    if (n < 1 || m < 1) throw ValidationError("gen_sparse_codes: dimensions must be positive");
    if (k < 0) throw ValidationError("gen_sparse_codes: k must be non-negative");
    const int units = blocks ? blocks->num_blocks() : n;
    if (blocks && blocks->n() != n)
        throw ValidationError("gen_sparse_codes: block structure covers " +
                              std::to_string(blocks->n()) + " rows, codes have " +
                              std::to_string(n));
    if (k > units)
        throw ValidationError("gen_sparse_codes: k=" + std::to_string(k) +
                              " exceeds available supports " + std::to_string(units));
    Rng rng(seed);
    Matrix h(n, m);
    std::vector<int> idx(units);
    for (int j = 0; j < m; ++j) {
        std::iota(idx.begin(), idx.end(), 0);
        // Partial Fisher-Yates: first k slots are a uniform k-subset.
        for (int t = 0; t < k; ++t) std::swap(idx[t], idx[t + rng.uniform_int(units - t)]);
        std::vector<int> chosen(idx.begin(), idx.begin() + k);
        std::sort(chosen.begin(), chosen.end());
        std::vector<int> support;
        if (blocks) {
            for (int b : chosen)
                for (int i : blocks->group(b)) support.push_back(i);
            std::sort(support.begin(), support.end());
        } else {
            support = chosen;
        }
        double norm_sq = 0.0;
        for (int i : support) {
            const double v = std::fabs(rng.normal());
            h(i, j) = v;
            norm_sq += v * v;
        }
        if (norm_sq > 0.0) {
            const double inv = 1.0 / std::sqrt(norm_sq);
            for (int i : support) h(i, j) *= inv;
        }
    }
    return NonNegMatrix(std::move(h));
}

const char* method_name(Method m) {
    switch (m) {
        case Method::RL2: return "rl2";
        case Method::RL1: return "rl1";
        case Method::L1: return "l1";
        case Method::BRST: return "brst";
        case Method::BRGDP: return "brgdp";
        case Method::NNBOMP: return "nnbomp";
    }
    throw ValidationError("method_name: unknown method");
}

Method method_from_name(const std::string& name) {
    if (name == "rl2") return Method::RL2;
    if (name == "rl1") return Method::RL1;
    if (name == "l1") return Method::L1;
    if (name == "brst") return Method::BRST;
    if (name == "brgdp") return Method::BRGDP;
    if (name == "nnbomp") return Method::NNBOMP;
    throw ValidationError("unknown method '" + name +
                          "' (expected rl2, rl1, l1, brst, brgdp or nnbomp)");
}

void TrialSpec::validate() const {
    if (d < 1 || n < 1 || m < 1)
        throw ValidationError("TrialSpec: d, n, m must be positive");
    if (k < 0) throw ValidationError("TrialSpec: k must be non-negative");
    if (trials < 1) throw ValidationError("TrialSpec: trials must be at least 1");
    if (jobs < 1) throw ValidationError("TrialSpec: jobs must be at least 1");
    if (inner_iters < 1) throw ValidationError("TrialSpec: inner_iters must be at least 1");
    if (outer_cap < 1) throw ValidationError("TrialSpec: outer_cap must be at least 1");
    if (anneal_max_steps < 0) throw ValidationError("TrialSpec: anneal_max_steps must be >= 0");
    if (lambdas.empty()) throw ValidationError("TrialSpec: lambda sweep must be non-empty");
    for (double l : lambdas)
        if (!(l >= 0.0) || !std::isfinite(l))
            throw ValidationError("TrialSpec: lambda values must be finite and non-negative");
    if (!(tau_rl1 > 0.0)) throw ValidationError("TrialSpec: tau_rl1 must be positive");
    if (!(noise_sigma >= 0.0)) throw ValidationError("TrialSpec: noise_sigma must be >= 0");
    if (block_size < 0) throw ValidationError("TrialSpec: block_size must be >= 0");
    if (block_size > 0 && n % block_size != 0)
        throw ValidationError("TrialSpec: block_size must divide n");
    const int units = block_size > 0 ? n / block_size : n;
    if (k > units)
        throw ValidationError("TrialSpec: k=" + std::to_string(k) +
                              " infeasible for " + std::to_string(units) + " support units");
    for (Method mth : methods) {
        const bool block_method =
            mth == Method::BRST || mth == Method::BRGDP;
        if (block_method && block_size == 0)
            throw ValidationError(std::string("TrialSpec: method ") + method_name(mth) +
                                  " requires block_size > 0");
    }
}

namespace {

// ||a - ref||_F / ||ref||_F, with the all-zero reference handled explicitly
// (0 when the estimate is also zero, inf otherwise).
double recovery_error(const Matrix& a, const Matrix& ref) {
    double diff = 0.0;
    double base = 0.0;
    for (int i = 0; i < ref.rows(); ++i)
        for (int j = 0; j < ref.cols(); ++j) {
            const double d = a(i, j) - ref(i, j);
            diff += d * d;
            base += ref(i, j) * ref(i, j);
        }
    if (base == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(diff) / std::sqrt(base);
}

struct TaskResult {
    double error = std::numeric_limits<double>::quiet_NaN();
    double error_refined = std::numeric_limits<double>::quiet_NaN();
    double seconds = 0.0;
    bool failed = false;
};

Matrix solve_one(const TrialSpec& spec, Method method, double lambda, const BlockStructure* blocks,
                 const NonNegMatrix& W, const NonNegMatrix& X) {
    if (method == Method::NNBOMP) {
        Matrix h(spec.n, spec.m);
        if (spec.k > 0) {
            const BlockStructure singletons =
                blocks ? *blocks : BlockStructure::contiguous(spec.n, 1);
            std::vector<double> x(spec.d);
            for (int j = 0; j < spec.m; ++j) {
                for (int r = 0; r < spec.d; ++r) x[r] = X(r, j);
                const BompResult res = nn_bomp(x, W.mat(), singletons, spec.k);
                for (int i = 0; i < spec.n; ++i) h(i, j) = res.coeffs[i];
            }
        }
        return h;
    }
    SolverConfig cfg;
    cfg.lambda = lambda;
    cfg.inner_iters = spec.inner_iters;
    cfg.outer_cap = spec.outer_cap;
    PriorSpec prior;
    switch (method) {
        case Method::RL2:
            prior.family = PriorFamily::RST;
            prior.tau = 1.0;
            break;
        case Method::RL1:
            prior.family = PriorFamily::RGDP;
            prior.tau = spec.tau_rl1;
            break;
        case Method::L1:
            prior.family = PriorFamily::Exponential;
            prior.tau = 1.0;
            break;
        case Method::BRST:
            prior.family = PriorFamily::BlockRST;
            prior.tau = 1.0;
            prior.blocks = *blocks;
            break;
        case Method::BRGDP:
            prior.family = PriorFamily::BlockRGDP;
            prior.tau = spec.tau_rl1;
            prior.blocks = *blocks;
            break;
        case Method::NNBOMP: break;  // handled above
    }
    const bool annealed = (method == Method::RL2 || method == Method::BRST);
    if (annealed && spec.anneal_max_steps > 0) {
        AnnealSchedule sched;
        sched.tau0 = 1.0;
        sched.factor = 10.0;
        sched.max_steps = spec.anneal_max_steps;
        cfg.anneal = sched;
    }
    return snnls_solve(X, W, prior, cfg).H;
}

TaskResult run_task(const TrialSpec& spec, Method method, double lambda,
                    const BlockStructure* blocks, int trial) {
    TaskResult out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const uint64_t wseed = mix_seed(spec.seed, 4ULL * trial);
        const uint64_t hseed = mix_seed(spec.seed, 4ULL * trial + 1);
        const NonNegMatrix W = gen_dictionary(spec.d, spec.n, wseed);
        const NonNegMatrix Hstar = gen_sparse_codes(spec.n, spec.m, spec.k, hseed, blocks);
        Matrix Xm = gemm(W.mat(), Hstar.mat());
        if (spec.noise_sigma > 0.0) {
            Rng noise(mix_seed(spec.seed, 4ULL * trial + 2));
            for (int i = 0; i < Xm.rows(); ++i)
                for (int j = 0; j < Xm.cols(); ++j)
                    Xm(i, j) = std::max(0.0, Xm(i, j) + spec.noise_sigma * noise.normal());
        }
        const NonNegMatrix X(std::move(Xm));

        const Matrix Hhat = solve_one(spec, method, lambda, blocks, W, X);
        out.error = recovery_error(Hhat, Hstar.mat());
        if (spec.refine && spec.k > 0) {
            const Matrix refined =
                blocks ? topk_block_refine(Hhat, spec.k, *blocks, X.mat(), W.mat())
                       : topk_refine(Hhat, spec.k, X.mat(), W.mat());
            out.error_refined = recovery_error(refined, Hstar.mat());
        } else {
            out.error_refined = out.error;
        }
    } catch (const std::exception&) {
        out.failed = true;
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

struct SweepStats {
    double mean = std::numeric_limits<double>::infinity();
    double stdev = 0.0;
    double mean_refined = std::numeric_limits<double>::infinity();
    double stdev_refined = 0.0;
    double mean_seconds = 0.0;
    int failures = 0;
};

SweepStats aggregate(const std::vector<TaskResult>& results) {
    SweepStats s;
    std::vector<double> errs, errs_ref;
    double secs = 0.0;
    for (const TaskResult& r : results) {
        secs += r.seconds;
        if (r.failed) {
            ++s.failures;
            continue;
        }
        errs.push_back(r.error);
        errs_ref.push_back(r.error_refined);
    }
    s.mean_seconds = results.empty() ? 0.0 : secs / static_cast<double>(results.size());
    auto mean_std = [](const std::vector<double>& v, double& mean, double& stdev) {
        if (v.empty()) return;
        double acc = 0.0;
        for (double x : v) acc += x;
        mean = acc / static_cast<double>(v.size());
        if (v.size() > 1) {
            double sq = 0.0;
            for (double x : v) sq += (x - mean) * (x - mean);
            stdev = std::sqrt(sq / static_cast<double>(v.size() - 1));
        } else {
            stdev = 0.0;
        }
    };
    mean_std(errs, s.mean, s.stdev);
    mean_std(errs_ref, s.mean_refined, s.stdev_refined);
    return s;
}

}  // namespace

RecoveryReport run_recovery_suite(const TrialSpec& spec_in) {
    TrialSpec spec = spec_in;
    spec.validate();
    if (spec.methods.empty()) {
        spec.methods = spec.block_size > 0
                           ? std::vector<Method>{Method::BRST, Method::BRGDP, Method::NNBOMP}
                           : std::vector<Method>{Method::RL2, Method::RL1, Method::L1};
        spec.validate();
    }
    std::optional<BlockStructure> blocks;
    if (spec.block_size > 0) blocks = BlockStructure::contiguous(spec.n, spec.block_size);
    const BlockStructure* bptr = blocks ? &*blocks : nullptr;

    struct Task {
        size_t method_idx;
        size_t lambda_idx;
        int trial;
    };
    std::vector<Task> tasks;
    for (size_t mi = 0; mi < spec.methods.size(); ++mi) {
        // Pursuit methods ignore lambda: run the sweep's first cell only.
        const size_t nl = spec.methods[mi] == Method::NNBOMP ? 1 : spec.lambdas.size();
        for (size_t li = 0; li < nl; ++li)
            for (int t = 0; t < spec.trials; ++t) tasks.push_back({mi, li, t});
    }
    std::vector<TaskResult> slots(tasks.size());
    std::atomic<size_t> cursor{0};
    auto worker = [&]() {
        while (true) {
            const size_t at = cursor.fetch_add(1);
            if (at >= tasks.size()) break;
            const Task& tk = tasks[at];
            slots[at] = run_task(spec, spec.methods[tk.method_idx], spec.lambdas[tk.lambda_idx],
                                 bptr, tk.trial);
        }
    };
    const int nthreads = std::min<int>(spec.jobs, static_cast<int>(tasks.size()));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    // Sequential reduction in task order: thread count never changes output.
    RecoveryReport report;
    report.spec = spec;
    size_t base = 0;
    for (size_t mi = 0; mi < spec.methods.size(); ++mi) {
        const Method method = spec.methods[mi];
        const size_t nl = method == Method::NNBOMP ? 1 : spec.lambdas.size();
        size_t best_li = 0;
        SweepStats best;
        std::vector<TaskResult> best_results;
        for (size_t li = 0; li < nl; ++li) {
            std::vector<TaskResult> cell(slots.begin() + base + li * spec.trials,
                                         slots.begin() + base + (li + 1) * spec.trials);
            const SweepStats st = aggregate(cell);
            const double key = spec.refine ? st.mean_refined : st.mean;
            const double best_key = spec.refine ? best.mean_refined : best.mean;
            if (li == 0 || key < best_key) {
                best = st;
                best_li = li;
                best_results = std::move(cell);
            }
        }
        base += nl * spec.trials;

        MethodStats row;
        row.method = method;
        row.lambda_used = method == Method::NNBOMP ? 0.0 : spec.lambdas[best_li];
        row.mean_error = best.mean;
        row.std_error = best.stdev;
        row.mean_error_refined = best.mean_refined;
        row.std_error_refined = best.stdev_refined;
        row.mean_seconds = best.mean_seconds;
        row.failures = best.failures;
        for (const TaskResult& r : best_results) {
            row.errors.push_back(r.failed ? std::numeric_limits<double>::quiet_NaN() : r.error);
            row.errors_refined.push_back(
                r.failed ? std::numeric_limits<double>::quiet_NaN() : r.error_refined);
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

SolverResult anneal_driver(const NonNegMatrix& X, const NonNegMatrix& W, const NonNegMatrix& H0,
                           const PriorSpec& prior, SolverConfig config,
                           const AnnealSchedule& schedule) {
    config.anneal = schedule;
    return snnls_solve(X, W, H0, prior, config);
}

}  // namespace snnls
