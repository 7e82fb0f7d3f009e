#pragma once

#include "snnls/blocks.hpp"
#include "snnls/matrix.hpp"
#include "snnls/priors.hpp"
#include "snnls/solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace snnls {

// Deterministic 64-bit generator (splitmix64) with explicit uniform /
// Box-Muller normal transforms. Independent of library distribution
// internals, so generated problems are stable across toolchains.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}
    uint64_t next();
    double uniform();            // [0, 1)
    double normal();             // standard normal, pairwise Box-Muller
    int uniform_int(int bound);  // {0, ..., bound-1}, rejection sampled (no modulo bias)

private:
    uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Decorrelated per-stream seed derived from a master seed.
uint64_t mix_seed(uint64_t master, uint64_t stream);

// d x n dictionary: |N(0,1)| entries, columns scaled to unit l2 norm.
NonNegMatrix gen_dictionary(int d, int n, uint64_t seed);

// n x m codes, each column k-sparse with |N(0,1)| values on a uniformly
// chosen support, scaled to unit l2 norm. With a block structure, k whole
// blocks are activated per column instead of k scalar entries.
NonNegMatrix gen_sparse_codes(int n, int m, int k, uint64_t seed,
                              const BlockStructure* blocks = nullptr);

enum class Method { RL2, RL1, L1, BRST, BRGDP, NNBOMP };
const char* method_name(Method m);
Method method_from_name(const std::string& name);

struct TrialSpec {
    int d = 100;
    int n = 400;
    int m = 20;
    int k = 10;          // active entries (scalar) or active blocks (block runs)
    int block_size = 0;  // 0: scalar sparsity; >0: contiguous blocks of this size
    int trials = 10;
    uint64_t seed = 1;
    std::vector<double> lambdas{1e-3, 1e-2, 1e-1};  // swept; best row is reported
    double tau_rl1 = 0.1;
    int inner_iters = 2000;
    int outer_cap = 50;
    int anneal_max_steps = 7;
    double noise_sigma = 0.0;  // additive rectified Gaussian noise on X (0 = noiseless)
    bool refine = true;        // top-k polish using the true sparsity level
    int jobs = 1;
    std::vector<Method> methods;  // empty: defaults for the run kind

    void validate() const;
};

struct MethodStats {
    Method method = Method::RL2;
    double lambda_used = 0.0;  // winning value from the sweep (0 for pursuit methods)
    double mean_error = 0.0;
    double std_error = 0.0;
    double mean_error_refined = 0.0;
    double std_error_refined = 0.0;
    double mean_seconds = 0.0;
    int failures = 0;
    std::vector<double> errors;          // per trial, NaN on failure
    std::vector<double> errors_refined;  // per trial, NaN on failure or refine off
};

struct RecoveryReport {
    TrialSpec spec;
    std::vector<MethodStats> rows;
};

// Synthetic exact-recovery benchmark: per trial draws (W, H*), forms
// X = W H* (+ optional rectified noise), runs every requested method on the
// same data, and scores relative Frobenius error of the code estimate.
// Failures are recorded per trial, never fatal. Aggregation order is fixed
// regardless of the number of worker threads.
RecoveryReport run_recovery_suite(const TrialSpec& spec);

// Solve with a reheating schedule attached (tau ladder handled inside the
// solver); convenience wrapper so callers do not mutate configs in place.
SolverResult anneal_driver(const NonNegMatrix& X, const NonNegMatrix& W, const NonNegMatrix& H0,
                           const PriorSpec& prior, SolverConfig config,
                           const AnnealSchedule& schedule);

}  // namespace snnls
