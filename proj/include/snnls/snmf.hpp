#pragma once

#include "snnls/matrix.hpp"
#include "snnls/priors.hpp"
#include "snnls/solver.hpp"

#include <optional>

namespace snnls {

struct FactorizationResult {
    Matrix W;
    Matrix H;
    // Interleaved objective values: the initial point, then one entry
    // after each factor update (W, H, W, H, ...). Non-increasing within
    // 1e-10 relative slack when column normalization is disabled;
    // normalization rescales the factors and can move the penalty terms.
    std::vector<double> objective_trace;
    int outer_iters = 0;
    double kkt_w = 0.0; // transposed-problem residual for the final W
    double kkt_h = 0.0; // residual for the final H
    bool converged = false;
    std::vector<std::string> warnings;

    FactorizationResult() : W(1, 1), H(1, 1) {}
};

struct SnmfOptions {
    int outer_cap = 200;     // alternation rounds
    bool normalize_w = true; // rescale W columns to unit l2 after each W update
    // Warm starts; all-ones when absent. Note the all-ones start is a
    // symmetric point: every dictionary atom receives identical updates
    // until sparsity breaks the tie, so rank > 1 structure emerges slowly.
    std::optional<Matrix> w0;
    std::optional<Matrix> h0;
};

// ||X - WH||_F^2 + 2*lambda*(nlp(prior_w, W) + nlp(prior_h, H)); the joint
// objective both alternating updates descend. A noninformative prior_w
// contributes nothing (the plain factorization setting).
double snmf_objective(const Matrix& X, const Matrix& W, const Matrix& H, const PriorSpec& prior_w,
                      const PriorSpec& prior_h, double lambda);

// Block-coordinate factorization: alternately solves the transposed
// problem for W (dictionary: the current H) and the direct problem for H
// (dictionary: the fresh W), each as a single outer pass of the sparse
// solver with config.inner_iters updates. Stops when both factors stall
// (relative Frobenius change below config.conv_tol) or at opts.outer_cap.
FactorizationResult snmf_solve(const NonNegMatrix& X, int n, const PriorSpec& prior_h,
                               const PriorSpec& prior_w, const SolverConfig& config,
                               const SnmfOptions& opts = {});

}  // namespace snnls
