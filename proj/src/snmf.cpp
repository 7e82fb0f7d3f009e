#include "snnls/snmf.hpp"

#include "snnls/diagnostics.hpp"
#include "snnls/matcore.hpp"

#include <cmath>

namespace snnls {

double snmf_objective(const Matrix& X, const Matrix& W, const Matrix& H, const PriorSpec& prior_w,
                      const PriorSpec& prior_h, double lambda) {
    if (lambda < 0.0) throw ValidationError("snmf_objective: lambda must be non-negative");
    for (size_t e = 0; e < W.size(); ++e)
        if (!std::isfinite(W.data()[e]) || W.data()[e] < 0.0)
            throw ValidationError("snmf_objective: W entries must be finite and non-negative");
    for (size_t e = 0; e < H.size(); ++e)
        if (!std::isfinite(H.data()[e]) || H.data()[e] < 0.0)
            throw ValidationError("snmf_objective: H entries must be finite and non-negative");
    return residual_sum_squares(X, W, H) +
           2.0 * lambda * (neg_log_prior(prior_w, W) + neg_log_prior(prior_h, H));
}

namespace {

Matrix ones_matrix(int r, int c) { return Matrix(r, c, 1.0); }

double rel_change(const Matrix& now, const Matrix& before) {
    double dsq = 0.0, bsq = 0.0;
    for (size_t e = 0; e < now.size(); ++e) {
        const double diff = now.data()[e] - before.data()[e];
        dsq += diff * diff;
        bsq += before.data()[e] * before.data()[e];
    }
    if (bsq > 0.0) return std::sqrt(dsq / bsq);
    return dsq > 0.0 ? INFINITY : 0.0;
}

}  // namespace

FactorizationResult snmf_solve(const NonNegMatrix& X_, int n, const PriorSpec& prior_h,
                               const PriorSpec& prior_w, const SolverConfig& config,
                               const SnmfOptions& opts) {
    config.validate();
    if (n < 1) throw ValidationError("snmf_solve: dictionary size must be at least 1");
    if (opts.outer_cap < 1) throw ValidationError("snmf_solve: outer_cap must be at least 1");
    if (config.anneal && config.anneal->max_steps > 0)
        throw ValidationError("snmf_solve: annealing schedules apply to the fixed-dictionary solver");
    const Matrix& X = X_.mat();
    const int d = X.rows(), m = X.cols();
    prior_h.validate(n);
    prior_w.validate(n);

    Matrix W = opts.w0 ? *opts.w0 : ones_matrix(d, n);
    Matrix H = opts.h0 ? *opts.h0 : ones_matrix(n, m);
    if (W.rows() != d || W.cols() != n)
        throw ValidationError("snmf_solve: w0 shape " + W.shape() + " must be " +
                              Matrix::shape_str(d, n));
    if (H.rows() != n || H.cols() != m)
        throw ValidationError("snmf_solve: h0 shape " + H.shape() + " must be " +
                              Matrix::shape_str(n, m));

    // Each factor update is one outer pass of the sparse solver.
    SolverConfig sub = config;
    sub.outer_cap = 1;
    sub.anneal.reset();

    const Matrix XT = transpose(X);
    const NonNegMatrix nnX{Matrix(X)};
    const NonNegMatrix nnXT{Matrix(XT)};

    FactorizationResult res;
    res.objective_trace.push_back(snmf_objective(X, W, H, prior_w, prior_h, config.lambda));

    for (int t = 0; t < opts.outer_cap; ++t) {
        const Matrix Wbefore = W;
        const Matrix Hbefore = H;

        // W step on the transposed problem: rows of X against dictionary H^T.
        {
            SolverResult rw = snnls_solve(nnXT, NonNegMatrix(transpose(H)),
                                          NonNegMatrix(transpose(W)), prior_w, sub);
            W = transpose(rw.H);
        }
        res.objective_trace.push_back(snmf_objective(X, W, H, prior_w, prior_h, config.lambda));

        if (opts.normalize_w) {
            const std::vector<double> scales = normalize_columns(W);
            for (int i = 0; i < n; ++i) {
                if (scales[i] <= 0.0) continue;
                double* hrow = H.row_ptr(i);
                for (int j = 0; j < m; ++j) hrow[j] *= scales[i];
            }
        }

        // H step on the direct problem with the fresh dictionary.
        {
            SolverResult rh = snnls_solve(nnX, NonNegMatrix(Matrix(W)), NonNegMatrix(Matrix(H)),
                                          prior_h, sub);
            H = rh.H;
        }
        res.objective_trace.push_back(snmf_objective(X, W, H, prior_w, prior_h, config.lambda));

        res.outer_iters = t + 1;
        if (rel_change(W, Wbefore) < config.conv_tol && rel_change(H, Hbefore) < config.conv_tol) {
            res.converged = true;
            break;
        }
    }

    res.W = W;
    res.H = H;
    res.kkt_h = kkt_residual(X, W, H, prior_h, config.lambda).normalized_norm;
    res.kkt_w =
        kkt_residual(XT, transpose(H), transpose(W), prior_w, config.lambda).normalized_norm;
    if (!res.converged)
        res.warnings.push_back("alternation cap reached before both factors stalled");
    return res;
}

}  // namespace snnls
