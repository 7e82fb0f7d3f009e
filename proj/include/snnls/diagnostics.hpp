#pragma once

#include "snnls/matrix.hpp"
#include "snnls/priors.hpp"

#include <vector>

namespace snnls {

// First-order stationarity check for the penalized problem
//   min_{H >= 0} ||X - WH||_F^2 + 2*lambda*neg_log_prior(H).
// residual_matrix holds min(H, W'WH - W'X + lambda*Omega(H).*H^(z-1))
// entry-wise; every entry of a stationary point is 0. normalized_norm is
// the mean absolute value over all entries.
struct KktReport {
    Matrix residual_matrix;
    double normalized_norm = 0.0;
    // Finite form of the stationarity precondition: z = 1 and
    // tau * max(W'X) <= lambda. The z = 2 form is asymptotic in tau and
    // never reports true.
    bool condition_held = false;

    KktReport() : residual_matrix(1, 1) {}
};

KktReport kkt_residual(const Matrix& X, const Matrix& W, const Matrix& H, const PriorSpec& prior,
                       double lambda);

// Per-rank coefficient magnitudes: entry r of average_sorted is the r'th
// largest magnitude of a column, averaged over columns. above_threshold
// counts entries exceeding the threshold per column.
struct SparsityProfile {
    std::vector<double> average_sorted;
    std::vector<int> above_threshold;
    double threshold = 1e-6;
};

SparsityProfile sparsity_profile(const Matrix& H, double threshold = 1e-6);

// EM surrogate tangent to the objective at Ht:
//   ||X - WH||_F^2 + 2*lambda*(nlp(Ht) + sum (Omega(Ht)/z) .* (H^z - Ht^z)).
// Equals objective(H) exactly at H = Ht and upper-bounds it elsewhere;
// one multiplicative update never increases it.
double q_function(const Matrix& H, const Matrix& Ht, const Matrix& X, const Matrix& W,
                  const PriorSpec& prior, double lambda);

}  // namespace snnls
