#pragma once

#include "snnls/blocks.hpp"
#include "snnls/matrix.hpp"

#include <vector>

namespace snnls {

// min ||x - A s||_2 via Householder QR; requires rows >= cols and full
// column rank (throws NumericalError on a vanishing pivot).
std::vector<double> lstsq(const Matrix& A, const std::vector<double>& x);

// Active-set non-negative least squares (Lawson-Hanson):
// argmin_{h >= 0} ||x - W h||_2^2. Terminates when every passive-set
// gradient entry is within tol (scaled by max(1, ||W'x||_inf)) of
// optimality. Throws NumericalError if the active-set iteration cap is
// exceeded (degenerate dictionaries).
std::vector<double> nnls_active_set(const std::vector<double>& x, const Matrix& W,
                                    double tol = 1e-10);

struct BompResult {
    std::vector<int> blocks;    // selected block ids in selection order
    std::vector<double> coeffs; // length n, zero off the accumulated support
    double residual_norm = 0.0;
};

// Greedy block pursuit: each round picks the block maximizing the l2 norm
// of the rectified correlations max(W'r, 0) restricted to the block, then
// refits with NNLS on the accumulated support. Singleton blocks reduce it
// to plain non-negative OMP. Stops early if no block has positive
// correlation left.
BompResult nn_bomp(const std::vector<double>& x, const Matrix& W, const BlockStructure& blocks,
                   int k);

// Per column: keep the k largest entries, zero the rest, then iterate the
// plain multiplicative rule on the survivors until every relative change
// drops below conv_tol. Output has at most k nonzeros per column.
Matrix topk_refine(const Matrix& Hhat, int k, const Matrix& X, const Matrix& W,
                   double conv_tol = 1e-9, double floor = 1e-12);

// Block-granular variant: keeps the k blocks with the largest l2 energy
// per column before the same on-support refit.
Matrix topk_block_refine(const Matrix& Hhat, int k, const BlockStructure& blocks, const Matrix& X,
                         const Matrix& W, double conv_tol = 1e-9, double floor = 1e-12);

}  // namespace snnls
