#pragma once

#include "snnls/matrix.hpp"

#include <vector>

namespace snnls {

// C = A * B, or A^T * B when transpose_a. Fixed sequential accumulation
// order over the inner dimension; repeated runs are bit-identical.
Matrix gemm(const Matrix& a, const Matrix& b, bool transpose_a = false);

// Element-wise num ./ max(den, floor). Shapes must match.
Matrix hadamard_quotient(const Matrix& num, const Matrix& den, double floor = 1e-12);

// ||a - ref||_F / ||ref||_F. Throws on shape mismatch or zero reference.
double rel_frobenius_error(const Matrix& a, const Matrix& ref);

// Scales each column to unit l2 norm in place; returns the original norms.
// Zero columns are left untouched (scale recorded as 0).
std::vector<double> normalize_columns(Matrix& m);

// ||x - w*h||_F^2 with sequential accumulation.
double residual_sum_squares(const Matrix& x, const Matrix& w, const Matrix& h);

// Sequential reductions (deterministic order).
double frobenius_norm_sq(const Matrix& m);
double dot(const double* a, const double* b, int len);
double sum_abs(const Matrix& m);
double max_abs(const Matrix& m);
double max_entry(const Matrix& m);

}  // namespace snnls
