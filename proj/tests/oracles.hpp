#pragma once

// Reference implementations used only by tests. Everything here is written
// independently of the library's solver path: naive triple-loop products,
// direct penalty formulas, and a projected-gradient minimizer with an Armijo
// line search. Only the Matrix container is shared.

#include "snnls/matrix.hpp"

#include <functional>
#include <vector>

namespace oracle {

snnls::Matrix matmul(const snnls::Matrix& a, const snnls::Matrix& b);
snnls::Matrix matmul_at_b(const snnls::Matrix& a, const snnls::Matrix& b);  // a' * b

enum class PenaltyKind {
    None,         // 0
    L1,           // sum h
    Ridge,        // sum h^2 / tau
    LogSquare,    // (tau+1) * sum log(tau + h^2)
    LogAbs,       // (tau+1) * sum log(tau + h)
    BlockLogSquare,  // (tau+1) * sum_b log(tau + ||h_b||_2^2) per column
    BlockLogAbs,     // (tau+1) * sum_b log(tau + ||h_b||_1) per column
};

struct Penalty {
    PenaltyKind kind = PenaltyKind::None;
    double tau = 1.0;
    std::vector<std::vector<int>> groups;  // block kinds only
};

double penalty_value(const Penalty& p, const snnls::Matrix& h);
snnls::Matrix penalty_gradient(const Penalty& p, const snnls::Matrix& h);

// ||x - w h||_F^2 + 2 * lambda * penalty_value(h)
double objective(const snnls::Matrix& x, const snnls::Matrix& w, const snnls::Matrix& h,
                 const Penalty& p, double lambda);
snnls::Matrix objective_gradient(const snnls::Matrix& x, const snnls::Matrix& w,
                                 const snnls::Matrix& h, const Penalty& p, double lambda);

// Projected gradient descent with adaptive-step Armijo backtracking over
// {h >= 0}. Returns the final iterate.
snnls::Matrix projected_gradient_min(const snnls::Matrix& x, const snnls::Matrix& w,
                                     const snnls::Matrix& h0, const Penalty& p, double lambda,
                                     int max_iters = 200000, double tol = 1e-13);

// Convex specialization for plain NNLS on a single column.
std::vector<double> nnls_pg(const std::vector<double>& x, const snnls::Matrix& w,
                            int max_iters = 500000, double tol = 1e-14);

// Central finite difference of f at x.
double central_diff(const std::function<double(double)>& f, double x, double step);

}  // namespace oracle
