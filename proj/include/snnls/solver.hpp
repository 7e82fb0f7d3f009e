#pragma once

#include "snnls/matrix.hpp"
#include "snnls/priors.hpp"

#include <optional>
#include <string>
#include <vector>

namespace snnls {

// Which multiplicative rule the engine applies. GeneralMur derives the
// denominator penalty from the configured prior and covers every family.
// The other two are fixed classical rules: PlainNmf is the bare
// H .* (W'X) ./ (W'WH) iteration and L1 adds a constant lambda to the
// denominator. They behave exactly like GeneralMur with a noninformative
// or exponential prior substituted, and exist so callers can request the
// classical rules without constructing a prior.
enum class UpdateRule { GeneralMur, PlainNmf, L1 };

const char* update_rule_name(UpdateRule r);
UpdateRule update_rule_from_name(const std::string& name);

// Staged reduction of tau during a solve. Whenever every column of the
// iterate changes by less than sqrt(tau)/100 in relative l2 norm between
// consecutive outer iterations, tau is divided by `factor`, at most
// `max_steps` times. max_steps = 0 disables the schedule entirely.
struct AnnealSchedule {
    double tau0 = 1.0;
    double factor = 10.0;
    int max_steps = 0;

    void validate() const;
};

struct SolverConfig {
    double lambda = 1e-2;
    int inner_iters = 1;    // MUR applications per weight refresh
    int outer_cap = 1000;   // maximum weight refreshes; <= 0 means unbounded
    double conv_tol = 1e-9; // relative change below which an entry stalls
    double zero_tol = 1e-12; // entries below this snap to exact 0
    double floor = 1e-12;    // denominator guard
    UpdateRule update_rule = UpdateRule::GeneralMur;
    std::optional<AnnealSchedule> anneal;

    void validate() const;
};

struct SolverResult {
    Matrix H;
    std::vector<double> objective_trace; // one entry per outer iteration
    double kkt_residual = 0.0;           // final normalized residual
    int iterations = 0;                  // outer iterations executed
    std::vector<int> active_history;     // coordinates pruned per outer iteration
    bool converged = false;              // pruned set emptied before the cap
    // True when the finite stationarity precondition z = 1 and
    // tau <= lambda / max(W'X) held at the final tau. The z = 2 analogue is
    // asymptotic (tau -> 0) and never reports true.
    bool stationarity_condition_held = false;
    std::vector<double> anneal_taus;       // tau after each schedule step
    std::vector<size_t> anneal_boundaries; // trace indices where tau changed
    std::vector<std::string> warnings;

    SolverResult() : H(1, 1) {}
};

// One simultaneous multiplicative update on the active coordinates:
//   out = Hs .* (W'X) ./ (W'W Hs + lambda * omega .* Hs^(z-1))
// entries outside `active` (when given) are copied unchanged. Exposed for
// tests; the solver applies the same arithmetic internally.
Matrix mur_step(const Matrix& W, const Matrix& X, const Matrix& Hs, const Matrix& omega, int z,
                double lambda, const std::vector<uint8_t>* active = nullptr,
                double floor = 1e-12);

// Penalized least-squares objective. The penalty enters with weight
// 2*lambda so that its half-gradient is exactly
// W'WH - W'X + lambda * weight_matrix(H) .* H^(z-1), the quantity the
// multiplicative rule and the KKT residual are built from; with this
// scaling the rule decreases the objective monotonically.
double objective(const Matrix& X, const Matrix& W, const Matrix& H, const PriorSpec& prior,
                 double lambda);

// Double-loop solver: the outer loop refreshes the prior weights at the
// current iterate, the inner loop applies `inner_iters` multiplicative
// updates over a shrinking coordinate set. Coordinates that hit exact zero
// or stall leave the inner working set for the rest of the pass and leave
// the outer set permanently (an anneal step re-admits positive ones).
SolverResult snnls_solve(const NonNegMatrix& X, const NonNegMatrix& W, const NonNegMatrix& H0,
                         const PriorSpec& prior, const SolverConfig& config);

// Convenience overload: all-ones start.
SolverResult snnls_solve(const NonNegMatrix& X, const NonNegMatrix& W, const PriorSpec& prior,
                         const SolverConfig& config);

}  // namespace snnls
