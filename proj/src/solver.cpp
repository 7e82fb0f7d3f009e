#include "snnls/solver.hpp"

#include "snnls/diagnostics.hpp"
#include "snnls/kernels.hpp"
#include "snnls/matcore.hpp"

#include <cmath>
#include <cstdint>

namespace snnls {

const char* update_rule_name(UpdateRule r) {
    switch (r) {
        case UpdateRule::GeneralMur: return "general";
        case UpdateRule::PlainNmf: return "plain";
        case UpdateRule::L1: return "l1";
    }
    return "?";
}

UpdateRule update_rule_from_name(const std::string& name) {
    if (name == "general") return UpdateRule::GeneralMur;
    if (name == "plain") return UpdateRule::PlainNmf;
    if (name == "l1") return UpdateRule::L1;
    throw ValidationError("unknown update rule '" + name + "'");
}

void AnnealSchedule::validate() const {
    if (!(tau0 > 0.0) || !std::isfinite(tau0))
        throw ValidationError("AnnealSchedule: tau0 must be positive and finite");
    if (!(factor > 1.0) || !std::isfinite(factor))
        throw ValidationError("AnnealSchedule: factor must exceed 1");
    if (max_steps < 0) throw ValidationError("AnnealSchedule: max_steps must be non-negative");
}

void SolverConfig::validate() const {
    if (lambda < 0.0 || !std::isfinite(lambda))
        throw ValidationError("SolverConfig: lambda must be non-negative and finite");
    if (inner_iters < 1) throw ValidationError("SolverConfig: inner_iters must be at least 1");
    if (!(conv_tol > 0.0)) throw ValidationError("SolverConfig: conv_tol must be positive");
    if (!(zero_tol > 0.0)) throw ValidationError("SolverConfig: zero_tol must be positive");
    if (!(zero_tol < conv_tol))
        throw ValidationError("SolverConfig: zero_tol must be smaller than conv_tol");
    if (!(floor > 0.0)) throw ValidationError("SolverConfig: floor must be positive");
    if (anneal) anneal->validate();
}

namespace {

// The fixed classical rules are the general rule under a substituted
// prior; routing them this way keeps one code path.
PriorSpec effective_prior(const PriorSpec& prior, UpdateRule rule) {
    switch (rule) {
        case UpdateRule::GeneralMur: return prior;
        case UpdateRule::PlainNmf: {
            PriorSpec p;
            p.family = PriorFamily::Noninformative;
            return p;
        }
        case UpdateRule::L1: {
            PriorSpec p;
            p.family = PriorFamily::Exponential;
            p.tau = 1.0;  // unused by the weight; must satisfy validation
            return p;
        }
    }
    throw ValidationError("effective_prior: unhandled rule");
}

void check_finite(const Matrix& m, const char* who) {
    for (size_t i = 0; i < m.size(); ++i)
        if (!std::isfinite(m.data()[i]))
            throw ValidationError(std::string(who) + ": non-finite entry in input");
}

// Denominator entry (W'W H)_(i,j) as an ordered dot product over the
// inner index, visiting only the nonzero iterate entries (their ascending
// index list is compacted once per sweep). Skipped terms are exact +0.0
// (both factors non-negative), so the result is bit-identical to the dense
// accumulation gemm performs.
inline double den_entry(const double* grow, const double* hrow, const std::vector<int>& nz) {
    double acc = 0.0;
    for (int k : nz) acc += grow[k] * hrow[k];
    return acc;
}

}  // namespace

Matrix mur_step(const Matrix& W, const Matrix& X, const Matrix& Hs, const Matrix& omega, int z,
                double lambda, const std::vector<uint8_t>* active, double floor) {
    if (z != 1 && z != 2) throw ValidationError("mur_step: z must be 1 or 2");
    if (lambda < 0.0) throw ValidationError("mur_step: lambda must be non-negative");
    if (!(floor > 0.0)) throw ValidationError("mur_step: floor must be positive");
    if (W.rows() != X.rows())
        throw ValidationError("mur_step: W shape " + W.shape() + " does not match X shape " +
                              X.shape());
    if (W.cols() != Hs.rows() || X.cols() != Hs.cols())
        throw ValidationError("mur_step: iterate shape " + Hs.shape() +
                              " inconsistent with W/X");
    if (!omega.same_shape(Hs))
        throw ValidationError("mur_step: weight shape " + omega.shape() +
                              " does not match iterate shape " + Hs.shape());
    if (active && active->size() != Hs.size())
        throw ValidationError("mur_step: active mask size mismatch");
    check_finite(W, "mur_step");
    check_finite(X, "mur_step");
    check_finite(omega, "mur_step");
    for (size_t e = 0; e < Hs.size(); ++e) {
        const double h = Hs.data()[e];
        if (!std::isfinite(h) || h < 0.0)
            throw ValidationError("mur_step: iterate entries must be finite and non-negative");
    }

    const Matrix G = gemm(W, W, true);
    const Matrix num = gemm(W, X, true);
    const Matrix den = gemm(G, Hs);
    Matrix out(Hs.rows(), Hs.cols());
    for (size_t e = 0; e < Hs.size(); ++e) {
        const double h = Hs.data()[e];
        if (active && !(*active)[e]) {
            out.data()[e] = h;
            continue;
        }
        const double pen = (z == 2) ? (lambda * omega.data()[e]) * h : lambda * omega.data()[e];
        const double d = den.data()[e] + pen;
        const double g = d > floor ? d : floor;
        out.data()[e] = (h * num.data()[e]) / g;
    }
    return out;
}

double objective(const Matrix& X, const Matrix& W, const Matrix& H, const PriorSpec& prior,
                 double lambda) {
    if (lambda < 0.0) throw ValidationError("objective: lambda must be non-negative");
    for (size_t e = 0; e < H.size(); ++e) {
        const double h = H.data()[e];
        if (!std::isfinite(h) || h < 0.0)
            throw ValidationError("objective: H entries must be finite and non-negative");
    }
    return residual_sum_squares(X, W, H) + 2.0 * lambda * neg_log_prior(prior, H);
}

SolverResult snnls_solve(const NonNegMatrix& X_, const NonNegMatrix& W_, const NonNegMatrix& H0_,
                         const PriorSpec& prior, const SolverConfig& config) {
    config.validate();
    const Matrix& X = X_.mat();
    const Matrix& W = W_.mat();
    const Matrix& H0 = H0_.mat();
    const int d = X.rows(), m = X.cols(), n = W.cols();
    if (W.rows() != d)
        throw ValidationError("snnls_solve: W shape " + W.shape() +
                              " does not match X shape " + X.shape());
    if (H0.rows() != n || H0.cols() != m)
        throw ValidationError("snnls_solve: H0 shape " + H0.shape() + " must be " +
                              std::to_string(n) + "x" + std::to_string(m));
    SolverResult res;
    for (int j = 0; j < n; ++j) {
        bool nonzero = false;
        for (int i = 0; i < d; ++i)
            if (W(i, j) > 0.0) {
                nonzero = true;
                break;
            }
        // A dead atom is harmless: its numerator row is zero, so its
        // coefficients collapse to exact zero on the first update.
        if (!nonzero)
            res.warnings.push_back("column " + std::to_string(j) +
                                   " of the dictionary is all zeros; its coefficients are 0");
    }
    prior.validate(n);

    PriorSpec eff = effective_prior(prior, config.update_rule);
    eff.validate(n);
    double tau = eff.tau;
    const AnnealSchedule* sched =
        (config.anneal && config.anneal->max_steps > 0) ? &*config.anneal : nullptr;
    if (sched) {
        if (eff.family != PriorFamily::RST && eff.family != PriorFamily::BlockRST)
            throw ValidationError(
                "snnls_solve: annealing applies to the reweighted-l2 families (rst, brst)");
        tau = sched->tau0;
    }
    int anneal_steps = 0;

    // Row j of HT is column j of the iterate, so the hot loop walks
    // contiguous memory; same for BT and OmegaT.
    Matrix HT = transpose(H0);
    Matrix HTprev(m, n);
    const Matrix G = gemm(W, W, true);
    const Matrix BT = transpose(gemm(W, X, true));

    std::vector<uint8_t> zset(static_cast<size_t>(m) * n, 1);
    std::vector<double> den(n);
    std::vector<int> J, nz;
    J.reserve(n);
    nz.reserve(n);

    eff.tau = tau;
    res.objective_trace.push_back(objective(X, W, H0, eff, config.lambda));

    int t = 0;
    while (true) {
        eff.tau = tau;
        const Matrix OmegaT = transpose(weight_matrix(eff, transpose(HT)));
        const int z = eff.z();
        HTprev = HT;

        for (int j = 0; j < m; ++j) {
            J.clear();
            const uint8_t* zrow = zset.data() + static_cast<size_t>(j) * n;
            for (int i = 0; i < n; ++i)
                if (zrow[i]) J.push_back(i);
            double* hrow = HT.row_ptr(j);
            const double* brow = BT.row_ptr(j);
            const double* wrow = OmegaT.row_ptr(j);
            for (int s = 0; s < config.inner_iters && !J.empty(); ++s) {
                nz.clear();
                for (int i = 0; i < n; ++i)
                    if (hrow[i] != 0.0) nz.push_back(i);
                // Dense sweeps accumulate den = sum_k h_k G(k,:) row-wise (G is
                // bitwise symmetric, axpy is lane-pure mul+add), which visits k in
                // the same ascending order per element as the sparse dot path.
                if (4 * J.size() >= static_cast<size_t>(n)) {
                    std::fill(den.begin(), den.end(), 0.0);
                    for (int k : nz) kern::ops().axpy(hrow[k], G.row_ptr(k), den.data(), n);
                } else {
                    for (int i : J) den[i] = den_entry(G.row_ptr(i), hrow, nz);
                }
                size_t keep = 0;
                for (size_t p = 0; p < J.size(); ++p) {
                    const int i = J[p];
                    const double h = hrow[i];
                    const double pen = (z == 2) ? (config.lambda * wrow[i]) * h
                                                : config.lambda * wrow[i];
                    const double dtot = den[i] + pen;
                    const double g = dtot > config.floor ? dtot : config.floor;
                    double hn = (h * brow[i]) / g;
                    if (hn < config.zero_tol) hn = 0.0;
                    hrow[i] = hn;
                    if (hn != 0.0 && std::fabs(hn - h) > config.conv_tol * h) J[keep++] = i;
                }
                J.resize(keep);
            }
        }
        ++t;

        for (size_t e = 0; e < HT.size(); ++e)
            if (!std::isfinite(HT.data()[e]))
                throw NumericalError("snnls_solve: non-finite iterate entry at outer iteration " +
                                     std::to_string(t));

        int pruned = 0;
        for (size_t e = 0; e < zset.size(); ++e) {
            if (!zset[e]) continue;
            const double hn = HT.data()[e];
            const double hp = HTprev.data()[e];
            if (hn == 0.0 || std::fabs(hn - hp) <= config.conv_tol * std::fabs(hp)) {
                zset[e] = 0;
                ++pruned;
            }
        }
        res.active_history.push_back(pruned);
        res.objective_trace.push_back(objective(X, W, transpose(HT), eff, config.lambda));

        if (sched && anneal_steps < sched->max_steps) {
            const double thresh = std::sqrt(tau) / 100.0;
            bool all_below = true;
            for (int j = 0; j < m && all_below; ++j) {
                const double* hn = HT.row_ptr(j);
                const double* hp = HTprev.row_ptr(j);
                double dsq = 0.0, psq = 0.0;
                for (int i = 0; i < n; ++i) {
                    const double diff = hn[i] - hp[i];
                    dsq += diff * diff;
                    psq += hp[i] * hp[i];
                }
                if (psq > 0.0) {
                    if (std::sqrt(dsq) >= thresh * std::sqrt(psq)) all_below = false;
                } else if (dsq > 0.0) {
                    all_below = false;
                }
            }
            if (all_below) {
                tau /= sched->factor;
                ++anneal_steps;
                res.anneal_taus.push_back(tau);
                res.anneal_boundaries.push_back(res.objective_trace.size());
                // The reweighting landscape changed; let every surviving
                // positive coordinate move again. Exact zeros stay fixed.
                for (size_t e = 0; e < zset.size(); ++e) zset[e] = HT.data()[e] > 0.0 ? 1 : 0;
            }
        }

        bool any_active = false;
        for (size_t e = 0; e < zset.size(); ++e)
            if (zset[e]) {
                any_active = true;
                break;
            }
        if (!any_active) {
            res.converged = true;
            break;
        }
        if (config.outer_cap > 0 && t >= config.outer_cap) break;
    }

    res.iterations = t;
    res.H = transpose(HT);
    eff.tau = tau;
    const KktReport rep = kkt_residual(X, W, res.H, eff, config.lambda);
    res.kkt_residual = rep.normalized_norm;
    res.stationarity_condition_held = rep.condition_held;
    if (!res.converged)
        res.warnings.push_back("outer iteration cap reached before the working set emptied");
    return res;
}

SolverResult snnls_solve(const NonNegMatrix& X, const NonNegMatrix& W, const PriorSpec& prior,
                         const SolverConfig& config) {
    Matrix ones(W.mat().cols(), X.mat().cols());
    for (size_t e = 0; e < ones.size(); ++e) ones.data()[e] = 1.0;
    return snnls_solve(X, W, NonNegMatrix(std::move(ones)), prior, config);
}

}  // namespace snnls
