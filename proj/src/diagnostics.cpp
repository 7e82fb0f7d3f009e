#include "snnls/diagnostics.hpp"

#include "snnls/matcore.hpp"

#include <algorithm>
#include <cmath>

namespace snnls {

namespace {

void check_nonneg_finite(const Matrix& h, const char* who) {
    for (size_t i = 0; i < h.size(); ++i) {
        const double v = h.data()[i];
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ValidationError(std::string(who) + ": entries must be finite and non-negative");
    }
}

}  // namespace

KktReport kkt_residual(const Matrix& X, const Matrix& W, const Matrix& H, const PriorSpec& prior,
                       double lambda) {
    if (lambda < 0.0) throw ValidationError("kkt_residual: lambda must be non-negative");
    check_nonneg_finite(H, "kkt_residual");
    prior.validate(H.rows());

    const Matrix G = gemm(W, W, true);
    const Matrix B = gemm(W, X, true);
    if (B.rows() != H.rows() || B.cols() != H.cols())
        throw ValidationError("kkt_residual: W'X shape " + B.shape() +
                              " does not match H shape " + H.shape());
    const Matrix GH = gemm(G, H);
    const Matrix omega = weight_matrix(prior, H);
    const int z = prior.z();

    KktReport rep;
    rep.residual_matrix = Matrix(H.rows(), H.cols());
    double acc = 0.0;
    for (size_t e = 0; e < H.size(); ++e) {
        const double h = H.data()[e];
        const double pen = (z == 2) ? (lambda * omega.data()[e]) * h : lambda * omega.data()[e];
        const double grad = GH.data()[e] - B.data()[e] + pen;
        const double r = std::min(h, grad);
        rep.residual_matrix.data()[e] = r;
        acc += std::fabs(r);
    }
    rep.normalized_norm = acc / static_cast<double>(H.size());
    rep.condition_held = (z == 1) && (prior.tau * max_entry(B) <= lambda);
    return rep;
}

SparsityProfile sparsity_profile(const Matrix& H, double threshold) {
    SparsityProfile prof;
    prof.threshold = threshold;
    prof.average_sorted.assign(H.rows(), 0.0);
    prof.above_threshold.assign(H.cols(), 0);
    std::vector<double> col(H.rows());
    for (int j = 0; j < H.cols(); ++j) {
        for (int i = 0; i < H.rows(); ++i) col[i] = std::fabs(H(i, j));
        std::sort(col.begin(), col.end(), std::greater<double>());
        int count = 0;
        for (int i = 0; i < H.rows(); ++i) {
            prof.average_sorted[i] += col[i];
            if (col[i] > threshold) ++count;
        }
        prof.above_threshold[j] = count;
    }
    const double inv = 1.0 / static_cast<double>(H.cols());
    for (double& v : prof.average_sorted) v *= inv;
    return prof;
}

double q_function(const Matrix& H, const Matrix& Ht, const Matrix& X, const Matrix& W,
                  const PriorSpec& prior, double lambda) {
    if (!H.same_shape(Ht))
        throw ValidationError("q_function: iterate shape " + H.shape() +
                              " does not match anchor shape " + Ht.shape());
    if (lambda < 0.0) throw ValidationError("q_function: lambda must be non-negative");
    check_nonneg_finite(H, "q_function");
    check_nonneg_finite(Ht, "q_function");

    double q = residual_sum_squares(X, W, H);
    if (lambda == 0.0 || prior.family == PriorFamily::Noninformative) return q;

    const Matrix omega = weight_matrix(prior, Ht);
    const int z = prior.z();
    double tangent = 0.0;
    for (size_t e = 0; e < H.size(); ++e) {
        const double h = H.data()[e];
        const double ht = Ht.data()[e];
        // (Omega/z) is the derivative of the penalty with respect to h^z,
        // so the bracket is the first-order expansion of nlp around Ht.
        tangent += (z == 2) ? 0.5 * omega.data()[e] * (h * h - ht * ht)
                            : omega.data()[e] * (h - ht);
    }
    return q + 2.0 * lambda * (neg_log_prior(prior, Ht) + tangent);
}

}  // namespace snnls
