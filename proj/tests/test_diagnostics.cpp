#include "snnls/diagnostics.hpp"

#include "oracles.hpp"
#include "snnls/experiments.hpp"
#include "snnls/matcore.hpp"
#include "snnls/solver.hpp"

#include <doctest.h>

#include <cmath>

using namespace snnls;

namespace {

Matrix random_nonneg(int r, int c, uint64_t seed) {
    Rng rng(seed);
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = std::fabs(rng.normal());
    return m;
}

PriorSpec make(PriorFamily f, double tau) {
    PriorSpec p;
    p.family = f;
    p.tau = tau;
    return p;
}

}  // namespace

TEST_CASE("the analytic interior stationary point has zero residual") {
    // 1x1 problem, w = 1, x = 2, reweighted-l1 tau = 1, lambda = 0.5. The
    // positive stationary point solves the half-gradient equation
    // h - 2 + lambda*(tau+1)/(tau+h) = h - 2 + 1/(1+h) = 0, i.e.
    // h^2 - h - 1 = 0: the golden ratio.
    Matrix W(1, 1, {1.0});
    Matrix X(1, 1, {2.0});
    const double h = (1.0 + std::sqrt(5.0)) / 2.0;
    Matrix H(1, 1, {h});
    const KktReport rep = kkt_residual(X, W, H, make(PriorFamily::RGDP, 1.0), 0.5);
    CHECK(rep.normalized_norm <= 1e-10);
}

TEST_CASE("the zero iterate is stationary exactly when the penalty dominates") {
    Matrix W(2, 1, {1.0, 1.0});
    Matrix X(2, 1, {1.0, 1.0});
    Matrix H(1, 1, {0.0});
    // Gradient at 0: -W'X + lambda * (tau+1)/tau. With tau = 1 it is
    // -2 + 2*lambda: non-negative iff lambda >= 1.
    const PriorSpec prior = make(PriorFamily::RGDP, 1.0);
    CHECK(kkt_residual(X, W, H, prior, 1.0).normalized_norm == 0.0);
    CHECK(kkt_residual(X, W, H, prior, 1.5).normalized_norm == 0.0);
    CHECK(kkt_residual(X, W, H, prior, 0.25).normalized_norm > 0.0);
}

TEST_CASE("the residual matrix is the entry-wise min of iterate and gradient") {
    const Matrix W = random_nonneg(4, 3, 60);
    const Matrix X = random_nonneg(4, 2, 61);
    const Matrix H = random_nonneg(3, 2, 62);
    const PriorSpec prior = make(PriorFamily::RST, 0.7);
    const double lambda = 0.2;
    const KktReport rep = kkt_residual(X, W, H, prior, lambda);

    const Matrix G = gemm(W, W, true);
    const Matrix B = gemm(W, X, true);
    const Matrix GH = gemm(G, H);
    const Matrix omega = weight_matrix(prior, H);
    double acc = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) {
            const double grad = GH(i, j) - B(i, j) + lambda * omega(i, j) * H(i, j);
            const double r = std::min(H(i, j), grad);
            CHECK(rep.residual_matrix(i, j) == doctest::Approx(r).epsilon(1e-14));
            acc += std::fabs(r);
        }
    CHECK(rep.normalized_norm == doctest::Approx(acc / 6.0).epsilon(1e-14));
}

TEST_CASE("the half-gradient matches a finite-difference derivative of the objective") {
    const Matrix W = random_nonneg(4, 3, 63);
    const Matrix X = random_nonneg(4, 2, 64);
    const Matrix H = random_nonneg(3, 2, 65);
    const PriorSpec prior = make(PriorFamily::RGDP, 0.6);
    const double lambda = 0.15;

    const Matrix G = gemm(W, W, true);
    const Matrix B = gemm(W, X, true);
    const Matrix GH = gemm(G, H);
    const Matrix omega = weight_matrix(prior, H);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) {
            const double half_grad = GH(i, j) - B(i, j) + lambda * omega(i, j);
            const double numeric = oracle::central_diff(
                [&](double v) {
                    Matrix Hh(H);
                    Hh(i, j) = v;
                    return objective(X, W, Hh, prior, lambda);
                },
                H(i, j), 1e-6 * std::max(1.0, H(i, j)));
            CHECK(2.0 * half_grad == doctest::Approx(numeric).epsilon(1e-5));
        }
}

TEST_CASE("stationarity precondition flag") {
    const Matrix W = random_nonneg(4, 3, 66);
    const Matrix X = random_nonneg(4, 2, 67);
    const Matrix H = random_nonneg(3, 2, 68);
    const Matrix B = gemm(W, X, true);
    const double bmax = max_entry(B);
    // z = 1 and tau * max(W'X) <= lambda: holds.
    CHECK(kkt_residual(X, W, H, make(PriorFamily::RGDP, 0.01), 0.02 * bmax).condition_held);
    // Fails when tau is too large for the given lambda.
    CHECK_FALSE(kkt_residual(X, W, H, make(PriorFamily::RGDP, 1.0), 0.5 * bmax).condition_held);
    // The z = 2 analogue is asymptotic and never reports true.
    CHECK_FALSE(kkt_residual(X, W, H, make(PriorFamily::RST, 1e-12), 10.0).condition_held);
}

TEST_CASE("sparsity profile sorts magnitudes and counts survivors") {
    Matrix H(3, 2, {0.5, 1e-8, 0.0, 2.0, 0.1, 3e-7});
    const SparsityProfile sp = sparsity_profile(H, 1e-6);
    REQUIRE(sp.average_sorted.size() == 3);
    // Column 0 sorted: 0.5, 0.1, 0.0; column 1 sorted: 2.0, 1e-8, 3e-7 -> 2.0, 3e-7, 1e-8.
    CHECK(sp.average_sorted[0] == doctest::Approx((0.5 + 2.0) / 2));
    CHECK(sp.average_sorted[1] == doctest::Approx((0.1 + 3e-7) / 2));
    CHECK(sp.above_threshold[0] == 2);
    CHECK(sp.above_threshold[1] == 1);
    CHECK(sp.threshold == 1e-6);
}

TEST_CASE("the EM surrogate is tangent from above and decreases under the update") {
    const Matrix W = random_nonneg(5, 4, 69);
    const Matrix X = random_nonneg(5, 3, 70);
    const Matrix Ht = random_nonneg(4, 3, 71);
    const double lambda = 0.1;
    for (PriorFamily family : {PriorFamily::RST, PriorFamily::RGDP,
                               PriorFamily::RectifiedGaussian, PriorFamily::Exponential}) {
        CAPTURE(family_name(family));
        const PriorSpec prior = make(family, 0.8);

        // Tangency: the surrogate equals the objective at the expansion point.
        CHECK(q_function(Ht, Ht, X, W, prior, lambda) ==
              doctest::Approx(objective(X, W, Ht, prior, lambda)).epsilon(1e-14));

        // Majorization on random probes.
        for (uint64_t s = 0; s < 5; ++s) {
            const Matrix H = random_nonneg(4, 3, 100 + s);
            const double q = q_function(H, Ht, X, W, prior, lambda);
            const double f = objective(X, W, H, prior, lambda);
            CHECK(q >= f - 1e-10 * std::fabs(f));
        }

        // One multiplicative update decreases both surrogate and objective.
        const Matrix omega = weight_matrix(prior, Ht);
        const Matrix Hn = mur_step(W, X, Ht, omega, prior.z(), lambda);
        const double q0 = q_function(Ht, Ht, X, W, prior, lambda);
        const double q1 = q_function(Hn, Ht, X, W, prior, lambda);
        CHECK(q1 <= q0 + 1e-10 * std::fabs(q0));
        CHECK(objective(X, W, Hn, prior, lambda) <=
              objective(X, W, Ht, prior, lambda) + 1e-10);
    }
}

TEST_CASE("diagnostics input validation") {
    const Matrix W = random_nonneg(4, 3, 72);
    const Matrix X = random_nonneg(4, 2, 73);
    CHECK_THROWS_AS(kkt_residual(X, W, Matrix(2, 2, 1.0), make(PriorFamily::RGDP, 1.0), 0.1),
                    ValidationError);
    CHECK_THROWS_AS(
        q_function(Matrix(3, 2, 1.0), Matrix(3, 2, 1.0), X, W, make(PriorFamily::RGDP, 1.0), -1.0),
        ValidationError);
}
