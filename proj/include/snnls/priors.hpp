#pragma once

#include "snnls/blocks.hpp"
#include "snnls/matrix.hpp"

#include <optional>
#include <string>

namespace snnls {

// Prior families over the non-negative coefficients. The heavy-tailed
// families (RST, RGDP and their block variants) are the sparsity-promoting
// ones; Exponential gives the plain l1 penalty, RectifiedGaussian a ridge
// penalty, Noninformative none.
enum class PriorFamily {
    RectifiedGaussian,
    Exponential,
    RST,
    RGDP,
    Noninformative,
    BlockRST,
    BlockRGDP,
};

const char* family_name(PriorFamily f);
PriorFamily family_from_name(const std::string& name);

struct PriorSpec {
    PriorFamily family = PriorFamily::Noninformative;
    // Shape parameter. Heavier tails as tau -> 0.
    double tau = 0.1;
    // Required for block families, rejected otherwise.
    std::optional<BlockStructure> blocks;

    // Penalty exponent implied by the family: 2 for the Gaussian-like
    // families, 1 for the exponential-like ones.
    int z() const;
    bool is_block() const;
    // Throws ValidationError on inconsistent parameters.
    void validate(int n_rows = -1) const;
};

// Per-entry multiplicative-update weights Omega for the current iterate Ht.
// The update denominator penalty is lambda * Omega .* Ht^(z-1). Closed forms:
//   RST                2(tau+1) / (tau + h^2)
//   RGDP               (tau+1) / (tau + h)
//   RectifiedGaussian  2/tau
//   Exponential        1
//   Noninformative     0
//   BlockRST           2(tau+1) / (tau + S_b)   with S_b the block l2 energy
//   BlockRGDP          (tau+1) / (tau + V_b)    with V_b the block l1 sum
// Block weights are constant within a block (expanded to entry shape).
Matrix weight_matrix(const PriorSpec& prior, const Matrix& ht);

// Penalty term of the solver objective, scaled so that its entry-wise
// gradient is exactly weight_matrix(h) .* h^(z-1):
//   RST     (tau+1) * sum log(tau + h^2)
//   RGDP    (tau+1) * sum log(tau + h)
//   RG      sum h^2 / tau
//   Exp     sum h
//   blocks  (tau+1) * sum over (block, column) of log(tau + block stat)
// Additive normalization constants are dropped.
double neg_log_prior(const PriorSpec& prior, const Matrix& h);

// Table densities on h >= 0 (natural parameters).
double rg_pdf(double h, double gamma);              // sqrt(2/(pi g)) e^{-h^2/(2g)}
double exp_pdf(double h, double gamma);             // g e^{-g h}, rate g
double ga_pdf(double h, double a, double b);        // b^a/Gamma(a) h^{a-1} e^{-b h}
double iga_pdf(double h, double a, double b);       // b^a/Gamma(a) h^{-a-1} e^{-b/h}
double rst_pdf(double h, double tau);               // rectified Student-t
double rgdp_pdf(double h, double a, double b, double tau);  // 2 eta (1+h^b/(tau a^b))^{-(tau+1/b)}

// Evaluates the family density at h using the spec's tau as the natural
// parameter. Throws for Noninformative and block families.
double density(const PriorSpec& prior, double h);

// RGDP normalizer eta(a,b,tau), computed by quadrature and cached.
// Thread-safe compute-once per parameter triple.
double rgdp_eta(double a, double b, double tau);

// Scale-mixture identities: integrating the conditional density against the
// mixing density over the latent scale reproduces a closed-form marginal.
enum class MixtureRow {
    RgExp,   // RG(h;g) mixed with Exp(g; tau^2/2)      -> Exp(h; tau)
    RgIga,   // RG(h;g) mixed with IGa(g; tau/2, tau/2) -> RST(h; tau)
    ExpGa,   // Exp(h;g) mixed with Ga(g; tau, tau)     -> RGDP(h; 1,1,tau)
};

struct QuadratureResult {
    double value;
    double abserr;
};

// Numerical marginal at h (adaptive quadrature over the scale). Throws
// NumericalError when the integration does not converge.
QuadratureResult mixture_quadrature(MixtureRow row, double tau, double h);

// Closed-form marginal for the same row.
double mixture_closed_form(MixtureRow row, double tau, double h);

// Integral of f over (0, inf) by adaptive quadrature; used by density tests.
QuadratureResult integrate_positive_axis(double (*f)(double, void*), void* params);

}  // namespace snnls
