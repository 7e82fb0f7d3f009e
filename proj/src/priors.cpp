#include "snnls/priors.hpp"
#include "snnls/kernels.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace snnls {

const char* family_name(PriorFamily f) {
    switch (f) {
        case PriorFamily::RectifiedGaussian: return "rg";
        case PriorFamily::Exponential: return "exp";
        case PriorFamily::RST: return "rst";
        case PriorFamily::RGDP: return "rgdp";
        case PriorFamily::Noninformative: return "none";
        case PriorFamily::BlockRST: return "brst";
        case PriorFamily::BlockRGDP: return "brgdp";
    }
    return "?";
}

PriorFamily family_from_name(const std::string& name) {
    if (name == "rg") return PriorFamily::RectifiedGaussian;
    if (name == "exp" || name == "l1") return PriorFamily::Exponential;
    if (name == "rst" || name == "rl2") return PriorFamily::RST;
    if (name == "rgdp" || name == "rl1") return PriorFamily::RGDP;
    if (name == "none") return PriorFamily::Noninformative;
    if (name == "brst") return PriorFamily::BlockRST;
    if (name == "brgdp") return PriorFamily::BlockRGDP;
    throw ValidationError("unknown prior family '" + name + "'");
}

int PriorSpec::z() const {
    switch (family) {
        case PriorFamily::RectifiedGaussian:
        case PriorFamily::RST:
        case PriorFamily::BlockRST: return 2;
        default: return 1;
    }
}

bool PriorSpec::is_block() const {
    return family == PriorFamily::BlockRST || family == PriorFamily::BlockRGDP;
}

void PriorSpec::validate(int n_rows) const {
    if (family != PriorFamily::Noninformative && !(tau > 0.0 && std::isfinite(tau)))
        throw ValidationError(std::string("PriorSpec: tau must be positive and finite for ") +
                              family_name(family));
    if (is_block()) {
        if (!blocks)
            throw ValidationError(std::string("PriorSpec: ") + family_name(family) +
                                  " requires a block structure");
        if (n_rows >= 0 && blocks->n() != n_rows)
            throw ValidationError("PriorSpec: block structure covers " +
                                  std::to_string(blocks->n()) + " rows, matrix has " +
                                  std::to_string(n_rows));
    } else if (blocks) {
        throw ValidationError(std::string("PriorSpec: ") + family_name(family) +
                              " does not take a block structure");
    }
}

Matrix weight_matrix(const PriorSpec& prior, const Matrix& ht) {
    prior.validate(ht.rows());
    const int len = static_cast<int>(ht.size());
    Matrix w(ht.rows(), ht.cols());
    switch (prior.family) {
        case PriorFamily::RST:
            kern::ops().omega_rst(ht.data(), prior.tau, w.data(), len);
            return w;
        case PriorFamily::RGDP:
            kern::ops().omega_rgdp(ht.data(), prior.tau, w.data(), len);
            return w;
        case PriorFamily::RectifiedGaussian: {
            const double v = 2.0 / prior.tau;
            for (int i = 0; i < len; ++i) w.data()[i] = v;
            return w;
        }
        case PriorFamily::Exponential:
            for (int i = 0; i < len; ++i) w.data()[i] = 1.0;
            return w;
        case PriorFamily::Noninformative:
            return w;
        case PriorFamily::BlockRST:
        case PriorFamily::BlockRGDP: {
            const int z = prior.z();
            const Matrix stats = block_stats(ht, *prior.blocks, z);
            // Phi is constant within a block; expanded to entry shape.
            for (int i = 0; i < ht.rows(); ++i) {
                const int b = prior.blocks->block_of(i);
                for (int j = 0; j < ht.cols(); ++j) {
                    const double s = stats(b, j);
                    w(i, j) = (z == 2) ? 2.0 * (prior.tau + 1.0) / (prior.tau + s)
                                       : (prior.tau + 1.0) / (prior.tau + s);
                }
            }
            return w;
        }
    }
    throw ValidationError("weight_matrix: unhandled family");
}

double neg_log_prior(const PriorSpec& prior, const Matrix& h) {
    prior.validate(h.rows());
    const double tau = prior.tau;
    double acc = 0.0;
    switch (prior.family) {
        case PriorFamily::Noninformative:
            return 0.0;
        case PriorFamily::RST:
            for (size_t i = 0; i < h.size(); ++i) {
                const double v = h.data()[i];
                acc += std::log(tau + v * v);
            }
            return (tau + 1.0) * acc;
        case PriorFamily::RGDP:
            for (size_t i = 0; i < h.size(); ++i) acc += std::log(tau + h.data()[i]);
            return (tau + 1.0) * acc;
        case PriorFamily::RectifiedGaussian:
            for (size_t i = 0; i < h.size(); ++i) {
                const double v = h.data()[i];
                acc += v * v;
            }
            return acc / tau;
        case PriorFamily::Exponential:
            for (size_t i = 0; i < h.size(); ++i) acc += h.data()[i];
            return acc;
        case PriorFamily::BlockRST:
        case PriorFamily::BlockRGDP: {
            const Matrix stats = block_stats(h, *prior.blocks, prior.z());
            for (size_t i = 0; i < stats.size(); ++i) acc += std::log(tau + stats.data()[i]);
            return (tau + 1.0) * acc;
        }
    }
    throw ValidationError("neg_log_prior: unhandled family");
}

double rg_pdf(double h, double gamma) {
    if (h < 0.0) return 0.0;
    return std::sqrt(2.0 / (M_PI * gamma)) * std::exp(-h * h / (2.0 * gamma));
}

double exp_pdf(double h, double gamma) {
    if (h < 0.0) return 0.0;
    return gamma * std::exp(-gamma * h);
}

double ga_pdf(double h, double a, double b) {
    if (h < 0.0) return 0.0;
    if (h == 0.0) return a > 1.0 ? 0.0 : (a == 1.0 ? b : INFINITY);
    return std::exp(a * std::log(b) - std::lgamma(a) + (a - 1.0) * std::log(h) - b * h);
}

double iga_pdf(double h, double a, double b) {
    if (h <= 0.0) return 0.0;
    return std::exp(a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(h) - b / h);
}

double rst_pdf(double h, double tau) {
    if (h < 0.0) return 0.0;
    const double logc = std::lgamma((tau + 1.0) / 2.0) - std::lgamma(tau / 2.0) -
                        0.5 * std::log(tau * M_PI);
    return 2.0 * std::exp(logc - 0.5 * (tau + 1.0) * std::log1p(h * h / tau));
}

namespace {

gsl_integration_workspace* quad_workspace() {
    // One workspace per thread; GSL workspaces are not shareable.
    thread_local gsl_integration_workspace* ws = gsl_integration_workspace_alloc(4000);
    return ws;
}

struct GslInit {
    GslInit() { gsl_set_error_handler_off(); }
};
const GslInit gsl_init;

QuadratureResult qagiu(double (*f)(double, void*), void* params) {
    gsl_function F;
    F.function = f;
    F.params = params;
    double result = 0.0, abserr = 0.0;
    const int status = gsl_integration_qagiu(&F, 0.0, 1e-12, 1e-10, 4000, quad_workspace(),
                                             &result, &abserr);
    if (status != 0 && status != GSL_EROUND)
        throw NumericalError(std::string("quadrature failed: ") + gsl_strerror(status) +
                             " (estimated error " + std::to_string(abserr) + ")");
    return {result, abserr};
}

struct EtaParams {
    double a, b, tau;
};

double rgdp_kernel(double h, void* p) {
    const auto* q = static_cast<EtaParams*>(p);
    return std::exp(-(q->tau + 1.0 / q->b) *
                    std::log1p(std::pow(h, q->b) / (q->tau * std::pow(q->a, q->b))));
}

}  // namespace

double rgdp_eta(double a, double b, double tau) {
    if (!(a > 0.0 && b > 0.0 && tau > 0.0))
        throw ValidationError("rgdp_eta: parameters must be positive");
    static std::mutex mu;
    static std::map<std::tuple<double, double, double>, double> cache;
    const auto key = std::make_tuple(a, b, tau);
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    EtaParams p{a, b, tau};
    const QuadratureResult integral = qagiu(rgdp_kernel, &p);
    if (!(integral.value > 0.0) || !std::isfinite(integral.value))
        throw NumericalError("rgdp_eta: normalization integral did not converge");
    const double eta = 0.5 / integral.value;
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(key, eta);
    return eta;
}

double rgdp_pdf(double h, double a, double b, double tau) {
    if (h < 0.0) return 0.0;
    EtaParams p{a, b, tau};
    return 2.0 * rgdp_eta(a, b, tau) * rgdp_kernel(h, &p);
}

double density(const PriorSpec& prior, double h) {
    switch (prior.family) {
        case PriorFamily::RectifiedGaussian: return rg_pdf(h, prior.tau);
        case PriorFamily::Exponential: return exp_pdf(h, prior.tau);
        case PriorFamily::RST: return rst_pdf(h, prior.tau);
        case PriorFamily::RGDP: return rgdp_pdf(h, 1.0, 1.0, prior.tau);
        default:
            throw ValidationError(std::string("density: no scalar density for ") +
                                  family_name(prior.family));
    }
}

namespace {

struct MixParams {
    MixtureRow row;
    double tau, h;
};

double mixture_integrand(double g, void* p) {
    const auto* q = static_cast<MixParams*>(p);
    switch (q->row) {
        case MixtureRow::RgExp:
            return rg_pdf(q->h, g) * exp_pdf(g, q->tau * q->tau / 2.0);
        case MixtureRow::RgIga:
            return rg_pdf(q->h, g) * iga_pdf(g, q->tau / 2.0, q->tau / 2.0);
        case MixtureRow::ExpGa:
            return exp_pdf(q->h, g) * ga_pdf(g, q->tau, q->tau);
    }
    return 0.0;
}

}  // namespace

QuadratureResult mixture_quadrature(MixtureRow row, double tau, double h) {
    if (!(tau > 0.0) || h < 0.0)
        throw ValidationError("mixture_quadrature: tau must be positive, h non-negative");
    MixParams p{row, tau, h};
    return qagiu(mixture_integrand, &p);
}

double mixture_closed_form(MixtureRow row, double tau, double h) {
    switch (row) {
        case MixtureRow::RgExp: return exp_pdf(h, tau);
        case MixtureRow::RgIga: return rst_pdf(h, tau);
        case MixtureRow::ExpGa: return rgdp_pdf(h, 1.0, 1.0, tau);
    }
    throw ValidationError("mixture_closed_form: unhandled row");
}

QuadratureResult integrate_positive_axis(double (*f)(double, void*), void* params) {
    return qagiu(f, params);
}

}  // namespace snnls
