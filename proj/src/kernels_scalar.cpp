#include "snnls/kernels.hpp"

// Reference kernels. The loop structures here define the numerical contract;
// SIMD variants must reproduce them bit for bit.

namespace snnls::kern {
namespace scalar {

static void gemm_nn(const double* a, const double* b, double* c, int m, int p, int n) {
    for (long i = 0; i < static_cast<long>(m) * n; ++i) c[i] = 0.0;
    for (int i = 0; i < m; ++i) {
        double* ci = c + static_cast<long>(i) * n;
        const double* ai = a + static_cast<long>(i) * p;
        for (int k = 0; k < p; ++k) {
            const double aik = ai[k];
            const double* bk = b + static_cast<long>(k) * n;
            for (int j = 0; j < n; ++j) ci[j] += aik * bk[j];
        }
    }
}

static void gemm_tn(const double* a, const double* b, double* c, int m, int p, int n) {
    for (long i = 0; i < static_cast<long>(m) * n; ++i) c[i] = 0.0;
    for (int k = 0; k < p; ++k) {
        const double* ak = a + static_cast<long>(k) * m;
        const double* bk = b + static_cast<long>(k) * n;
        for (int i = 0; i < m; ++i) {
            const double aki = ak[i];
            double* ci = c + static_cast<long>(i) * n;
            for (int j = 0; j < n; ++j) ci[j] += aki * bk[j];
        }
    }
}

static void axpy(double s, const double* row, double* acc, int len) {
    for (int i = 0; i < len; ++i) acc[i] += s * row[i];
}

static void hadamard_quotient(const double* num, const double* den, double floor,
                              double* out, int len) {
    for (int i = 0; i < len; ++i) {
        const double d = den[i] > floor ? den[i] : floor;
        out[i] = num[i] / d;
    }
}

static void mur_apply(const double* h, const double* num, const double* den, double floor,
                      double* out, int len) {
    for (int i = 0; i < len; ++i) {
        const double d = den[i] > floor ? den[i] : floor;
        out[i] = (h[i] * num[i]) / d;
    }
}

static void omega_rst(const double* h, double tau, double* out, int len) {
    const double num = 2.0 * (tau + 1.0);
    for (int i = 0; i < len; ++i) out[i] = num / (tau + h[i] * h[i]);
}

static void omega_rgdp(const double* h, double tau, double* out, int len) {
    const double num = tau + 1.0;
    for (int i = 0; i < len; ++i) out[i] = num / (tau + h[i]);
}

}  // namespace scalar

const Ops* ops_scalar() {
    static const Ops table = {
        "scalar",
        scalar::gemm_nn,
        scalar::gemm_tn,
        scalar::axpy,
        scalar::hadamard_quotient,
        scalar::mur_apply,
        scalar::omega_rst,
        scalar::omega_rgdp,
    };
    return &table;
}

}  // namespace snnls::kern
