#include "snnls/kernels.hpp"

// NEON kernels (aarch64 baseline). Same lane discipline as the AVX2 path:
// independent output elements per lane, mul+add kept separate.

#if defined(__aarch64__)
#include <arm_neon.h>

namespace snnls::kern {
namespace neon {

static void gemm_nn(const double* a, const double* b, double* c, int m, int p, int n) {
    for (long i = 0; i < static_cast<long>(m) * n; ++i) c[i] = 0.0;
    for (int i = 0; i < m; ++i) {
        double* ci = c + static_cast<long>(i) * n;
        const double* ai = a + static_cast<long>(i) * p;
        for (int k = 0; k < p; ++k) {
            const double aik = ai[k];
            const double* bk = b + static_cast<long>(k) * n;
            const float64x2_t va = vdupq_n_f64(aik);
            int j = 0;
            for (; j + 1 < n; j += 2) {
                float64x2_t vc = vld1q_f64(ci + j);
                vc = vaddq_f64(vc, vmulq_f64(va, vld1q_f64(bk + j)));
                vst1q_f64(ci + j, vc);
            }
            for (; j < n; ++j) ci[j] += aik * bk[j];
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
            const float64x2_t va = vdupq_n_f64(aki);
            int j = 0;
            for (; j + 1 < n; j += 2) {
                float64x2_t vc = vld1q_f64(ci + j);
                vc = vaddq_f64(vc, vmulq_f64(va, vld1q_f64(bk + j)));
                vst1q_f64(ci + j, vc);
            }
            for (; j < n; ++j) ci[j] += aki * bk[j];
        }
    }
}

static void axpy(double s, const double* row, double* acc, int len) {
    const float64x2_t vs = vdupq_n_f64(s);
    int i = 0;
    for (; i + 1 < len; i += 2) {
        float64x2_t va = vld1q_f64(acc + i);
        va = vaddq_f64(va, vmulq_f64(vs, vld1q_f64(row + i)));
        vst1q_f64(acc + i, va);
    }
    for (; i < len; ++i) acc[i] += s * row[i];
}

static inline float64x2_t floor_guard(float64x2_t den, float64x2_t vf) {
    // den > floor ? den : floor, NaN in den selects floor (matches scalar).
    uint64x2_t gt = vcgtq_f64(den, vf);
    return vbslq_f64(gt, den, vf);
}

static void hadamard_quotient(const double* num, const double* den, double floor,
                              double* out, int len) {
    const float64x2_t vf = vdupq_n_f64(floor);
    int i = 0;
    for (; i + 1 < len; i += 2) {
        float64x2_t vd = floor_guard(vld1q_f64(den + i), vf);
        vst1q_f64(out + i, vdivq_f64(vld1q_f64(num + i), vd));
    }
    for (; i < len; ++i) {
        const double d = den[i] > floor ? den[i] : floor;
        out[i] = num[i] / d;
    }
}

static void mur_apply(const double* h, const double* num, const double* den, double floor,
                      double* out, int len) {
    const float64x2_t vf = vdupq_n_f64(floor);
    int i = 0;
    for (; i + 1 < len; i += 2) {
        float64x2_t vhn = vmulq_f64(vld1q_f64(h + i), vld1q_f64(num + i));
        float64x2_t vd = floor_guard(vld1q_f64(den + i), vf);
        vst1q_f64(out + i, vdivq_f64(vhn, vd));
    }
    for (; i < len; ++i) {
        const double d = den[i] > floor ? den[i] : floor;
        out[i] = (h[i] * num[i]) / d;
    }
}

static void omega_rst(const double* h, double tau, double* out, int len) {
    const double num = 2.0 * (tau + 1.0);
    const float64x2_t vn = vdupq_n_f64(num);
    const float64x2_t vt = vdupq_n_f64(tau);
    int i = 0;
    for (; i + 1 < len; i += 2) {
        float64x2_t vh = vld1q_f64(h + i);
        float64x2_t vd = vaddq_f64(vt, vmulq_f64(vh, vh));
        vst1q_f64(out + i, vdivq_f64(vn, vd));
    }
    for (; i < len; ++i) out[i] = num / (tau + h[i] * h[i]);
}

static void omega_rgdp(const double* h, double tau, double* out, int len) {
    const double num = tau + 1.0;
    const float64x2_t vn = vdupq_n_f64(num);
    const float64x2_t vt = vdupq_n_f64(tau);
    int i = 0;
    for (; i + 1 < len; i += 2) {
        float64x2_t vd = vaddq_f64(vt, vld1q_f64(h + i));
        vst1q_f64(out + i, vdivq_f64(vn, vd));
    }
    for (; i < len; ++i) out[i] = num / (tau + h[i]);
}

}  // namespace neon

const Ops* ops_neon() {
    static const Ops table = {
        "neon",
        neon::gemm_nn,
        neon::gemm_tn,
        neon::axpy,
        neon::hadamard_quotient,
        neon::mur_apply,
        neon::omega_rst,
        neon::omega_rgdp,
    };
    return &table;
}

}  // namespace snnls::kern

#else

namespace snnls::kern {
const Ops* ops_neon() { return nullptr; }
}

#endif
