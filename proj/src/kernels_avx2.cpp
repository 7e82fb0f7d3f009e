#include "snnls/kernels.hpp"

// AVX2 kernels. Vector lanes hold independent output elements, so each
// element sees the identical operation sequence as the scalar reference.
// Plain mul+add only: FMA would change rounding and break bit-equivalence.

#if defined(__AVX2__)
#include <immintrin.h>

namespace snnls::kern {
namespace avx2 {

static void gemm_nn(const double* a, const double* b, double* c, int m, int p, int n) {
    for (long i = 0; i < static_cast<long>(m) * n; ++i) c[i] = 0.0;
    for (int i = 0; i < m; ++i) {
        double* ci = c + static_cast<long>(i) * n;
        const double* ai = a + static_cast<long>(i) * p;
        for (int k = 0; k < p; ++k) {
            const double aik = ai[k];
            const double* bk = b + static_cast<long>(k) * n;
            const __m256d va = _mm256_set1_pd(aik);
            int j = 0;
            for (; j + 3 < n; j += 4) {
                __m256d vc = _mm256_loadu_pd(ci + j);
                __m256d vb = _mm256_loadu_pd(bk + j);
                vc = _mm256_add_pd(vc, _mm256_mul_pd(va, vb));
                _mm256_storeu_pd(ci + j, vc);
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
            const __m256d va = _mm256_set1_pd(aki);
            int j = 0;
            for (; j + 3 < n; j += 4) {
                __m256d vc = _mm256_loadu_pd(ci + j);
                __m256d vb = _mm256_loadu_pd(bk + j);
                vc = _mm256_add_pd(vc, _mm256_mul_pd(va, vb));
                _mm256_storeu_pd(ci + j, vc);
            }
            for (; j < n; ++j) ci[j] += aki * bk[j];
        }
    }
}

static void axpy(double s, const double* row, double* acc, int len) {
    const __m256d vs = _mm256_set1_pd(s);
    int i = 0;
    for (; i + 3 < len; i += 4) {
        __m256d va = _mm256_loadu_pd(acc + i);
        __m256d vr = _mm256_loadu_pd(row + i);
        va = _mm256_add_pd(va, _mm256_mul_pd(vs, vr));
        _mm256_storeu_pd(acc + i, va);
    }
    for (; i < len; ++i) acc[i] += s * row[i];
}

static void hadamard_quotient(const double* num, const double* den, double floor,
                              double* out, int len) {
    const __m256d vf = _mm256_set1_pd(floor);
    int i = 0;
    for (; i + 3 < len; i += 4) {
        __m256d vd = _mm256_max_pd(_mm256_loadu_pd(den + i), vf);
        _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_loadu_pd(num + i), vd));
    }
    for (; i < len; ++i) {
        const double d = den[i] > floor ? den[i] : floor;
        out[i] = num[i] / d;
    }
}

static void mur_apply(const double* h, const double* num, const double* den, double floor,
                      double* out, int len) {
    const __m256d vf = _mm256_set1_pd(floor);
    int i = 0;
    for (; i + 3 < len; i += 4) {
        __m256d vhn = _mm256_mul_pd(_mm256_loadu_pd(h + i), _mm256_loadu_pd(num + i));
        __m256d vd = _mm256_max_pd(_mm256_loadu_pd(den + i), vf);
        _mm256_storeu_pd(out + i, _mm256_div_pd(vhn, vd));
    }
    for (; i < len; ++i) {
        const double d = den[i] > floor ? den[i] : floor;
        out[i] = (h[i] * num[i]) / d;
    }
}

static void omega_rst(const double* h, double tau, double* out, int len) {
    const double num = 2.0 * (tau + 1.0);
    const __m256d vn = _mm256_set1_pd(num);
    const __m256d vt = _mm256_set1_pd(tau);
    int i = 0;
    for (; i + 3 < len; i += 4) {
        __m256d vh = _mm256_loadu_pd(h + i);
        __m256d vd = _mm256_add_pd(vt, _mm256_mul_pd(vh, vh));
        _mm256_storeu_pd(out + i, _mm256_div_pd(vn, vd));
    }
    for (; i < len; ++i) out[i] = num / (tau + h[i] * h[i]);
}

static void omega_rgdp(const double* h, double tau, double* out, int len) {
    const double num = tau + 1.0;
    const __m256d vn = _mm256_set1_pd(num);
    const __m256d vt = _mm256_set1_pd(tau);
    int i = 0;
    for (; i + 3 < len; i += 4) {
        __m256d vd = _mm256_add_pd(vt, _mm256_loadu_pd(h + i));
        _mm256_storeu_pd(out + i, _mm256_div_pd(vn, vd));
    }
    for (; i < len; ++i) out[i] = num / (tau + h[i]);
}

}  // namespace avx2

const Ops* ops_avx2() {
    static const Ops table = {
        "avx2",
        avx2::gemm_nn,
        avx2::gemm_tn,
        avx2::axpy,
        avx2::hadamard_quotient,
        avx2::mur_apply,
        avx2::omega_rst,
        avx2::omega_rgdp,
    };
    return &table;
}

}  // namespace snnls::kern

#else

namespace snnls::kern {
const Ops* ops_avx2() { return nullptr; }
}

#endif
