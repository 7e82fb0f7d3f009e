#pragma once

#include <cstddef>

// Dispatched arithmetic kernels. Each entry point has a scalar reference
// implementation and SIMD variants selected once at runtime. All variants are
// bit-identical: element-wise kernels are lane-pure, and gemm vectorizes
// across output columns so every output element accumulates over k in the
// same sequential order as the scalar loop. Build-wide -ffp-contract=off
// keeps the compiler from fusing mul+add on any path.

namespace snnls::kern {

struct Ops {
    const char* name;

    // C(m x n) = A(m x p) * B(p x n), C preset to zero by the kernel.
    void (*gemm_nn)(const double* a, const double* b, double* c, int m, int p, int n);
    // C(m x n) = A^T * B with A(p x m), B(p x n).
    void (*gemm_tn)(const double* a, const double* b, double* c, int m, int p, int n);
    // acc[i] += s * row[i]
    void (*axpy)(double s, const double* row, double* acc, int len);
    // out[i] = num[i] / max(den[i], floor)
    void (*hadamard_quotient)(const double* num, const double* den, double floor,
                              double* out, int len);
    // out[i] = (h[i] * num[i]) / max(den[i], floor)
    void (*mur_apply)(const double* h, const double* num, const double* den, double floor,
                      double* out, int len);
    // out[i] = 2(tau+1) / (tau + h[i]^2)
    void (*omega_rst)(const double* h, double tau, double* out, int len);
    // out[i] = (tau+1) / (tau + h[i])
    void (*omega_rgdp)(const double* h, double tau, double* out, int len);
};

// Active table. Chosen once: SNNLS_KERNEL=scalar|avx2|neon overrides, else the
// best supported ISA. Thread-safe.
const Ops& ops();

// Named tables for equivalence tests. Null if the build or CPU lacks the ISA.
const Ops* ops_scalar();
const Ops* ops_avx2();
const Ops* ops_neon();

}  // namespace snnls::kern
