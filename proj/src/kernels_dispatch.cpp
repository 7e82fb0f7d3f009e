#include "snnls/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace snnls::kern {

// Stubs for ISA tables whose translation units are not in this build.
#if !defined(SNNLS_ENABLE_AVX2)
const Ops* ops_avx2() { return nullptr; }
#endif
#if !defined(SNNLS_ENABLE_NEON)
const Ops* ops_neon() { return nullptr; }
#endif

static const Ops* select() {
    if (const char* force = std::getenv("SNNLS_KERNEL")) {
        if (std::strcmp(force, "scalar") == 0) return ops_scalar();
        if (std::strcmp(force, "avx2") == 0 && ops_avx2()) return ops_avx2();
        if (std::strcmp(force, "neon") == 0 && ops_neon()) return ops_neon();
        return ops_scalar();
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (ops_avx2() && __builtin_cpu_supports("avx2")) return ops_avx2();
#endif
    if (ops_neon()) return ops_neon();
    return ops_scalar();
}

const Ops& ops() {
    static const Ops* active = select();
    return *active;
}

}  // namespace snnls::kern
