#include "geomatch/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace geomatch::kern {

// GEOMATCH_HAVE_AVX2 marks that the AVX2 TU was built (this TU itself is
// compiled for the baseline ISA; the CPU check below gates actual use).
#if defined(GEOMATCH_HAVE_AVX2)
const Ops* avx2_ops_impl();
#endif
#if defined(__aarch64__)
const Ops* neon_ops_impl();
#endif

const Ops* avx2_ops() {
#if defined(GEOMATCH_HAVE_AVX2)
#if defined(__GNUC__) || defined(__clang__)
    static const bool supported = __builtin_cpu_supports("avx2");
#else
    static const bool supported = false;
#endif
    return supported ? avx2_ops_impl() : nullptr;
#else
    return nullptr;
#endif
}

const Ops* neon_ops() {
#if defined(__aarch64__)
    return neon_ops_impl();  // baseline on aarch64
#else
    return nullptr;
#endif
}

namespace {

const Ops& select_ops() {
    const char* pref = std::getenv("GEOMATCH_SIMD");
    if (pref != nullptr) {
        if (std::strcmp(pref, "scalar") == 0) return scalar_ops();
        if (std::strcmp(pref, "avx2") == 0 && avx2_ops() != nullptr) return *avx2_ops();
        if (std::strcmp(pref, "neon") == 0 && neon_ops() != nullptr) return *neon_ops();
        if (std::strcmp(pref, "auto") != 0) return scalar_ops();
    }
    if (avx2_ops() != nullptr) return *avx2_ops();
    if (neon_ops() != nullptr) return *neon_ops();
    return scalar_ops();
}

}  // namespace

const Ops& active_ops() {
    static const Ops& ops = select_ops();
    return ops;
}

}  // namespace geomatch::kern
