#pragma once

#include <cstddef>

namespace geomatch::kern {

/// Data-parallel inner loops shared by the cost evaluator, the matching
/// solvers and the clustering code. Every operation has a scalar reference
/// implementation plus SIMD variants (AVX2 on x86-64, NEON on aarch64)
/// selected once at runtime.
///
/// Element-wise kernels are bit-identical across variants: they perform the
/// same sub/mul/add sequence per element and never use FMA, and sqrt is
/// correctly rounded everywhere. min/max reductions are exact, so they match
/// bitwise as well (inputs must be NaN-free). The equivalence suite asserts
/// this with memcmp.
struct Ops {
    const char* name;

    /// out[i] = (xs[i] - qx)^2 + (ys[i] - qy)^2
    void (*sq_dists_to)(double qx, double qy, const double* xs, const double* ys,
                        std::size_t n, double* out);

    /// out[i] = (ax[i] + tx - bx[i])^2 + (ay[i] + ty - by[i])^2
    void (*edge_sq_lengths)(const double* ax, const double* ay, const double* bx,
                            const double* by, double tx, double ty, std::size_t n,
                            double* out);

    /// out[i] = sqrt(in[i]); in-place allowed.
    void (*sqrt_array)(const double* in, std::size_t n, double* out);

    /// Maximum / minimum of a nonempty array.
    double (*max_value)(const double* v, std::size_t n);
    double (*min_value)(const double* v, std::size_t n);
};

/// Scalar reference kernels; always available.
const Ops& scalar_ops();

/// AVX2 / NEON variants; nullptr when not compiled in or the CPU lacks the
/// feature.
const Ops* avx2_ops();
const Ops* neon_ops();

/// Variant chosen at first use: best supported one, overridable with
/// GEOMATCH_SIMD=scalar|avx2|neon (unknown or unsupported values fall back
/// to scalar/auto).
const Ops& active_ops();

inline void sq_dists_to(double qx, double qy, const double* xs, const double* ys,
                        std::size_t n, double* out) {
    active_ops().sq_dists_to(qx, qy, xs, ys, n, out);
}
inline void edge_sq_lengths(const double* ax, const double* ay, const double* bx,
                            const double* by, double tx, double ty, std::size_t n,
                            double* out) {
    active_ops().edge_sq_lengths(ax, ay, bx, by, tx, ty, n, out);
}
inline void sqrt_array(const double* in, std::size_t n, double* out) {
    active_ops().sqrt_array(in, n, out);
}
inline double max_value(const double* v, std::size_t n) {
    return active_ops().max_value(v, n);
}
inline double min_value(const double* v, std::size_t n) {
    return active_ops().min_value(v, n);
}

}  // namespace geomatch::kern
