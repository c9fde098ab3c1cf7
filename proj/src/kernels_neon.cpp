#include "geomatch/kernels.hpp"

// NEON variants, 2 doubles per vector. Same operation order as the scalar
// reference (separate mul and add, no vfma) for bit-equivalence.

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>

namespace geomatch::kern {
namespace {

void sq_dists_to_neon(double qx, double qy, const double* xs, const double* ys,
                      std::size_t n, double* out) {
    const float64x2_t vqx = vdupq_n_f64(qx);
    const float64x2_t vqy = vdupq_n_f64(qy);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t dx = vsubq_f64(vld1q_f64(xs + i), vqx);
        float64x2_t dy = vsubq_f64(vld1q_f64(ys + i), vqy);
        vst1q_f64(out + i, vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy)));
    }
    for (; i < n; ++i) {
        double dx = xs[i] - qx;
        double dy = ys[i] - qy;
        out[i] = dx * dx + dy * dy;
    }
}

void edge_sq_lengths_neon(const double* ax, const double* ay, const double* bx,
                          const double* by, double tx, double ty, std::size_t n,
                          double* out) {
    const float64x2_t vtx = vdupq_n_f64(tx);
    const float64x2_t vty = vdupq_n_f64(ty);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t ex = vsubq_f64(vaddq_f64(vld1q_f64(ax + i), vtx), vld1q_f64(bx + i));
        float64x2_t ey = vsubq_f64(vaddq_f64(vld1q_f64(ay + i), vty), vld1q_f64(by + i));
        vst1q_f64(out + i, vaddq_f64(vmulq_f64(ex, ex), vmulq_f64(ey, ey)));
    }
    for (; i < n; ++i) {
        double ex = (ax[i] + tx) - bx[i];
        double ey = (ay[i] + ty) - by[i];
        out[i] = ex * ex + ey * ey;
    }
}

void sqrt_array_neon(const double* in, std::size_t n, double* out) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vsqrtq_f64(vld1q_f64(in + i)));
    for (; i < n; ++i) out[i] = std::sqrt(in[i]);
}

double max_value_neon(const double* v, std::size_t n) {
    std::size_t i = 0;
    double m;
    if (n >= 2) {
        float64x2_t acc = vld1q_f64(v);
        for (i = 2; i + 2 <= n; i += 2) acc = vmaxq_f64(acc, vld1q_f64(v + i));
        m = vmaxvq_f64(acc);
    } else {
        m = v[0];
        i = 1;
    }
    for (; i < n; ++i)
        if (v[i] > m) m = v[i];
    return m;
}

double min_value_neon(const double* v, std::size_t n) {
    std::size_t i = 0;
    double m;
    if (n >= 2) {
        float64x2_t acc = vld1q_f64(v);
        for (i = 2; i + 2 <= n; i += 2) acc = vminq_f64(acc, vld1q_f64(v + i));
        m = vminvq_f64(acc);
    } else {
        m = v[0];
        i = 1;
    }
    for (; i < n; ++i)
        if (v[i] < m) m = v[i];
    return m;
}

}  // namespace

const Ops* neon_ops_impl() {
    static const Ops ops = {
        "neon",          sq_dists_to_neon, edge_sq_lengths_neon,
        sqrt_array_neon, max_value_neon,   min_value_neon,
    };
    return &ops;
}

}  // namespace geomatch::kern

#endif  // __aarch64__
