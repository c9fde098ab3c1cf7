#include "geomatch/kernels.hpp"

// AVX2 variants, 4 doubles per lane group. Multiplies and adds are kept
// separate (no _mm256_fmadd_pd): contraction would change rounding and break
// bit-equivalence with the scalar reference. Tails run the scalar expression.

#if defined(__AVX2__)

#include <immintrin.h>

#include <cmath>

namespace geomatch::kern {
namespace {

void sq_dists_to_avx2(double qx, double qy, const double* xs, const double* ys,
                      std::size_t n, double* out) {
    const __m256d vqx = _mm256_set1_pd(qx);
    const __m256d vqy = _mm256_set1_pd(qy);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vqx);
        __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vqy);
        __m256d r = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
        _mm256_storeu_pd(out + i, r);
    }
    for (; i < n; ++i) {
        double dx = xs[i] - qx;
        double dy = ys[i] - qy;
        out[i] = dx * dx + dy * dy;
    }
}

void edge_sq_lengths_avx2(const double* ax, const double* ay, const double* bx,
                          const double* by, double tx, double ty, std::size_t n,
                          double* out) {
    const __m256d vtx = _mm256_set1_pd(tx);
    const __m256d vty = _mm256_set1_pd(ty);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d ex = _mm256_sub_pd(_mm256_add_pd(_mm256_loadu_pd(ax + i), vtx),
                                   _mm256_loadu_pd(bx + i));
        __m256d ey = _mm256_sub_pd(_mm256_add_pd(_mm256_loadu_pd(ay + i), vty),
                                   _mm256_loadu_pd(by + i));
        __m256d r = _mm256_add_pd(_mm256_mul_pd(ex, ex), _mm256_mul_pd(ey, ey));
        _mm256_storeu_pd(out + i, r);
    }
    for (; i < n; ++i) {
        double ex = (ax[i] + tx) - bx[i];
        double ey = (ay[i] + ty) - by[i];
        out[i] = ex * ex + ey * ey;
    }
}

void sqrt_array_avx2(const double* in, std::size_t n, double* out) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_sqrt_pd(_mm256_loadu_pd(in + i)));
    for (; i < n; ++i) out[i] = std::sqrt(in[i]);
}

double reduce_max(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d m = _mm_max_pd(lo, hi);
    m = _mm_max_sd(m, _mm_unpackhi_pd(m, m));
    return _mm_cvtsd_f64(m);
}

double reduce_min(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d m = _mm_min_pd(lo, hi);
    m = _mm_min_sd(m, _mm_unpackhi_pd(m, m));
    return _mm_cvtsd_f64(m);
}

double max_value_avx2(const double* v, std::size_t n) {
    std::size_t i = 0;
    double m;
    if (n >= 4) {
        __m256d acc = _mm256_loadu_pd(v);
        for (i = 4; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(v + i));
        m = reduce_max(acc);
    } else {
        m = v[0];
        i = 1;
    }
    for (; i < n; ++i)
        if (v[i] > m) m = v[i];
    return m;
}

double min_value_avx2(const double* v, std::size_t n) {
    std::size_t i = 0;
    double m;
    if (n >= 4) {
        __m256d acc = _mm256_loadu_pd(v);
        for (i = 4; i + 4 <= n; i += 4) acc = _mm256_min_pd(acc, _mm256_loadu_pd(v + i));
        m = reduce_min(acc);
    } else {
        m = v[0];
        i = 1;
    }
    for (; i < n; ++i)
        if (v[i] < m) m = v[i];
    return m;
}

}  // namespace

const Ops* avx2_ops_impl() {
    static const Ops ops = {
        "avx2",          sq_dists_to_avx2, edge_sq_lengths_avx2,
        sqrt_array_avx2, max_value_avx2,   min_value_avx2,
    };
    return &ops;
}

}  // namespace geomatch::kern

#endif  // __AVX2__
