#include "geomatch/kernels.hpp"

#include <cmath>

// Reference kernels. Compiled with -ffp-contract=off so the expression
// structure below is exactly what runs; the SIMD variants replicate the
// same operation order (no FMA) to stay bit-identical.

namespace geomatch::kern {
namespace {

void sq_dists_to_scalar(double qx, double qy, const double* xs, const double* ys,
                        std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        double dx = xs[i] - qx;
        double dy = ys[i] - qy;
        out[i] = dx * dx + dy * dy;
    }
}

void edge_sq_lengths_scalar(const double* ax, const double* ay, const double* bx,
                            const double* by, double tx, double ty, std::size_t n,
                            double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        double ex = (ax[i] + tx) - bx[i];
        double ey = (ay[i] + ty) - by[i];
        out[i] = ex * ex + ey * ey;
    }
}

void sqrt_array_scalar(const double* in, std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::sqrt(in[i]);
}

double max_value_scalar(const double* v, std::size_t n) {
    double m = v[0];
    for (std::size_t i = 1; i < n; ++i)
        if (v[i] > m) m = v[i];
    return m;
}

double min_value_scalar(const double* v, std::size_t n) {
    double m = v[0];
    for (std::size_t i = 1; i < n; ++i)
        if (v[i] < m) m = v[i];
    return m;
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops = {
        "scalar",          sq_dists_to_scalar, edge_sq_lengths_scalar,
        sqrt_array_scalar, max_value_scalar,   min_value_scalar,
    };
    return ops;
}

}  // namespace geomatch::kern
