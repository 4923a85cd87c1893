// NEON (aarch64, 2 x f64 lanes) variants.
#include "soccersum/kernels/kernels.hpp"

#include <arm_neon.h>

namespace soccersum::kernels {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_acc_neon(const double* W, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] += dot_neon(W + r * cols, x, cols);
}

void gemv_t_acc_neon(const double* W, std::size_t rows, std::size_t cols, const double* g, double* x_grad) {
    for (std::size_t r = 0; r < rows; ++r) axpy_neon(g[r], W + r * cols, x_grad, cols);
}

void ger_acc_neon(double* W_grad, std::size_t rows, std::size_t cols, const double* g, const double* x) {
    for (std::size_t r = 0; r < rows; ++r) axpy_neon(g[r], x, W_grad + r * cols, cols);
}

void power_spectrum_neon(const double* z, std::size_t bins, double* out) {
    for (std::size_t k = 0; k < bins; ++k) {
        float64x2_t v = vld1q_f64(z + 2 * k);
        out[k] = vaddvq_f64(vmulq_f64(v, v));
    }
}

}  // namespace

const KernelTable& neon_table() {
    static const KernelTable table{
        "neon", dot_neon, axpy_neon, gemv_acc_neon, gemv_t_acc_neon, ger_acc_neon, power_spectrum_neon,
    };
    return table;
}

}  // namespace soccersum::kernels
