// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after dispatch has confirmed CPU support.
#include "soccersum/kernels/kernels.hpp"

#include <immintrin.h>

namespace soccersum::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_acc_avx2(const double* W, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] += dot_avx2(W + r * cols, x, cols);
}

void gemv_t_acc_avx2(const double* W, std::size_t rows, std::size_t cols, const double* g, double* x_grad) {
    for (std::size_t r = 0; r < rows; ++r) axpy_avx2(g[r], W + r * cols, x_grad, cols);
}

void ger_acc_avx2(double* W_grad, std::size_t rows, std::size_t cols, const double* g, const double* x) {
    for (std::size_t r = 0; r < rows; ++r) axpy_avx2(g[r], x, W_grad + r * cols, cols);
}

void power_spectrum_avx2(const double* z, std::size_t bins, double* out) {
    std::size_t k = 0;
    for (; k + 2 <= bins; k += 2) {
        // [re0 im0 re1 im1] -> [re0^2+im0^2, re1^2+im1^2]
        __m256d v = _mm256_loadu_pd(z + 2 * k);
        __m256d sq = _mm256_mul_pd(v, v);
        __m256d sw = _mm256_permute_pd(sq, 0x5);
        __m256d s = _mm256_add_pd(sq, sw);
        out[k] = _mm256_cvtsd_f64(s);
        out[k + 1] = _mm_cvtsd_f64(_mm256_extractf128_pd(s, 1));
    }
    for (; k < bins; ++k) out[k] = z[2 * k] * z[2 * k] + z[2 * k + 1] * z[2 * k + 1];
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable table{
        "avx2", dot_avx2, axpy_avx2, gemv_acc_avx2, gemv_t_acc_avx2, ger_acc_avx2, power_spectrum_avx2,
    };
    return table;
}

}  // namespace soccersum::kernels
