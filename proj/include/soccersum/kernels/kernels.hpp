#pragma once
// Dense double-precision kernels used by the recurrent layers and the audio
// front end. Every kernel has a scalar reference implementation; vectorized
// variants (AVX2+FMA on x86-64, NEON on aarch64) are selected once at runtime.
//
// Matrices are row-major: element (r, c) of a rows x cols matrix lives at
// W[r * cols + c].

#include <cstddef>

namespace soccersum::kernels {

struct KernelTable {
    const char* name;

    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // y += W x
    void (*gemv_acc)(const double* W, std::size_t rows, std::size_t cols, const double* x, double* y);
    // x_grad += W^T g
    void (*gemv_t_acc)(const double* W, std::size_t rows, std::size_t cols, const double* g, double* x_grad);
    // W_grad += g x^T
    void (*ger_acc)(double* W_grad, std::size_t rows, std::size_t cols, const double* g, const double* x);
    // out[k] = re[k]^2 + im[k]^2 for interleaved complex input
    void (*power_spectrum)(const double* interleaved, std::size_t bins, double* out);
};

enum class Isa { scalar, avx2, neon };

const KernelTable& scalar_table();
#if defined(SOCCERSUM_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(SOCCERSUM_HAVE_NEON)
const KernelTable& neon_table();
#endif

// True when the running CPU can execute the given variant and it was compiled in.
bool isa_available(Isa isa);

// Table for a specific variant; throws std::invalid_argument if unavailable.
const KernelTable& table_for(Isa isa);

// Active table. Chosen on first use: the best available variant, unless the
// SOCCERSUM_SIMD environment variable names one of "scalar", "avx2", "neon".
const KernelTable& active();

// Overrides the active table (tests and benchmarking).
void force(Isa isa);

inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) { active().axpy(alpha, x, y, n); }
inline void gemv_acc(const double* W, std::size_t rows, std::size_t cols, const double* x, double* y) {
    active().gemv_acc(W, rows, cols, x, y);
}
inline void gemv_t_acc(const double* W, std::size_t rows, std::size_t cols, const double* g, double* x_grad) {
    active().gemv_t_acc(W, rows, cols, g, x_grad);
}
inline void ger_acc(double* W_grad, std::size_t rows, std::size_t cols, const double* g, const double* x) {
    active().ger_acc(W_grad, rows, cols, g, x);
}
inline void power_spectrum(const double* interleaved, std::size_t bins, double* out) {
    active().power_spectrum(interleaved, bins, out);
}

}  // namespace soccersum::kernels
