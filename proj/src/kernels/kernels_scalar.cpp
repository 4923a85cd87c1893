#include "soccersum/kernels/kernels.hpp"

namespace soccersum::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_acc_scalar(const double* W, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] += dot_scalar(W + r * cols, x, cols);
}

void gemv_t_acc_scalar(const double* W, std::size_t rows, std::size_t cols, const double* g, double* x_grad) {
    for (std::size_t r = 0; r < rows; ++r) axpy_scalar(g[r], W + r * cols, x_grad, cols);
}

void ger_acc_scalar(double* W_grad, std::size_t rows, std::size_t cols, const double* g, const double* x) {
    for (std::size_t r = 0; r < rows; ++r) axpy_scalar(g[r], x, W_grad + r * cols, cols);
}

void power_spectrum_scalar(const double* z, std::size_t bins, double* out) {
    for (std::size_t k = 0; k < bins; ++k) out[k] = z[2 * k] * z[2 * k] + z[2 * k + 1] * z[2 * k + 1];
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{
        "scalar", dot_scalar, axpy_scalar, gemv_acc_scalar, gemv_t_acc_scalar, ger_acc_scalar, power_spectrum_scalar,
    };
    return table;
}

}  // namespace soccersum::kernels
