// Reference kernels: plain loops, one accumulator, no reassociation tricks.
// The AVX2 backend is equivalence-tested against these.

#include <cmath>
#include <cstring>

#include "dll/kernels.hpp"

namespace dll::kernels {
namespace {

double dot_scalar(const double* a, const double* b, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_sq_scalar(const double* a, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void relu_scalar(const double* z, double* a, size_t n) {
  for (size_t i = 0; i < n; ++i) a[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void relu_mask_scalar(const double* a, const double* g_out, double* g_in, size_t n) {
  for (size_t i = 0; i < n; ++i) g_in[i] = a[i] > 0.0 ? g_out[i] : 0.0;
}

void add_row_bias_scalar(double* z, const double* b, size_t rows, size_t cols) {
  for (size_t r = 0; r < rows; ++r) {
    double* row = z + r * cols;
    for (size_t c = 0; c < cols; ++c) row[c] += b[c];
  }
}

void col_sum_acc_scalar(const double* g, double* out, size_t rows, size_t cols) {
  for (size_t r = 0; r < rows; ++r) {
    const double* row = g + r * cols;
    for (size_t c = 0; c < cols; ++c) out[c] += row[c];
  }
}

void matmul_nt_scalar(const double* a, const double* b, double* c, size_t m, size_t n, size_t k) {
  for (size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * n;
    for (size_t j = 0; j < n; ++j) ci[j] = dot_scalar(ai, b + j * k, k);
  }
}

void matmul_nn_scalar(const double* a, const double* b, double* c, size_t m, size_t n, size_t k) {
  std::memset(c, 0, m * k * sizeof(double));
  for (size_t i = 0; i < m; ++i) {
    const double* ai = a + i * n;
    double* ci = c + i * k;
    for (size_t j = 0; j < n; ++j) axpy_scalar(ai[j], b + j * k, ci, k);
  }
}

void matmul_tn_acc_scalar(const double* a, const double* b, double* c, size_t m, size_t n,
                          size_t k) {
  for (size_t i = 0; i < m; ++i) {
    const double* ai = a + i * n;
    const double* bi = b + i * k;
    for (size_t j = 0; j < n; ++j) axpy_scalar(ai[j], bi, c + j * k, k);
  }
}

void adam_update_scalar(double* p, const double* g, double* m, double* v, size_t n, double lr,
                        double beta1, double beta2, double eps, double bc1, double bc2) {
  const double om1 = 1.0 - beta1;
  const double om2 = 1.0 - beta2;
  const double inv_bc1 = 1.0 / bc1;
  const double inv_bc2 = 1.0 / bc2;
  for (size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + om1 * g[i];
    v[i] = beta2 * v[i] + om2 * g[i] * g[i];
    p[i] -= lr * (m[i] * inv_bc1) / (std::sqrt(v[i] * inv_bc2) + eps);
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table = {
      dot_scalar,        sum_sq_scalar,      axpy_scalar,      relu_scalar,
      relu_mask_scalar,  add_row_bias_scalar, col_sum_acc_scalar,
      matmul_nt_scalar,  matmul_nn_scalar,   matmul_tn_acc_scalar,
      adam_update_scalar};
  return table;
}

}  // namespace dll::kernels
