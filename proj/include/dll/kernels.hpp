#pragma once

// Dense double-precision kernels behind the network and optimizer inner
// loops. A scalar reference implementation always exists; an AVX2+FMA
// variant is selected at runtime when the CPU supports it. The two backends
// may differ in summation order, so results agree to roundoff, not bitwise.
// Every run on one machine resolves to the same backend, keeping command
// outputs byte-stable. DLL_KERNELS=scalar|avx2 overrides the choice.

#include <cstddef>

namespace dll::kernels {

enum class Backend { Scalar, Avx2 };

Backend active();
const char* backend_name();
// Test hook; throws RangeError if the backend is unsupported on this CPU.
void set_backend(Backend b);
bool avx2_supported();

double dot(const double* a, const double* b, size_t n);
double sum_sq(const double* a, size_t n);
void axpy(double alpha, const double* x, double* y, size_t n);  // y += alpha*x
void relu(const double* z, double* a, size_t n);                // a = max(z, 0)
// g_in = (a > 0) ? g_out : 0  (subgradient 0 at the kink)
void relu_mask(const double* a, const double* g_out, double* g_in, size_t n);
// z[r,:] += b for every row
void add_row_bias(double* z, const double* b, size_t rows, size_t cols);
// out[c] += sum_r g[r,c]
void col_sum_acc(const double* g, double* out, size_t rows, size_t cols);

// All matrices row-major.
// c[m,n] = a[m,k] * b[n,k]^T   (both operands contraction-contiguous)
void matmul_nt(const double* a, const double* b, double* c, size_t m, size_t n, size_t k);
// c[m,k] = a[m,n] * b[n,k]
void matmul_nn(const double* a, const double* b, double* c, size_t m, size_t n, size_t k);
// c[n,k] += a[m,n]^T * b[m,k]
void matmul_tn_acc(const double* a, const double* b, double* c, size_t m, size_t n, size_t k);

// Fused Adam update with precomputed bias corrections bc1 = 1-beta1^t,
// bc2 = 1-beta2^t:
//   m = beta1*m + (1-beta1)*g;  v = beta2*v + (1-beta2)*g^2
//   p -= lr * (m/bc1) / (sqrt(v/bc2) + eps)
void adam_update(double* p, const double* g, double* m, double* v, size_t n, double lr,
                 double beta1, double beta2, double eps, double bc1, double bc2);

// Function-pointer table; one per backend.
struct KernelTable {
  double (*dot)(const double*, const double*, size_t);
  double (*sum_sq)(const double*, size_t);
  void (*axpy)(double, const double*, double*, size_t);
  void (*relu)(const double*, double*, size_t);
  void (*relu_mask)(const double*, const double*, double*, size_t);
  void (*add_row_bias)(double*, const double*, size_t, size_t);
  void (*col_sum_acc)(const double*, double*, size_t, size_t);
  void (*matmul_nt)(const double*, const double*, double*, size_t, size_t, size_t);
  void (*matmul_nn)(const double*, const double*, double*, size_t, size_t, size_t);
  void (*matmul_tn_acc)(const double*, const double*, double*, size_t, size_t, size_t);
  void (*adam_update)(double*, const double*, double*, double*, size_t, double, double, double,
                      double, double, double);
};

const KernelTable& scalar_table();
const KernelTable* avx2_table();  // nullptr when not compiled in / unsupported

}  // namespace dll::kernels
