#include <atomic>
#include <cstdlib>
#include <cstring>
#include <mutex>

#include "dll/errors.hpp"
#include "dll/kernels.hpp"

namespace dll::kernels {
namespace {

std::atomic<const KernelTable*> g_table{nullptr};
std::atomic<Backend> g_backend{Backend::Scalar};
std::once_flag g_init;

void init_dispatch() {
  const char* env = std::getenv("DLL_KERNELS");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) {
    g_table.store(&scalar_table());
    g_backend.store(Backend::Scalar);
    return;
  }
  if (env != nullptr && std::strcmp(env, "avx2") == 0) {
    const KernelTable* t = avx2_table();
    if (t == nullptr) throw RangeError("DLL_KERNELS=avx2 requested but AVX2+FMA is unavailable");
    g_table.store(t);
    g_backend.store(Backend::Avx2);
    return;
  }
  if (const KernelTable* t = avx2_table()) {
    g_table.store(t);
    g_backend.store(Backend::Avx2);
  } else {
    g_table.store(&scalar_table());
    g_backend.store(Backend::Scalar);
  }
}

inline const KernelTable& table() {
  std::call_once(g_init, init_dispatch);
  return *g_table.load(std::memory_order_relaxed);
}

}  // namespace

Backend active() {
  std::call_once(g_init, init_dispatch);
  return g_backend.load(std::memory_order_relaxed);
}

const char* backend_name() { return active() == Backend::Avx2 ? "avx2" : "scalar"; }

void set_backend(Backend b) {
  std::call_once(g_init, init_dispatch);
  if (b == Backend::Avx2) {
    const KernelTable* t = avx2_table();
    if (t == nullptr) throw RangeError("set_backend: AVX2+FMA is unavailable on this CPU");
    g_table.store(t);
  } else {
    g_table.store(&scalar_table());
  }
  g_backend.store(b);
}

double dot(const double* a, const double* b, size_t n) { return table().dot(a, b, n); }
double sum_sq(const double* a, size_t n) { return table().sum_sq(a, n); }
void axpy(double alpha, const double* x, double* y, size_t n) { table().axpy(alpha, x, y, n); }
void relu(const double* z, double* a, size_t n) { table().relu(z, a, n); }
void relu_mask(const double* a, const double* g_out, double* g_in, size_t n) {
  table().relu_mask(a, g_out, g_in, n);
}
void add_row_bias(double* z, const double* b, size_t rows, size_t cols) {
  table().add_row_bias(z, b, rows, cols);
}
void col_sum_acc(const double* g, double* out, size_t rows, size_t cols) {
  table().col_sum_acc(g, out, rows, cols);
}
void matmul_nt(const double* a, const double* b, double* c, size_t m, size_t n, size_t k) {
  table().matmul_nt(a, b, c, m, n, k);
}
void matmul_nn(const double* a, const double* b, double* c, size_t m, size_t n, size_t k) {
  table().matmul_nn(a, b, c, m, n, k);
}
void matmul_tn_acc(const double* a, const double* b, double* c, size_t m, size_t n, size_t k) {
  table().matmul_tn_acc(a, b, c, m, n, k);
}
void adam_update(double* p, const double* g, double* m, double* v, size_t n, double lr,
                 double beta1, double beta2, double eps, double bc1, double bc2) {
  table().adam_update(p, g, m, v, n, lr, beta1, beta2, eps, bc1, bc2);
}

}  // namespace dll::kernels
