// AVX2+FMA kernels. Compiled with -mavx2 -mfma in its own translation unit;
// only reached through the dispatch table after a runtime CPU check.

#include "dll/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstring>

namespace dll::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swap = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swap));
}

double dot_avx2(const double* a, const double* b, size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
    acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double acc = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_sq_avx2(const double* a, size_t n) { return dot_avx2(a, a, n); }

void axpy_avx2(double alpha, const double* x, double* y, size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void relu_avx2(const double* z, double* a, size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(a + i, _mm256_max_pd(_mm256_loadu_pd(z + i), zero));
  for (; i < n; ++i) a[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void relu_mask_avx2(const double* a, const double* g_out, double* g_in, size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(a + i), zero, _CMP_GT_OQ);
    _mm256_storeu_pd(g_in + i, _mm256_and_pd(mask, _mm256_loadu_pd(g_out + i)));
  }
  for (; i < n; ++i) g_in[i] = a[i] > 0.0 ? g_out[i] : 0.0;
}

void add_row_bias_avx2(double* z, const double* b, size_t rows, size_t cols) {
  for (size_t r = 0; r < rows; ++r) {
    double* row = z + r * cols;
    size_t c = 0;
    for (; c + 4 <= cols; c += 4)
      _mm256_storeu_pd(row + c, _mm256_add_pd(_mm256_loadu_pd(row + c), _mm256_loadu_pd(b + c)));
    for (; c < cols; ++c) row[c] += b[c];
  }
}

void col_sum_acc_avx2(const double* g, double* out, size_t rows, size_t cols) {
  for (size_t r = 0; r < rows; ++r) {
    const double* row = g + r * cols;
    size_t c = 0;
    for (; c + 4 <= cols; c += 4)
      _mm256_storeu_pd(out + c, _mm256_add_pd(_mm256_loadu_pd(out + c), _mm256_loadu_pd(row + c)));
    for (; c < cols; ++c) out[c] += row[c];
  }
}

// c[m,n] = a[m,k] * b[n,k]^T, 2x4 register tile over (rows of a) x (rows of b).
void matmul_nt_avx2(const double* a, const double* b, double* c, size_t m, size_t n, size_t k) {
  const size_t k4 = k & ~size_t(3);
  size_t i = 0;
  for (; i + 2 <= m; i += 2) {
    const double* a0 = a + i * k;
    const double* a1 = a0 + k;
    double* c0 = c + i * n;
    double* c1 = c0 + n;
    size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      const double* b0 = b + j * k;
      const double* b1 = b0 + k;
      const double* b2 = b1 + k;
      const double* b3 = b2 + k;
      __m256d s00 = _mm256_setzero_pd(), s01 = _mm256_setzero_pd();
      __m256d s02 = _mm256_setzero_pd(), s03 = _mm256_setzero_pd();
      __m256d s10 = _mm256_setzero_pd(), s11 = _mm256_setzero_pd();
      __m256d s12 = _mm256_setzero_pd(), s13 = _mm256_setzero_pd();
      for (size_t kk = 0; kk < k4; kk += 4) {
        const __m256d va0 = _mm256_loadu_pd(a0 + kk);
        const __m256d va1 = _mm256_loadu_pd(a1 + kk);
        const __m256d vb0 = _mm256_loadu_pd(b0 + kk);
        const __m256d vb1 = _mm256_loadu_pd(b1 + kk);
        const __m256d vb2 = _mm256_loadu_pd(b2 + kk);
        const __m256d vb3 = _mm256_loadu_pd(b3 + kk);
        s00 = _mm256_fmadd_pd(va0, vb0, s00);
        s01 = _mm256_fmadd_pd(va0, vb1, s01);
        s02 = _mm256_fmadd_pd(va0, vb2, s02);
        s03 = _mm256_fmadd_pd(va0, vb3, s03);
        s10 = _mm256_fmadd_pd(va1, vb0, s10);
        s11 = _mm256_fmadd_pd(va1, vb1, s11);
        s12 = _mm256_fmadd_pd(va1, vb2, s12);
        s13 = _mm256_fmadd_pd(va1, vb3, s13);
      }
      double r00 = hsum(s00), r01 = hsum(s01), r02 = hsum(s02), r03 = hsum(s03);
      double r10 = hsum(s10), r11 = hsum(s11), r12 = hsum(s12), r13 = hsum(s13);
      for (size_t kk = k4; kk < k; ++kk) {
        r00 += a0[kk] * b0[kk];
        r01 += a0[kk] * b1[kk];
        r02 += a0[kk] * b2[kk];
        r03 += a0[kk] * b3[kk];
        r10 += a1[kk] * b0[kk];
        r11 += a1[kk] * b1[kk];
        r12 += a1[kk] * b2[kk];
        r13 += a1[kk] * b3[kk];
      }
      c0[j] = r00; c0[j + 1] = r01; c0[j + 2] = r02; c0[j + 3] = r03;
      c1[j] = r10; c1[j + 1] = r11; c1[j + 2] = r12; c1[j + 3] = r13;
    }
    for (; j < n; ++j) {
      c0[j] = dot_avx2(a0, b + j * k, k);
      c1[j] = dot_avx2(a1, b + j * k, k);
    }
  }
  for (; i < m; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * n;
    for (size_t j = 0; j < n; ++j) ci[j] = dot_avx2(ai, b + j * k, k);
  }
}

// c[m,k] = a[m,n] * b[n,k]; rows of c accumulated in 16-wide register chunks,
// two rows of a at a time.
void matmul_nn_avx2(const double* a, const double* b, double* c, size_t m, size_t n, size_t k) {
  std::memset(c, 0, m * k * sizeof(double));
  const size_t kc = k & ~size_t(15);
  size_t i = 0;
  for (; i + 2 <= m; i += 2) {
    const double* a0 = a + i * n;
    const double* a1 = a0 + n;
    double* c0 = c + i * k;
    double* c1 = c0 + k;
    for (size_t c0off = 0; c0off < kc; c0off += 16) {
      __m256d s00 = _mm256_setzero_pd(), s01 = _mm256_setzero_pd();
      __m256d s02 = _mm256_setzero_pd(), s03 = _mm256_setzero_pd();
      __m256d s10 = _mm256_setzero_pd(), s11 = _mm256_setzero_pd();
      __m256d s12 = _mm256_setzero_pd(), s13 = _mm256_setzero_pd();
      for (size_t j = 0; j < n; ++j) {
        const double* bj = b + j * k + c0off;
        const __m256d va0 = _mm256_set1_pd(a0[j]);
        const __m256d va1 = _mm256_set1_pd(a1[j]);
        const __m256d vb0 = _mm256_loadu_pd(bj);
        const __m256d vb1 = _mm256_loadu_pd(bj + 4);
        const __m256d vb2 = _mm256_loadu_pd(bj + 8);
        const __m256d vb3 = _mm256_loadu_pd(bj + 12);
        s00 = _mm256_fmadd_pd(va0, vb0, s00);
        s01 = _mm256_fmadd_pd(va0, vb1, s01);
        s02 = _mm256_fmadd_pd(va0, vb2, s02);
        s03 = _mm256_fmadd_pd(va0, vb3, s03);
        s10 = _mm256_fmadd_pd(va1, vb0, s10);
        s11 = _mm256_fmadd_pd(va1, vb1, s11);
        s12 = _mm256_fmadd_pd(va1, vb2, s12);
        s13 = _mm256_fmadd_pd(va1, vb3, s13);
      }
      _mm256_storeu_pd(c0 + c0off, s00);
      _mm256_storeu_pd(c0 + c0off + 4, s01);
      _mm256_storeu_pd(c0 + c0off + 8, s02);
      _mm256_storeu_pd(c0 + c0off + 12, s03);
      _mm256_storeu_pd(c1 + c0off, s10);
      _mm256_storeu_pd(c1 + c0off + 4, s11);
      _mm256_storeu_pd(c1 + c0off + 8, s12);
      _mm256_storeu_pd(c1 + c0off + 12, s13);
    }
    for (size_t j = 0; j < n; ++j) {
      const double a0j = a0[j];
      const double a1j = a1[j];
      const double* bj = b + j * k;
      for (size_t cc = kc; cc < k; ++cc) {
        c0[cc] += a0j * bj[cc];
        c1[cc] += a1j * bj[cc];
      }
    }
  }
  for (; i < m; ++i) {
    const double* ai = a + i * n;
    double* ci = c + i * k;
    for (size_t j = 0; j < n; ++j) axpy_avx2(ai[j], b + j * k, ci, k);
  }
}

// c[n,k] += a[m,n]^T * b[m,k]; blocked over m so a block of a and b stays
// cache-resident, two c rows per pass.
void matmul_tn_acc_avx2(const double* a, const double* b, double* c, size_t m, size_t n,
                        size_t k) {
  constexpr size_t kBlock = 64;
  const size_t kc = k & ~size_t(15);
  for (size_t i0 = 0; i0 < m; i0 += kBlock) {
    const size_t i1 = (i0 + kBlock < m) ? i0 + kBlock : m;
    size_t j = 0;
    for (; j + 2 <= n; j += 2) {
      double* cr0 = c + j * k;
      double* cr1 = cr0 + k;
      for (size_t cc = 0; cc < kc; cc += 16) {
        __m256d s00 = _mm256_loadu_pd(cr0 + cc);
        __m256d s01 = _mm256_loadu_pd(cr0 + cc + 4);
        __m256d s02 = _mm256_loadu_pd(cr0 + cc + 8);
        __m256d s03 = _mm256_loadu_pd(cr0 + cc + 12);
        __m256d s10 = _mm256_loadu_pd(cr1 + cc);
        __m256d s11 = _mm256_loadu_pd(cr1 + cc + 4);
        __m256d s12 = _mm256_loadu_pd(cr1 + cc + 8);
        __m256d s13 = _mm256_loadu_pd(cr1 + cc + 12);
        for (size_t i = i0; i < i1; ++i) {
          const double* bi = b + i * k + cc;
          const __m256d va0 = _mm256_set1_pd(a[i * n + j]);
          const __m256d va1 = _mm256_set1_pd(a[i * n + j + 1]);
          const __m256d vb0 = _mm256_loadu_pd(bi);
          const __m256d vb1 = _mm256_loadu_pd(bi + 4);
          const __m256d vb2 = _mm256_loadu_pd(bi + 8);
          const __m256d vb3 = _mm256_loadu_pd(bi + 12);
          s00 = _mm256_fmadd_pd(va0, vb0, s00);
          s01 = _mm256_fmadd_pd(va0, vb1, s01);
          s02 = _mm256_fmadd_pd(va0, vb2, s02);
          s03 = _mm256_fmadd_pd(va0, vb3, s03);
          s10 = _mm256_fmadd_pd(va1, vb0, s10);
          s11 = _mm256_fmadd_pd(va1, vb1, s11);
          s12 = _mm256_fmadd_pd(va1, vb2, s12);
          s13 = _mm256_fmadd_pd(va1, vb3, s13);
        }
        _mm256_storeu_pd(cr0 + cc, s00);
        _mm256_storeu_pd(cr0 + cc + 4, s01);
        _mm256_storeu_pd(cr0 + cc + 8, s02);
        _mm256_storeu_pd(cr0 + cc + 12, s03);
        _mm256_storeu_pd(cr1 + cc, s10);
        _mm256_storeu_pd(cr1 + cc + 4, s11);
        _mm256_storeu_pd(cr1 + cc + 8, s12);
        _mm256_storeu_pd(cr1 + cc + 12, s13);
      }
      for (size_t i = i0; i < i1; ++i) {
        const double a0 = a[i * n + j];
        const double a1 = a[i * n + j + 1];
        const double* bi = b + i * k;
        for (size_t cc = kc; cc < k; ++cc) {
          cr0[cc] += a0 * bi[cc];
          cr1[cc] += a1 * bi[cc];
        }
      }
    }
    for (; j < n; ++j) {
      double* cj = c + j * k;
      for (size_t i = i0; i < i1; ++i) axpy_avx2(a[i * n + j], b + i * k, cj, k);
    }
  }
}

void adam_update_avx2(double* p, const double* g, double* m, double* v, size_t n, double lr,
                      double beta1, double beta2, double eps, double bc1, double bc2) {
  const __m256d vb1 = _mm256_set1_pd(beta1);
  const __m256d vb2 = _mm256_set1_pd(beta2);
  const __m256d vo1 = _mm256_set1_pd(1.0 - beta1);
  const __m256d vo2 = _mm256_set1_pd(1.0 - beta2);
  const __m256d vlr = _mm256_set1_pd(lr);
  const __m256d veps = _mm256_set1_pd(eps);
  const __m256d vibc1 = _mm256_set1_pd(1.0 / bc1);
  const __m256d vibc2 = _mm256_set1_pd(1.0 / bc2);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vg = _mm256_loadu_pd(g + i);
    __m256d vm = _mm256_fmadd_pd(vb1, _mm256_loadu_pd(m + i), _mm256_mul_pd(vo1, vg));
    __m256d vv = _mm256_fmadd_pd(vb2, _mm256_loadu_pd(v + i), _mm256_mul_pd(vo2, _mm256_mul_pd(vg, vg)));
    _mm256_storeu_pd(m + i, vm);
    _mm256_storeu_pd(v + i, vv);
    const __m256d mhat = _mm256_mul_pd(vm, vibc1);
    const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(_mm256_mul_pd(vv, vibc2)), veps);
    const __m256d step = _mm256_div_pd(_mm256_mul_pd(vlr, mhat), denom);
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
  }
  const double om1 = 1.0 - beta1, om2 = 1.0 - beta2;
  for (; i < n; ++i) {
    m[i] = beta1 * m[i] + om1 * g[i];
    v[i] = beta2 * v[i] + om2 * g[i] * g[i];
    p[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
  }
}

}  // namespace

bool avx2_supported() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const KernelTable* avx2_table() {
  if (!avx2_supported()) return nullptr;
  static const KernelTable table = {
      dot_avx2,        sum_sq_avx2,      axpy_avx2,      relu_avx2,
      relu_mask_avx2,  add_row_bias_avx2, col_sum_acc_avx2,
      matmul_nt_avx2,  matmul_nn_avx2,   matmul_tn_acc_avx2,
      adam_update_avx2};
  return &table;
}

}  // namespace dll::kernels

#else  // non-x86 fallback

namespace dll::kernels {
bool avx2_supported() { return false; }
const KernelTable* avx2_table() { return nullptr; }
}  // namespace dll::kernels

#endif
