// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "gsaudio/simd/kernels.hpp"

#include <immintrin.h>

namespace gsaudio::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

// Two rows of C by sixteen columns stay in registers while p sweeps k.
void gemm_avx2(std::size_t m, std::size_t n, std::size_t k, const double* a,
               const double* b, double* c) {
  std::size_t i = 0;
  for (; i + 2 <= m; i += 2) {
    const double* a0 = a + i * k;
    const double* a1 = a0 + k;
    double* c0 = c + i * n;
    double* c1 = c0 + n;
    std::size_t j = 0;
    for (; j + 16 <= n; j += 16) {
      __m256d r00 = _mm256_loadu_pd(c0 + j), r01 = _mm256_loadu_pd(c0 + j + 4);
      __m256d r02 = _mm256_loadu_pd(c0 + j + 8), r03 = _mm256_loadu_pd(c0 + j + 12);
      __m256d r10 = _mm256_loadu_pd(c1 + j), r11 = _mm256_loadu_pd(c1 + j + 4);
      __m256d r12 = _mm256_loadu_pd(c1 + j + 8), r13 = _mm256_loadu_pd(c1 + j + 12);
      for (std::size_t p = 0; p < k; ++p) {
        const double* bp = b + p * n + j;
        const __m256d b0 = _mm256_loadu_pd(bp), b1 = _mm256_loadu_pd(bp + 4);
        const __m256d b2 = _mm256_loadu_pd(bp + 8), b3 = _mm256_loadu_pd(bp + 12);
        const __m256d x0 = _mm256_broadcast_sd(a0 + p);
        const __m256d x1 = _mm256_broadcast_sd(a1 + p);
        r00 = _mm256_fmadd_pd(x0, b0, r00);
        r01 = _mm256_fmadd_pd(x0, b1, r01);
        r02 = _mm256_fmadd_pd(x0, b2, r02);
        r03 = _mm256_fmadd_pd(x0, b3, r03);
        r10 = _mm256_fmadd_pd(x1, b0, r10);
        r11 = _mm256_fmadd_pd(x1, b1, r11);
        r12 = _mm256_fmadd_pd(x1, b2, r12);
        r13 = _mm256_fmadd_pd(x1, b3, r13);
      }
      _mm256_storeu_pd(c0 + j, r00);
      _mm256_storeu_pd(c0 + j + 4, r01);
      _mm256_storeu_pd(c0 + j + 8, r02);
      _mm256_storeu_pd(c0 + j + 12, r03);
      _mm256_storeu_pd(c1 + j, r10);
      _mm256_storeu_pd(c1 + j + 4, r11);
      _mm256_storeu_pd(c1 + j + 8, r12);
      _mm256_storeu_pd(c1 + j + 12, r13);
    }
    for (; j + 4 <= n; j += 4) {
      __m256d r0 = _mm256_loadu_pd(c0 + j);
      __m256d r1 = _mm256_loadu_pd(c1 + j);
      for (std::size_t p = 0; p < k; ++p) {
        const __m256d bv = _mm256_loadu_pd(b + p * n + j);
        r0 = _mm256_fmadd_pd(_mm256_broadcast_sd(a0 + p), bv, r0);
        r1 = _mm256_fmadd_pd(_mm256_broadcast_sd(a1 + p), bv, r1);
      }
      _mm256_storeu_pd(c0 + j, r0);
      _mm256_storeu_pd(c1 + j, r1);
    }
    for (; j < n; ++j) {
      double s0 = c0[j], s1 = c1[j];
      for (std::size_t p = 0; p < k; ++p) {
        s0 += a0[p] * b[p * n + j];
        s1 += a1[p] * b[p * n + j];
      }
      c0[j] = s0;
      c1[j] = s1;
    }
  }
  for (; i < m; ++i) {
    double* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) axpy_avx2(a[i * k + p], b + p * n, crow, n);
  }
}

void squared_distances_avx2(const double* xyz, std::size_t count,
                            const double* center, double* out) {
  const __m256d cx = _mm256_set1_pd(center[0]);
  const __m256d cy = _mm256_set1_pd(center[1]);
  const __m256d cz = _mm256_set1_pd(center[2]);
  const __m256i stride = _mm256_set_epi64x(9, 6, 3, 0);
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const double* base = xyz + 3 * i;
    const __m256d dx = _mm256_sub_pd(_mm256_i64gather_pd(base, stride, 8), cx);
    const __m256d dy = _mm256_sub_pd(_mm256_i64gather_pd(base + 1, stride, 8), cy);
    const __m256d dz = _mm256_sub_pd(_mm256_i64gather_pd(base + 2, stride, 8), cz);
    const __m256d xy = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    _mm256_storeu_pd(out + i, _mm256_add_pd(xy, _mm256_mul_pd(dz, dz)));
  }
  for (; i < count; ++i) {
    const double dx = xyz[3 * i] - center[0];
    const double dy = xyz[3 * i + 1] - center[1];
    const double dz = xyz[3 * i + 2] - center[2];
    out[i] = (dx * dx + dy * dy) + dz * dz;
  }
}

double sum_squares_avx2(const double* x, std::size_t n) { return dot_avx2(x, x, n); }

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{Isa::avx2,         dot_avx2,
                                 axpy_avx2,         gemm_avx2,
                                 squared_distances_avx2, sum_squares_avx2};
  return &table;
}

}  // namespace gsaudio::simd
