#include "gsaudio/simd/kernels.hpp"

#include <arm_neon.h>

namespace gsaudio::simd {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemm_neon(std::size_t m, std::size_t n, std::size_t k, const double* a,
               const double* b, double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    std::size_t j = 0;
    for (; j + 8 <= n; j += 8) {
      float64x2_t r0 = vld1q_f64(crow + j), r1 = vld1q_f64(crow + j + 2);
      float64x2_t r2 = vld1q_f64(crow + j + 4), r3 = vld1q_f64(crow + j + 6);
      for (std::size_t p = 0; p < k; ++p) {
        const double* bp = b + p * n + j;
        const float64x2_t x = vdupq_n_f64(a[i * k + p]);
        r0 = vfmaq_f64(r0, x, vld1q_f64(bp));
        r1 = vfmaq_f64(r1, x, vld1q_f64(bp + 2));
        r2 = vfmaq_f64(r2, x, vld1q_f64(bp + 4));
        r3 = vfmaq_f64(r3, x, vld1q_f64(bp + 6));
      }
      vst1q_f64(crow + j, r0);
      vst1q_f64(crow + j + 2, r1);
      vst1q_f64(crow + j + 4, r2);
      vst1q_f64(crow + j + 6, r3);
    }
    for (; j < n; ++j) {
      double s = crow[j];
      for (std::size_t p = 0; p < k; ++p) s += a[i * k + p] * b[p * n + j];
      crow[j] = s;
    }
  }
}

void squared_distances_neon(const double* xyz, std::size_t count,
                            const double* center, double* out) {
  const float64x2_t cx = vdupq_n_f64(center[0]);
  const float64x2_t cy = vdupq_n_f64(center[1]);
  const float64x2_t cz = vdupq_n_f64(center[2]);
  std::size_t i = 0;
  for (; i + 2 <= count; i += 2) {
    const float64x2x3_t p = vld3q_f64(xyz + 3 * i);
    const float64x2_t dx = vsubq_f64(p.val[0], cx);
    const float64x2_t dy = vsubq_f64(p.val[1], cy);
    const float64x2_t dz = vsubq_f64(p.val[2], cz);
    const float64x2_t xy = vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy));
    vst1q_f64(out + i, vaddq_f64(xy, vmulq_f64(dz, dz)));
  }
  for (; i < count; ++i) {
    const double dx = xyz[3 * i] - center[0];
    const double dy = xyz[3 * i + 1] - center[1];
    const double dz = xyz[3 * i + 2] - center[2];
    out[i] = (dx * dx + dy * dy) + dz * dz;
  }
}

double sum_squares_neon(const double* x, std::size_t n) { return dot_neon(x, x, n); }

}  // namespace

const KernelTable* neon_kernels() {
  static const KernelTable table{Isa::neon,         dot_neon,
                                 axpy_neon,         gemm_neon,
                                 squared_distances_neon, sum_squares_neon};
  return &table;
}

}  // namespace gsaudio::simd
