// NEON backend (aarch64, where Advanced SIMD is baseline). float64x2_t is
// 2-wide, so the 4-lane accumulation contract uses register pairs. The
// rectifier uses compare+and rather than fmax so NaN handling matches the
// scalar ternary.

#include "tables.hpp"

#if defined(__aarch64__) || defined(_M_ARM64)

#include <arm_neon.h>

#include <cmath>
#include <cstddef>

namespace fogforge::kernels::neon {

static void affine(double* y, const double* w, const double* b, const double* x,
                   std::size_t rows, std::size_t cols) {
  const std::size_t r2 = rows - rows % 2;
  for (std::size_t i = 0; i < rows; ++i) y[i] = b[i];
  for (std::size_t j = 0; j < cols; ++j) {
    const double xj = x[j];
    const float64x2_t vx = vdupq_n_f64(xj);
    const double* col = w + j * rows;
    std::size_t i = 0;
    for (; i < r2; i += 2) {
      float64x2_t vy = vld1q_f64(y + i);
      vy = vaddq_f64(vy, vmulq_f64(vld1q_f64(col + i), vx));
      vst1q_f64(y + i, vy);
    }
    for (; i < rows; ++i) y[i] += col[i] * xj;
  }
}

// Lane layout: accA = indices {0,1} mod 4, accB = indices {2,3} mod 4.
static double dot_blocked(const double* a, const double* b, std::size_t n) {
  const std::size_t n4 = n - n % 4;
  float64x2_t acc_a = vdupq_n_f64(0.0);
  float64x2_t acc_b = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < n4; i += 4) {
    acc_a = vaddq_f64(acc_a, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    acc_b = vaddq_f64(acc_b, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double sum = (vgetq_lane_f64(acc_a, 0) + vgetq_lane_f64(acc_a, 1)) +
               (vgetq_lane_f64(acc_b, 0) + vgetq_lane_f64(acc_b, 1));
  for (std::size_t i = n4; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

static void matvec_t(double* gx, const double* w, const double* dy,
                     std::size_t rows, std::size_t cols) {
  for (std::size_t j = 0; j < cols; ++j) gx[j] = dot_blocked(w + j * rows, dy, rows);
}

static void outer_acc(double* dw, const double* dy, const double* x,
                      std::size_t rows, std::size_t cols) {
  const std::size_t r2 = rows - rows % 2;
  for (std::size_t j = 0; j < cols; ++j) {
    const double xj = x[j];
    const float64x2_t vx = vdupq_n_f64(xj);
    double* col = dw + j * rows;
    std::size_t i = 0;
    for (; i < r2; i += 2) {
      float64x2_t vc = vld1q_f64(col + i);
      vc = vaddq_f64(vc, vmulq_f64(vld1q_f64(dy + i), vx));
      vst1q_f64(col + i, vc);
    }
    for (; i < rows; ++i) col[i] += dy[i] * xj;
  }
}

static void add_acc(double* y, const double* x, std::size_t n) {
  const std::size_t n2 = n - n % 2;
  std::size_t i = 0;
  for (; i < n2; i += 2) vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += x[i];
}

static void scale(double* y, double a, std::size_t n) {
  const std::size_t n2 = n - n % 2;
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i < n2; i += 2) vst1q_f64(y + i, vmulq_f64(vld1q_f64(y + i), va));
  for (; i < n; ++i) y[i] *= a;
}

static void relu(double* y, const double* z, std::size_t n) {
  const std::size_t n2 = n - n % 2;
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i < n2; i += 2) {
    const float64x2_t vz = vld1q_f64(z + i);
    const uint64x2_t mask = vcgtq_f64(vz, zero);
    vst1q_f64(y + i, vreinterpretq_f64_u64(vandq_u64(mask, vreinterpretq_u64_f64(vz))));
  }
  for (; i < n; ++i) y[i] = z[i] > 0.0 ? z[i] : 0.0;
}

static void relu_backward(double* gz, const double* z, const double* gy, std::size_t n) {
  const std::size_t n2 = n - n % 2;
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i < n2; i += 2) {
    const uint64x2_t mask = vcgtq_f64(vld1q_f64(z + i), zero);
    vst1q_f64(gz + i, vreinterpretq_f64_u64(vandq_u64(mask, vreinterpretq_u64_f64(vld1q_f64(gy + i)))));
  }
  for (; i < n; ++i) gz[i] = z[i] > 0.0 ? gy[i] : 0.0;
}

static void adam_update(double* p, double* m, double* v, const double* g, std::size_t n,
                        double lr, double beta1, double beta2, double eps,
                        double bc1, double bc2) {
  const double c1s = 1.0 - beta1;
  const double c2s = 1.0 - beta2;
  const float64x2_t vb1 = vdupq_n_f64(beta1);
  const float64x2_t vb2 = vdupq_n_f64(beta2);
  const float64x2_t vc1 = vdupq_n_f64(c1s);
  const float64x2_t vc2 = vdupq_n_f64(c2s);
  const float64x2_t vlr = vdupq_n_f64(lr);
  const float64x2_t veps = vdupq_n_f64(eps);
  const float64x2_t vbc1 = vdupq_n_f64(bc1);
  const float64x2_t vbc2 = vdupq_n_f64(bc2);
  const std::size_t n2 = n - n % 2;
  std::size_t i = 0;
  for (; i < n2; i += 2) {
    const float64x2_t vg = vld1q_f64(g + i);
    float64x2_t vm = vld1q_f64(m + i);
    float64x2_t vv = vld1q_f64(v + i);
    vm = vaddq_f64(vmulq_f64(vb1, vm), vmulq_f64(vc1, vg));
    vv = vaddq_f64(vmulq_f64(vb2, vv), vmulq_f64(vc2, vmulq_f64(vg, vg)));
    vst1q_f64(m + i, vm);
    vst1q_f64(v + i, vv);
    const float64x2_t mhat = vmulq_f64(vm, vbc1);
    const float64x2_t vhat = vmulq_f64(vv, vbc2);
    const float64x2_t denom = vaddq_f64(vsqrtq_f64(vhat), veps);
    const float64x2_t step = vmulq_f64(vlr, vdivq_f64(mhat, denom));
    vst1q_f64(p + i, vsubq_f64(vld1q_f64(p + i), step));
  }
  for (; i < n; ++i) {
    const double gi = g[i];
    m[i] = beta1 * m[i] + c1s * gi;
    v[i] = beta2 * v[i] + c2s * (gi * gi);
    const double mhat = m[i] * bc1;
    const double vhat = v[i] * bc2;
    p[i] = p[i] - lr * (mhat / (std::sqrt(vhat) + eps));
  }
}

const KernelTable& table() {
  static const KernelTable t = {affine, matvec_t, outer_acc, add_acc,
                                scale,  relu,     relu_backward, adam_update};
  return t;
}

}  // namespace fogforge::kernels::neon

#endif  // aarch64
