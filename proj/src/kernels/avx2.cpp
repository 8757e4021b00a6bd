// AVX2 backend. Compiled with -mavx2 on x86-64 only; callers must gate on
// runtime support. Arithmetic mirrors the scalar reference exactly: separate
// mul/add (no FMA), vmaxpd/cmp+and for the rectifier, vsqrtpd/vdivpd for
// Adam (correctly rounded, so bit-equal to std::sqrt and /).

#include "tables.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstddef>

namespace fogforge::kernels::avx2 {

static void affine(double* y, const double* w, const double* b, const double* x,
                   std::size_t rows, std::size_t cols) {
  const std::size_t r4 = rows - rows % 4;
  for (std::size_t i = 0; i < rows; ++i) y[i] = b[i];
  for (std::size_t j = 0; j < cols; ++j) {
    const double xj = x[j];
    const __m256d vx = _mm256_set1_pd(xj);
    const double* col = w + j * rows;
    std::size_t i = 0;
    for (; i < r4; i += 4) {
      __m256d vy = _mm256_loadu_pd(y + i);
      vy = _mm256_add_pd(vy, _mm256_mul_pd(_mm256_loadu_pd(col + i), vx));
      _mm256_storeu_pd(y + i, vy);
    }
    for (; i < rows; ++i) y[i] += col[i] * xj;
  }
}

// Same lane assignment as the scalar reference: lane k holds indices k mod 4.
static double dot_blocked(const double* a, const double* b, std::size_t n) {
  const std::size_t n4 = n - n % 4;
  __m256d vacc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < n4; i += 4) {
    vacc = _mm256_add_pd(vacc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double acc[4];
  _mm256_storeu_pd(acc, vacc);
  double sum = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (std::size_t i = n4; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

static void matvec_t(double* gx, const double* w, const double* dy,
                     std::size_t rows, std::size_t cols) {
  for (std::size_t j = 0; j < cols; ++j) gx[j] = dot_blocked(w + j * rows, dy, rows);
}

static void outer_acc(double* dw, const double* dy, const double* x,
                      std::size_t rows, std::size_t cols) {
  const std::size_t r4 = rows - rows % 4;
  for (std::size_t j = 0; j < cols; ++j) {
    const double xj = x[j];
    const __m256d vx = _mm256_set1_pd(xj);
    double* col = dw + j * rows;
    std::size_t i = 0;
    for (; i < r4; i += 4) {
      __m256d vc = _mm256_loadu_pd(col + i);
      vc = _mm256_add_pd(vc, _mm256_mul_pd(_mm256_loadu_pd(dy + i), vx));
      _mm256_storeu_pd(col + i, vc);
    }
    for (; i < rows; ++i) col[i] += dy[i] * xj;
  }
}

static void add_acc(double* y, const double* x, std::size_t n) {
  const std::size_t n4 = n - n % 4;
  std::size_t i = 0;
  for (; i < n4; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) y[i] += x[i];
}

static void scale(double* y, double a, std::size_t n) {
  const std::size_t n4 = n - n % 4;
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i < n4; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(y + i), va));
  }
  for (; i < n; ++i) y[i] *= a;
}

static void relu(double* y, const double* z, std::size_t n) {
  const std::size_t n4 = n - n % 4;
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i < n4; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_max_pd(_mm256_loadu_pd(z + i), zero));
  }
  for (; i < n; ++i) y[i] = z[i] > 0.0 ? z[i] : 0.0;
}

static void relu_backward(double* gz, const double* z, const double* gy, std::size_t n) {
  const std::size_t n4 = n - n % 4;
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i < n4; i += 4) {
    const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(z + i), zero, _CMP_GT_OQ);
    _mm256_storeu_pd(gz + i, _mm256_and_pd(mask, _mm256_loadu_pd(gy + i)));
  }
  for (; i < n; ++i) gz[i] = z[i] > 0.0 ? gy[i] : 0.0;
}

static void adam_update(double* p, double* m, double* v, const double* g, std::size_t n,
                        double lr, double beta1, double beta2, double eps,
                        double bc1, double bc2) {
  const double c1s = 1.0 - beta1;
  const double c2s = 1.0 - beta2;
  const __m256d vb1 = _mm256_set1_pd(beta1);
  const __m256d vb2 = _mm256_set1_pd(beta2);
  const __m256d vc1 = _mm256_set1_pd(c1s);
  const __m256d vc2 = _mm256_set1_pd(c2s);
  const __m256d vlr = _mm256_set1_pd(lr);
  const __m256d veps = _mm256_set1_pd(eps);
  const __m256d vbc1 = _mm256_set1_pd(bc1);
  const __m256d vbc2 = _mm256_set1_pd(bc2);
  const std::size_t n4 = n - n % 4;
  std::size_t i = 0;
  for (; i < n4; i += 4) {
    const __m256d vg = _mm256_loadu_pd(g + i);
    __m256d vm = _mm256_loadu_pd(m + i);
    __m256d vv = _mm256_loadu_pd(v + i);
    vm = _mm256_add_pd(_mm256_mul_pd(vb1, vm), _mm256_mul_pd(vc1, vg));
    vv = _mm256_add_pd(_mm256_mul_pd(vb2, vv), _mm256_mul_pd(vc2, _mm256_mul_pd(vg, vg)));
    _mm256_storeu_pd(m + i, vm);
    _mm256_storeu_pd(v + i, vv);
    const __m256d mhat = _mm256_mul_pd(vm, vbc1);
    const __m256d vhat = _mm256_mul_pd(vv, vbc2);
    const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), veps);
    const __m256d step = _mm256_mul_pd(vlr, _mm256_div_pd(mhat, denom));
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
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

}  // namespace fogforge::kernels::avx2

#endif  // x86-64
