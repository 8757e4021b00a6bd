// Reference kernels. The SIMD backends must match these bit for bit, so the
// loop structure below (including the 4-lane blocked dot) is the contract,
// not an optimization.

#include <cmath>
#include <cstddef>

#include "fogforge/kernels.hpp"

namespace fogforge::kernels::scalar {

void affine(double* y, const double* w, const double* b, const double* x,
            std::size_t rows, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) y[i] = b[i];
  for (std::size_t j = 0; j < cols; ++j) {
    const double xj = x[j];
    const double* col = w + j * rows;
    for (std::size_t i = 0; i < rows; ++i) y[i] += col[i] * xj;
  }
}

// Blocked dot: lane k accumulates indices k, k+4, k+8, ...; the lanes are
// combined as (l0+l1)+(l2+l3) and the tail is added sequentially.
static double dot_blocked(const double* a, const double* b, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t n4 = n - n % 4;
  for (std::size_t i = 0; i < n4; i += 4) {
    acc[0] += a[i + 0] * b[i + 0];
    acc[1] += a[i + 1] * b[i + 1];
    acc[2] += a[i + 2] * b[i + 2];
    acc[3] += a[i + 3] * b[i + 3];
  }
  double sum = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (std::size_t i = n4; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void matvec_t(double* gx, const double* w, const double* dy,
              std::size_t rows, std::size_t cols) {
  for (std::size_t j = 0; j < cols; ++j) gx[j] = dot_blocked(w + j * rows, dy, rows);
}

void outer_acc(double* dw, const double* dy, const double* x,
               std::size_t rows, std::size_t cols) {
  for (std::size_t j = 0; j < cols; ++j) {
    const double xj = x[j];
    double* col = dw + j * rows;
    for (std::size_t i = 0; i < rows; ++i) col[i] += dy[i] * xj;
  }
}

void add_acc(double* y, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += x[i];
}

void scale(double* y, double a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] *= a;
}

void relu(double* y, const double* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void relu_backward(double* gz, const double* z, const double* gy, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) gz[i] = z[i] > 0.0 ? gy[i] : 0.0;
}

void adam_update(double* p, double* m, double* v, const double* g, std::size_t n,
                 double lr, double beta1, double beta2, double eps,
                 double bc1, double bc2) {
  const double c1 = 1.0 - beta1;
  const double c2 = 1.0 - beta2;
  for (std::size_t i = 0; i < n; ++i) {
    const double gi = g[i];
    m[i] = beta1 * m[i] + c1 * gi;
    v[i] = beta2 * v[i] + c2 * (gi * gi);
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

}  // namespace fogforge::kernels::scalar
