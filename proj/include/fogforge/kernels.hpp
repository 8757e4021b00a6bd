#pragma once

#include <cstddef>
#include <string>
#include <vector>

// Double-precision kernels behind the Q-network math. Every kernel has a
// scalar reference implementation plus SIMD variants (AVX2 on x86-64, NEON
// on aarch64) selected at runtime. All backends are bit-exact equivalents:
//
//  * elementwise kernels perform the same IEEE op sequence per element,
//  * accumulation kernels (affine, outer_acc) keep the scalar loop order,
//  * reductions (matvec_t) use a fixed 4-lane interleaved accumulator:
//    lane k sums indices congruent to k mod 4, the total is
//    (lane0 + lane1) + (lane2 + lane3), and the tail is added sequentially.
//
// The project is compiled with -ffp-contract=off and the SIMD variants use
// separate mul/add so no backend fuses what another rounds twice.
//
// Matrices are column-major: an R x C matrix stores column j at W + j*R.

namespace fogforge::kernels {

enum class Backend { Scalar, Avx2, Neon };

const char* backend_name(Backend b);
std::vector<Backend> supported_backends();

// Active backend for the process. Default: best supported, unless the
// FOGFORGE_KERNELS env var (scalar|avx2|neon) overrides it.
Backend active_backend();
void set_backend(Backend b);  // throws std::invalid_argument if unsupported

// y = b + W x            (W is rows x cols, x has cols entries)
void affine(double* y, const double* w, const double* b, const double* x,
            std::size_t rows, std::size_t cols);

// gx[j] = dot(column j of W, dy)   i.e. gx = W^T dy
void matvec_t(double* gx, const double* w, const double* dy,
              std::size_t rows, std::size_t cols);

// dW[:,j] += dy * x[j]             (rank-1 accumulate)
void outer_acc(double* dw, const double* dy, const double* x,
               std::size_t rows, std::size_t cols);

void add_acc(double* y, const double* x, std::size_t n);  // y += x
void scale(double* y, double a, std::size_t n);           // y *= a
void relu(double* y, const double* z, std::size_t n);     // y = max(z, 0)
void relu_backward(double* gz, const double* z, const double* gy, std::size_t n);

// In-place Adam update with precomputed bias corrections bc1 = 1/(1-b1^t),
// bc2 = 1/(1-b2^t):
//   m = b1*m + (1-b1)*g
//   v = b2*v + (1-b2)*g*g
//   p = p - lr * (m*bc1) / (sqrt(v*bc2) + eps)
void adam_update(double* p, double* m, double* v, const double* g, std::size_t n,
                 double lr, double beta1, double beta2, double eps,
                 double bc1, double bc2);

// Per-backend entry points, exposed for equivalence tests.
struct KernelTable {
  void (*affine)(double*, const double*, const double*, const double*, std::size_t, std::size_t);
  void (*matvec_t)(double*, const double*, const double*, std::size_t, std::size_t);
  void (*outer_acc)(double*, const double*, const double*, std::size_t, std::size_t);
  void (*add_acc)(double*, const double*, std::size_t);
  void (*scale)(double*, double, std::size_t);
  void (*relu)(double*, const double*, std::size_t);
  void (*relu_backward)(double*, const double*, const double*, std::size_t);
  void (*adam_update)(double*, double*, double*, const double*, std::size_t,
                      double, double, double, double, double, double);
};

const KernelTable& table_for(Backend b);  // throws if unsupported

}  // namespace fogforge::kernels
