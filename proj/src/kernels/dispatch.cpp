#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "fogforge/log.hpp"
#include "tables.hpp"

namespace fogforge::kernels {

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "?";
}

static bool backend_supported(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#ifdef FOGFORGE_HAVE_AVX2_BACKEND
      return __builtin_cpu_supports("avx2") != 0;
#else
      return false;
#endif
    case Backend::Neon:
#ifdef FOGFORGE_HAVE_NEON_BACKEND
      return true;  // baseline on aarch64
#else
      return false;
#endif
  }
  return false;
}

std::vector<Backend> supported_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
    if (backend_supported(b)) out.push_back(b);
  }
  return out;
}

const KernelTable& table_for(Backend b) {
  if (!backend_supported(b)) {
    throw std::invalid_argument(std::string("kernel backend not supported here: ") + backend_name(b));
  }
  switch (b) {
#ifdef FOGFORGE_HAVE_AVX2_BACKEND
    case Backend::Avx2: return avx2::table();
#endif
#ifdef FOGFORGE_HAVE_NEON_BACKEND
    case Backend::Neon: return neon::table();
#endif
    default: return scalar::table();
  }
}

static Backend pick_default() {
  if (const char* env = std::getenv("FOGFORGE_KERNELS")) {
    for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
      if (std::strcmp(env, backend_name(b)) == 0) {
        if (backend_supported(b)) return b;
        logf(LogLevel::Warn, "FOGFORGE_KERNELS=%s not supported on this CPU, falling back", env);
      }
    }
  }
  if (backend_supported(Backend::Avx2)) return Backend::Avx2;
  if (backend_supported(Backend::Neon)) return Backend::Neon;
  return Backend::Scalar;
}

static std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot{pick_default()};
  return slot;
}

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  table_for(b);  // validates support
  backend_slot().store(b, std::memory_order_relaxed);
  logf(LogLevel::Info, "kernel backend set to %s", backend_name(b));
}

// Forwarders; a table lookup per call is noise next to the loops behind it.

void affine(double* y, const double* w, const double* b, const double* x,
            std::size_t rows, std::size_t cols) {
  table_for(active_backend()).affine(y, w, b, x, rows, cols);
}

void matvec_t(double* gx, const double* w, const double* dy, std::size_t rows, std::size_t cols) {
  table_for(active_backend()).matvec_t(gx, w, dy, rows, cols);
}

void outer_acc(double* dw, const double* dy, const double* x, std::size_t rows, std::size_t cols) {
  table_for(active_backend()).outer_acc(dw, dy, x, rows, cols);
}

void add_acc(double* y, const double* x, std::size_t n) {
  table_for(active_backend()).add_acc(y, x, n);
}

void scale(double* y, double a, std::size_t n) { table_for(active_backend()).scale(y, a, n); }

void relu(double* y, const double* z, std::size_t n) { table_for(active_backend()).relu(y, z, n); }

void relu_backward(double* gz, const double* z, const double* gy, std::size_t n) {
  table_for(active_backend()).relu_backward(gz, z, gy, n);
}

void adam_update(double* p, double* m, double* v, const double* g, std::size_t n,
                 double lr, double beta1, double beta2, double eps, double bc1, double bc2) {
  table_for(active_backend()).adam_update(p, m, v, g, n, lr, beta1, beta2, eps, bc1, bc2);
}

}  // namespace fogforge::kernels
