#pragma once

#include "fogforge/kernels.hpp"

namespace fogforge::kernels {

namespace scalar {
const KernelTable& table();
}

#if defined(__x86_64__) || defined(_M_X64)
#define FOGFORGE_HAVE_AVX2_BACKEND 1
namespace avx2 {
const KernelTable& table();
}
#endif

#if defined(__aarch64__) || defined(_M_ARM64)
#define FOGFORGE_HAVE_NEON_BACKEND 1
namespace neon {
const KernelTable& table();
}
#endif

}  // namespace fogforge::kernels
