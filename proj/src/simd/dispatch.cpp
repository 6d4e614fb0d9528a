#include <cstdlib>
#include <stdexcept>
#include <string>

#include "coordsim/simd/kernels.hpp"

namespace coordsim::simd {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  static const KernelTable kScalar{scalar::axpy, scalar::caxpy, scalar::cscale};
#if defined(__x86_64__) || defined(_M_X64)
  static const KernelTable kAvx2{avx2::axpy, avx2::caxpy, avx2::cscale};
#endif
#if defined(__aarch64__)
  static const KernelTable kNeon{neon::axpy, neon::caxpy, neon::cscale};
#endif
  if (!supported(isa)) {
    throw std::runtime_error("kernel variant not supported on this CPU: " + std::string(to_string(isa)));
  }
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2: return kAvx2;
#endif
#if defined(__aarch64__)
    case Isa::Neon: return kNeon;
#endif
    default: return kScalar;
  }
}

namespace {

Isa select_isa() {
  if (const char* forced = std::getenv("COORDSIM_ISA")) {
    if (std::string(forced) == "scalar") return Isa::Scalar;
  }
  if (supported(Isa::Avx2)) return Isa::Avx2;
  if (supported(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

}  // namespace

Isa active_isa() {
  static const Isa isa = select_isa();
  return isa;
}

const KernelTable& active() {
  static const KernelTable& kernels = table(active_isa());
  return kernels;
}

}  // namespace coordsim::simd
