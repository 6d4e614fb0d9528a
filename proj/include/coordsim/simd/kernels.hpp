#pragma once

// Elementwise kernels used by the tensor-product accumulators. Every variant
// performs the same IEEE operations in the same order per element (no FMA), so
// results are bit-identical across the scalar, AVX2 and NEON paths.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace coordsim::simd {

using cplx = std::complex<double>;

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);

struct KernelTable {
  /// y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// y += alpha * x over complex arrays
  void (*caxpy)(cplx alpha, const cplx* x, cplx* y, std::size_t n);
  /// y = alpha * x over complex arrays
  void (*cscale)(cplx alpha, const cplx* x, cplx* y, std::size_t n);
};

namespace scalar {
void axpy(double alpha, const double* x, double* y, std::size_t n);
void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n);
void cscale(cplx alpha, const cplx* x, cplx* y, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void axpy(double alpha, const double* x, double* y, std::size_t n);
void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n);
void cscale(cplx alpha, const cplx* x, cplx* y, std::size_t n);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
void axpy(double alpha, const double* x, double* y, std::size_t n);
void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n);
void cscale(cplx alpha, const cplx* x, cplx* y, std::size_t n);
}  // namespace neon
#endif

/// True when the running CPU can execute the given variant.
bool supported(Isa isa);

/// Table for a specific variant; throws if unsupported on this CPU.
const KernelTable& table(Isa isa);

/// Best supported variant, chosen once at first use. COORDSIM_ISA=scalar
/// forces the reference path.
const KernelTable& active();
Isa active_isa();

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline void caxpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  active().caxpy(alpha, x.data(), y.data(), x.size());
}
inline void cscale(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  active().cscale(alpha, x.data(), y.data(), x.size());
}

}  // namespace coordsim::simd
