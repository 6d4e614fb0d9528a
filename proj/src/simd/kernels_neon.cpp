#include "coordsim/simd/kernels.hpp"

#include <arm_neon.h>

namespace coordsim::simd::neon {

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const float64x2_t prod = vmulq_n_f64(vld1q_f64(x + k), alpha);
    vst1q_f64(y + k, vaddq_f64(vld1q_f64(y + k), prod));
  }
  for (; k < n; ++k) y[k] = y[k] + alpha * x[k];
}

namespace {

inline float64x2_t cmul(float64x2_t x, double ar, double ai) {
  static const double kSign[2] = {-1.0, 1.0};
  const float64x2_t swapped = vextq_f64(x, x, 1);
  const float64x2_t cross = vmulq_f64(vmulq_n_f64(swapped, ai), vld1q_f64(kSign));
  return vaddq_f64(vmulq_n_f64(x, ar), cross);
}

}  // namespace

void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const double* xs = reinterpret_cast<const double*>(x);
  double* ys = reinterpret_cast<double*>(y);
  for (std::size_t k = 0; k < n; ++k) {
    const float64x2_t prod = cmul(vld1q_f64(xs + 2 * k), alpha.real(), alpha.imag());
    vst1q_f64(ys + 2 * k, vaddq_f64(vld1q_f64(ys + 2 * k), prod));
  }
}

void cscale(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const double* xs = reinterpret_cast<const double*>(x);
  double* ys = reinterpret_cast<double*>(y);
  for (std::size_t k = 0; k < n; ++k) {
    vst1q_f64(ys + 2 * k, cmul(vld1q_f64(xs + 2 * k), alpha.real(), alpha.imag()));
  }
}

}  // namespace coordsim::simd::neon
