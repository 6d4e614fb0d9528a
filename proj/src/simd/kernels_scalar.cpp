#include "coordsim/simd/kernels.hpp"

namespace coordsim::simd::scalar {

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] = y[k] + alpha * x[k];
}

// Complex products are spelled out in real arithmetic: std::complex
// multiplication routes through __muldc3 and its NaN recovery.
void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const double ar = alpha.real();
  const double ai = alpha.imag();
  const double* xs = reinterpret_cast<const double*>(x);
  double* ys = reinterpret_cast<double*>(y);
  for (std::size_t k = 0; k < n; ++k) {
    const double xr = xs[2 * k];
    const double xi = xs[2 * k + 1];
    const double tr = ar * xr - ai * xi;
    const double ti = ar * xi + ai * xr;
    ys[2 * k] = ys[2 * k] + tr;
    ys[2 * k + 1] = ys[2 * k + 1] + ti;
  }
}

void cscale(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const double ar = alpha.real();
  const double ai = alpha.imag();
  const double* xs = reinterpret_cast<const double*>(x);
  double* ys = reinterpret_cast<double*>(y);
  for (std::size_t k = 0; k < n; ++k) {
    const double xr = xs[2 * k];
    const double xi = xs[2 * k + 1];
    ys[2 * k] = ar * xr - ai * xi;
    ys[2 * k + 1] = ar * xi + ai * xr;
  }
}

}  // namespace coordsim::simd::scalar
