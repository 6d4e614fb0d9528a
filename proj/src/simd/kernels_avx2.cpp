#include "coordsim/simd/kernels.hpp"

#include <immintrin.h>

namespace coordsim::simd::avx2 {

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d prod = _mm256_mul_pd(a, _mm256_loadu_pd(x + k));
    _mm256_storeu_pd(y + k, _mm256_add_pd(_mm256_loadu_pd(y + k), prod));
  }
  for (; k < n; ++k) y[k] = y[k] + alpha * x[k];
}

namespace {

// [xr0 xi0 xr1 xi1] * (ar + i ai), evaluated as ar*x -/+ ai*swap(x) so each
// lane sees exactly the scalar kernel's operations.
inline __m256d cmul(__m256d x, __m256d ar, __m256d ai) {
  const __m256d swapped = _mm256_permute_pd(x, 0b0101);
  return _mm256_addsub_pd(_mm256_mul_pd(ar, x), _mm256_mul_pd(ai, swapped));
}

}  // namespace

void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  const double* xs = reinterpret_cast<const double*>(x);
  double* ys = reinterpret_cast<double*>(y);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d prod = cmul(_mm256_loadu_pd(xs + 2 * k), ar, ai);
    _mm256_storeu_pd(ys + 2 * k, _mm256_add_pd(_mm256_loadu_pd(ys + 2 * k), prod));
  }
  if (k < n) scalar::caxpy(alpha, x + k, y + k, n - k);
}

void cscale(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  const double* xs = reinterpret_cast<const double*>(x);
  double* ys = reinterpret_cast<double*>(y);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    _mm256_storeu_pd(ys + 2 * k, cmul(_mm256_loadu_pd(xs + 2 * k), ar, ai));
  }
  if (k < n) scalar::cscale(alpha, x + k, y + k, n - k);
}

}  // namespace coordsim::simd::avx2
