#include "coordsim/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "coordsim/simd/kernels.hpp"

namespace coordsim {

Matrix hermitian_part(const Matrix& m) { return (m + m.adjoint()) * 0.5; }

double hermiticity_defect(const Matrix& m) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
    }
  }
  return worst;
}

bool is_diagonal(const Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i != j && m(i, j) != cplx(0.0, 0.0)) return false;
    }
  }
  return true;
}

RealVector hermitian_eigenvalues(const Matrix& m) {
  if (is_diagonal(m)) {
    RealVector d = m.diagonal().real();
    std::sort(d.data(), d.data() + d.size());
    return d;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double hermitian_trace_norm(const Matrix& m) { return hermitian_eigenvalues(m).cwiseAbs().sum(); }

double spectrum_entropy(const RealVector& eigenvalues) {
  double h = 0.0;
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
    const double p = eigenvalues[k];
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

Matrix hermitian_log2(const Matrix& m, double floor) {
  if (is_diagonal(m)) {
    Matrix out = Matrix::Zero(m.rows(), m.cols());
    for (Eigen::Index k = 0; k < m.rows(); ++k) out(k, k) = std::log2(std::max(m(k, k).real(), floor));
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m));
  RealVector logs = solver.eigenvalues().unaryExpr([floor](double v) { return std::log2(std::max(v, floor)); });
  return solver.eigenvectors() * logs.asDiagonal() * solver.eigenvectors().adjoint();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() * b.rows(), a.cols() * b.cols());
  kron_accumulate(cplx(1.0, 0.0), a, b, out);
  return out;
}

void kron_accumulate(cplx weight, const Matrix& a, const Matrix& b, Matrix& out) {
  const Eigen::Index rb = b.rows();
  const Eigen::Index cb = b.cols();
  const auto& kernels = simd::active();
  // Column-major: column (ja*cb + jb) of the product holds a(:, ja) (x) b(:, jb),
  // i.e. contiguous runs of b(:, jb) scaled by a(ia, ja).
  for (Eigen::Index ja = 0; ja < a.cols(); ++ja) {
    for (Eigen::Index jb = 0; jb < cb; ++jb) {
      cplx* column = out.data() + (ja * cb + jb) * out.rows();
      const cplx* source = b.data() + jb * rb;
      for (Eigen::Index ia = 0; ia < a.rows(); ++ia) {
        const cplx coeff = weight * a(ia, ja);
        if (coeff == cplx(0.0, 0.0)) continue;
        kernels.caxpy(coeff, source, column + ia * rb, static_cast<std::size_t>(rb));
      }
    }
  }
}

void kron_accumulate(double weight, const RealVector& a, const RealVector& b, RealVector& out) {
  const auto& kernels = simd::active();
  const Eigen::Index nb = b.size();
  for (Eigen::Index ia = 0; ia < a.size(); ++ia) {
    const double coeff = weight * a[ia];
    if (coeff == 0.0) continue;
    kernels.axpy(coeff, b.data(), out.data() + ia * nb, static_cast<std::size_t>(nb));
  }
}

}  // namespace coordsim
