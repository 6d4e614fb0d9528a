#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace coordsim {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// (M + M^dagger) / 2
Matrix hermitian_part(const Matrix& m);

/// Largest entrywise |M - M^dagger|.
double hermiticity_defect(const Matrix& m);

/// True when every off-diagonal entry is exactly zero.
bool is_diagonal(const Matrix& m);

/// Eigenvalues (ascending) of the Hermitian part of m. Diagonal inputs skip the
/// eigensolver.
RealVector hermitian_eigenvalues(const Matrix& m);

/// Sum of |eigenvalues| of the Hermitian part of m, i.e. the trace norm of a
/// Hermitian matrix.
double hermitian_trace_norm(const Matrix& m);

/// Shannon entropy in bits of a spectrum; entries below zero count as zero.
double spectrum_entropy(const RealVector& eigenvalues);

/// log2 of a PSD matrix with eigenvalues floored at `floor`.
Matrix hermitian_log2(const Matrix& m, double floor = 1e-14);

/// Kronecker product a (x) b; row index = ia * dim(b) + ib.
Matrix kron(const Matrix& a, const Matrix& b);

/// out += weight * (a (x) b). out must already have the product shape.
void kron_accumulate(cplx weight, const Matrix& a, const Matrix& b, Matrix& out);

/// Diagonal counterpart: out += weight * (a (x) b) for vectors.
void kron_accumulate(double weight, const RealVector& a, const RealVector& b, RealVector& out);

}  // namespace coordsim
