#pragma once

// Fixtures shared by the unit and acceptance tests.

#include <cmath>
#include <initializer_list>
#include <string>
#include <vector>

#include "coordsim/cq_model.hpp"
#include "coordsim/density.hpp"
#include "coordsim/random.hpp"

namespace coordsim::testing {

inline Matrix projector(std::initializer_list<cplx> amplitudes) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(amplitudes.size()));
  Eigen::Index k = 0;
  for (cplx a : amplitudes) v[k++] = a;
  v.normalize();
  return v * v.adjoint();
}

inline Matrix basis(std::size_t dim, std::size_t k) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = 1.0;
  return m;
}

inline DensityOperator state(const Matrix& m, const std::string& label) { return validate_density(m, label); }

inline DensityOperator bell() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(0, 3) = m(3, 0) = m(3, 3) = 0.5;
  return validate_density(m, {{"A", 2}, {"B", 2}});
}

/// Random mixed state: G G^dagger / tr with G Ginibre of the given rank.
inline Matrix random_density_matrix(Stream& rng, std::size_t dim, std::size_t rank = 0) {
  if (rank == 0) rank = dim;
  Matrix g(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(rank));
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = cplx(rng.normal(), rng.normal());
  }
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return hermitian_part(rho);
}

inline DensityOperator random_state(Stream& rng, std::vector<Register> regs, std::size_t rank = 0) {
  std::size_t dim = 1;
  for (const auto& r : regs) dim *= r.dim;
  return validate_density(random_density_matrix(rng, dim, rank), std::move(regs));
}

inline std::vector<double> random_pmf(Stream& rng, std::size_t size) {
  std::vector<double> p(size);
  double total = 0.0;
  for (auto& v : p) {
    v = 0.05 + rng.uniform();
    total += v;
  }
  for (auto& v : p) v /= total;
  return p;
}

/// Uniform bit X with omega^x = |x><x|: perfectly correlated classical bits.
inline CqNetworkState correlated_bit() {
  return make_cq_state(Topology::TwoNode, {0.5, 0.5}, {state(basis(2, 0), "B"), state(basis(2, 1), "B")});
}

/// Uniform X with omega^x = |x><x| (x) |x><x| on B1 B2.
inline CqNetworkState broadcast_copy() {
  std::vector<DensityOperator> cond;
  for (std::size_t x = 0; x < 2; ++x) cond.push_back(validate_density(kron(basis(2, x), basis(2, x)), {{"B1", 2}, {"B2", 2}}));
  return make_cq_state(Topology::Broadcast, {0.5, 0.5}, std::move(cond));
}

/// Three perfectly correlated uniform bits on A, B, C.
inline CqNetworkState ghz_diagonal() {
  Matrix m = 0.5 * (kron(kron(basis(2, 0), basis(2, 0)), basis(2, 0)) + kron(kron(basis(2, 1), basis(2, 1)), basis(2, 1)));
  return make_cq_state(Topology::NoComm, {}, {validate_density(m, {{"A", 2}, {"B", 2}, {"C", 2}})});
}

inline CqNetworkState bell_no_comm() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(0, 3) = m(3, 0) = m(3, 3) = 0.5;
  return make_cq_state(Topology::NoComm, {}, {validate_density(m, {{"A", 2}, {"B", 2}, {"C", 1}})});
}

/// Random classical two-node target: p(x) and diagonal omega^x on a qubit.
inline CqNetworkState random_classical_two_node(Stream& rng) {
  const auto px = random_pmf(rng, 2);
  std::vector<DensityOperator> cond;
  for (std::size_t x = 0; x < 2; ++x) {
    const auto py = random_pmf(rng, 2);
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = py[0];
    m(1, 1) = py[1];
    cond.push_back(state(m, "B"));
  }
  return make_cq_state(Topology::TwoNode, px, std::move(cond));
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace coordsim::testing
