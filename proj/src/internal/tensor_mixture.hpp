#pragma once

// Weighted mixtures of n-fold tensor products:
//
//   M = sum_m w_m  rho^{c_m[0]} (x) rho^{c_m[1]} (x) ... (x) rho^{c_m[n-1]}
//
// Words sharing a prefix share the Kronecker work: M(S) = sum_a rho^a (x) M(S_a)
// where S_a are the suffixes of the words in S that start with a.

#include <cstdint>
#include <span>
#include <vector>

#include "coordsim/linalg.hpp"

namespace coordsim::detail {

struct WordSet {
  std::size_t n = 0;
  std::vector<std::uint32_t> symbols;  // word m occupies [m*n, (m+1)*n)
  std::vector<double> weights;

  void add(std::span<const std::uint32_t> word, double weight) {
    if (weight == 0.0) return;
    symbols.insert(symbols.end(), word.begin(), word.end());
    weights.push_back(weight);
  }
  std::size_t size() const { return weights.size(); }
};

/// Dense mixture; locals are square matrices of a common dimension d. The
/// result is d^n x d^n.
Matrix product_mixture(const WordSet& words, const std::vector<Matrix>& locals);

/// Diagonal mixture; locals are the diagonals.
RealVector product_mixture(const WordSet& words, const std::vector<RealVector>& locals);

/// a^{(x) n}
Matrix tensor_power(const Matrix& a, std::size_t n);
RealVector tensor_power(const RealVector& a, std::size_t n);

}  // namespace coordsim::detail
