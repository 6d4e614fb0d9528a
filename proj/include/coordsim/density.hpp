#pragma once

// Finite-dimensional density operators with named registers, and the
// information quantities computed from them. All logarithms are base 2 and
// the trace norm is unnormalized (trace distance ranges over [0, 2]).

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "coordsim/linalg.hpp"
#include "coordsim/tolerances.hpp"

namespace coordsim {

struct Register {
  std::string name;
  std::size_t dim = 1;

  bool operator==(const Register&) const = default;
};

/// A bipartition of a state's register labels. Each group keeps the order it
/// is written in; together they must cover every label exactly once.
struct RegisterCut {
  std::vector<std::string> first;
  std::vector<std::string> second;
};

/// Immutable Hermitian, PSD, unit-trace matrix over an ordered list of
/// registers. Register k is more significant than register k + 1 in the
/// matrix index, matching the Kronecker convention.
class DensityOperator {
 public:
  /// Skips validation. Callers guarantee the invariants (used by operations
  /// that preserve them exactly, such as tensor and partial trace).
  static DensityOperator unchecked(Matrix matrix, std::vector<Register> registers);

  const Matrix& matrix() const noexcept { return matrix_; }
  const std::vector<Register>& registers() const noexcept { return registers_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  std::vector<std::string> labels() const;
  std::size_t register_dim(const std::string& label) const;

  /// Cut with `first` as given and every remaining label, in state order, as
  /// the second group.
  RegisterCut cut(std::vector<std::string> first) const;

 private:
  DensityOperator(Matrix matrix, std::vector<Register> registers)
      : matrix_(std::move(matrix)), registers_(std::move(registers)) {}

  Matrix matrix_;
  std::vector<Register> registers_;
};

/// Checks the three state invariants and returns the validated operator.
/// Eigenvalues in [-tol.psd, 0) are clipped to zero and the result is
/// renormalized; larger violations are errors (NotHermitian, NotUnitTrace,
/// NotPSD) naming the tolerance and the offending magnitude.
DensityOperator validate_density(const Matrix& matrix, std::vector<Register> registers,
                                 const Tolerances& tol = {});

/// Single-register convenience overload.
DensityOperator validate_density(const Matrix& matrix, const std::string& label,
                                 const Tolerances& tol = {});

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b,
                       std::size_t dim_cap = Caps{}.max_dim);

/// rho^{(x) n} with registers relabelled "<name>_<k>", k = 1..n.
DensityOperator tensor_power(const DensityOperator& rho, std::size_t n,
                             std::size_t dim_cap = Caps{}.max_dim);

/// Reduced state on keep.first (in that order), tracing out keep.second.
DensityOperator partial_trace(const DensityOperator& rho, const RegisterCut& keep);

/// Same state with registers permuted into `order`.
DensityOperator reorder(const DensityOperator& rho, const std::vector<std::string>& order);

/// Same matrix with new register names (dimensions unchanged).
DensityOperator relabel(const DensityOperator& rho, const std::vector<std::string>& names);

double von_neumann_entropy(const DensityOperator& rho);

/// H(first | second) = H(rho) - H(rho_second). May be negative.
double conditional_entropy(const DensityOperator& rho, const RegisterCut& cut);

/// I(first; second), clamped at zero when within tol.numeric below it.
double mutual_information(const DensityOperator& rho, const RegisterCut& cut,
                          const Tolerances& tol = {});

/// ||rho - sigma||_1 (sum of singular values, range [0, 2]).
double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

struct PptResult {
  bool pass = true;
  double min_eigenvalue = 0.0;
};

/// Partial transpose on the second group; fails iff the smallest eigenvalue is
/// below -tol.psd. A failure certifies entanglement across the cut.
PptResult ppt_check(const DensityOperator& rho, const RegisterCut& cut, const Tolerances& tol = {});

/// Continuity bound on |H(rho) - H(sigma)| for trace distance eps (unnormalized)
/// on a dim_a-dimensional system:
///   eps * log2(dim_a) + (1 + eps/2) * h2((eps/2) / (1 + eps/2)).
/// This is the conditional-entropy form of the Alicki-Fannes-Winter bound
/// written for the normalized distance eps/2; it dominates the tight
/// Fannes-Audenaert bound and is used as a one-sided check.
double afw_continuity_bound(double eps, std::size_t dim_a);

/// Binary entropy in bits.
double binary_entropy(double p);

}  // namespace coordsim
