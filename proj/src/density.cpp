#include "coordsim/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "coordsim/error.hpp"

namespace coordsim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotUnitTrace: return "NotUnitTrace";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::DimensionCap: return "DimensionCap";
    case ErrorCode::BadCut: return "BadCut";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::TopologyMismatch: return "TopologyMismatch";
    case ErrorCode::ShapeOverflow: return "ShapeOverflow";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InfeasibleExtension: return "InfeasibleExtension";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

std::size_t product_of_dims(const std::vector<Register>& registers) {
  std::size_t total = 1;
  for (const auto& r : registers) total *= r.dim;
  return total;
}

void check_unique_labels(const std::vector<Register>& registers) {
  std::unordered_set<std::string> seen;
  for (const auto& r : registers) {
    if (r.dim == 0) throw Error(ErrorCode::InvalidArgument, "register '" + r.name + "' has dimension 0");
    if (!seen.insert(r.name).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate register label '" + r.name + "'");
    }
  }
}

std::string format_magnitude(double value, double tolerance) {
  std::ostringstream os;
  os.precision(6);
  os << "magnitude " << value << " exceeds tolerance " << tolerance;
  return os.str();
}

/// Index of each label of `wanted` within `registers`; throws BadCut.
std::vector<std::size_t> positions(const std::vector<Register>& registers,
                                   const std::vector<std::string>& wanted) {
  std::vector<std::size_t> out;
  out.reserve(wanted.size());
  for (const auto& label : wanted) {
    auto it = std::find_if(registers.begin(), registers.end(), [&](const Register& r) { return r.name == label; });
    if (it == registers.end()) throw Error(ErrorCode::BadCut, "unknown register label '" + label + "'");
    out.push_back(static_cast<std::size_t>(it - registers.begin()));
  }
  return out;
}

struct CutLayout {
  std::vector<std::size_t> first;   // register positions
  std::vector<std::size_t> second;
};

CutLayout resolve_cut(const std::vector<Register>& registers, const RegisterCut& cut) {
  CutLayout layout{positions(registers, cut.first), positions(registers, cut.second)};
  std::vector<bool> used(registers.size(), false);
  for (auto p : layout.first) {
    if (used[p]) throw Error(ErrorCode::BadCut, "register '" + registers[p].name + "' listed twice");
    used[p] = true;
  }
  for (auto p : layout.second) {
    if (used[p]) throw Error(ErrorCode::BadCut, "register '" + registers[p].name + "' listed twice");
    used[p] = true;
  }
  if (std::find(used.begin(), used.end(), false) != used.end()) {
    throw Error(ErrorCode::BadCut, "cut does not cover every register");
  }
  return layout;
}

/// Offsets into the full index for every multi-index over the listed
/// registers, enumerated with the first listed register most significant.
std::vector<std::size_t> offsets(const std::vector<Register>& registers, const std::vector<std::size_t>& group) {
  std::vector<std::size_t> strides(registers.size(), 1);
  for (std::size_t k = registers.size(); k-- > 1;) strides[k - 1] = strides[k] * registers[k].dim;
  std::vector<std::size_t> out{0};
  for (auto p : group) {
    std::vector<std::size_t> next;
    next.reserve(out.size() * registers[p].dim);
    for (auto base : out) {
      for (std::size_t v = 0; v < registers[p].dim; ++v) next.push_back(base + v * strides[p]);
    }
    out = std::move(next);
  }
  return out;
}

std::vector<Register> select(const std::vector<Register>& registers, const std::vector<std::size_t>& group) {
  std::vector<Register> out;
  for (auto p : group) out.push_back(registers[p]);
  return out;
}

}  // namespace

DensityOperator DensityOperator::unchecked(Matrix matrix, std::vector<Register> registers) {
  return DensityOperator(std::move(matrix), std::move(registers));
}

std::vector<std::string> DensityOperator::labels() const {
  std::vector<std::string> out;
  for (const auto& r : registers_) out.push_back(r.name);
  return out;
}

std::size_t DensityOperator::register_dim(const std::string& label) const {
  return registers_[positions(registers_, {label}).front()].dim;
}

RegisterCut DensityOperator::cut(std::vector<std::string> first) const {
  RegisterCut out{std::move(first), {}};
  for (const auto& r : registers_) {
    if (std::find(out.first.begin(), out.first.end(), r.name) == out.first.end()) out.second.push_back(r.name);
  }
  return out;
}

DensityOperator validate_density(const Matrix& matrix, std::vector<Register> registers, const Tolerances& tol) {
  if (matrix.rows() != matrix.cols()) {
    throw Error(ErrorCode::DimMismatch, "matrix is not square");
  }
  check_unique_labels(registers);
  if (product_of_dims(registers) != static_cast<std::size_t>(matrix.rows())) {
    throw Error(ErrorCode::DimMismatch, "register dimensions do not multiply to the matrix dimension");
  }
  const double defect = hermiticity_defect(matrix);
  if (!(defect <= tol.hermitian)) {
    throw Error(ErrorCode::NotHermitian, format_magnitude(defect, tol.hermitian));
  }
  Matrix m = hermitian_part(matrix);
  const double trace = m.trace().real();
  if (!(std::abs(trace - 1.0) <= tol.trace)) {
    throw Error(ErrorCode::NotUnitTrace, "trace " + std::to_string(trace) + ", " +
                                             format_magnitude(std::abs(trace - 1.0), tol.trace));
  }
  if (is_diagonal(m)) {
    const double min_eig = m.diagonal().real().minCoeff();
    if (!(min_eig >= -tol.psd)) throw Error(ErrorCode::NotPSD, format_magnitude(-min_eig, tol.psd));
    if (min_eig < 0.0) {
      for (Eigen::Index k = 0; k < m.rows(); ++k) m(k, k) = std::max(m(k, k).real(), 0.0);
      m /= m.trace().real();
    }
    return DensityOperator::unchecked(std::move(m), std::move(registers));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  const double min_eig = solver.eigenvalues().minCoeff();
  if (!(min_eig >= -tol.psd)) throw Error(ErrorCode::NotPSD, format_magnitude(-min_eig, tol.psd));
  if (min_eig < 0.0) {
    RealVector clipped = solver.eigenvalues().cwiseMax(0.0);
    clipped /= clipped.sum();
    m = solver.eigenvectors() * clipped.asDiagonal() * solver.eigenvectors().adjoint();
  }
  return DensityOperator::unchecked(std::move(m), std::move(registers));
}

DensityOperator validate_density(const Matrix& matrix, const std::string& label, const Tolerances& tol) {
  return validate_density(matrix, {Register{label, static_cast<std::size_t>(matrix.rows())}}, tol);
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b, std::size_t dim_cap) {
  if (a.dim() > dim_cap / b.dim() || a.dim() * b.dim() > dim_cap) {
    throw Error(ErrorCode::DimensionCap, "tensor product dimension " + std::to_string(a.dim()) + "x" +
                                             std::to_string(b.dim()) + " exceeds cap " + std::to_string(dim_cap));
  }
  std::vector<Register> registers = a.registers();
  registers.insert(registers.end(), b.registers().begin(), b.registers().end());
  check_unique_labels(registers);
  return DensityOperator::unchecked(kron(a.matrix(), b.matrix()), std::move(registers));
}

DensityOperator tensor_power(const DensityOperator& rho, std::size_t n, std::size_t dim_cap) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "tensor power needs n >= 1");
  auto copy = [&](std::size_t k) {
    std::vector<std::string> names;
    for (const auto& r : rho.registers()) names.push_back(r.name + "_" + std::to_string(k));
    return relabel(rho, names);
  };
  DensityOperator out = copy(1);
  for (std::size_t k = 2; k <= n; ++k) out = tensor(out, copy(k), dim_cap);
  return out;
}

DensityOperator partial_trace(const DensityOperator& rho, const RegisterCut& keep) {
  const CutLayout layout = resolve_cut(rho.registers(), keep);
  const auto kept = offsets(rho.registers(), layout.first);
  const auto traced = offsets(rho.registers(), layout.second);
  const Matrix& m = rho.matrix();
  const Eigen::Index d = static_cast<Eigen::Index>(kept.size());
  Matrix out = Matrix::Zero(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) {
      cplx acc(0.0, 0.0);
      for (auto t : traced) acc += m(kept[r] + t, kept[c] + t);
      out(r, c) = acc;
    }
  }
  return DensityOperator::unchecked(std::move(out), select(rho.registers(), layout.first));
}

DensityOperator reorder(const DensityOperator& rho, const std::vector<std::string>& order) {
  return partial_trace(rho, RegisterCut{order, {}});
}

DensityOperator relabel(const DensityOperator& rho, const std::vector<std::string>& names) {
  if (names.size() != rho.registers().size()) {
    throw Error(ErrorCode::InvalidArgument, "relabel needs one name per register");
  }
  std::vector<Register> registers = rho.registers();
  for (std::size_t k = 0; k < names.size(); ++k) registers[k].name = names[k];
  check_unique_labels(registers);
  return DensityOperator::unchecked(rho.matrix(), std::move(registers));
}

double von_neumann_entropy(const DensityOperator& rho) {
  return spectrum_entropy(hermitian_eigenvalues(rho.matrix()));
}

double conditional_entropy(const DensityOperator& rho, const RegisterCut& cut) {
  resolve_cut(rho.registers(), cut);
  const auto rho_b = partial_trace(rho, RegisterCut{cut.second, cut.first});
  return von_neumann_entropy(rho) - von_neumann_entropy(rho_b);
}

double mutual_information(const DensityOperator& rho, const RegisterCut& cut, const Tolerances& tol) {
  resolve_cut(rho.registers(), cut);
  const auto rho_a = partial_trace(rho, RegisterCut{cut.first, cut.second});
  const auto rho_b = partial_trace(rho, RegisterCut{cut.second, cut.first});
  const double value = von_neumann_entropy(rho_a) + von_neumann_entropy(rho_b) - von_neumann_entropy(rho);
  if (value < 0.0 && value >= -tol.numeric) return 0.0;
  return value;
}

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw Error(ErrorCode::DimMismatch, "trace distance between dimensions " + std::to_string(rho.dim()) + " and " +
                                            std::to_string(sigma.dim()));
  }
  return hermitian_trace_norm(rho.matrix() - sigma.matrix());
}

PptResult ppt_check(const DensityOperator& rho, const RegisterCut& cut, const Tolerances& tol) {
  const CutLayout layout = resolve_cut(rho.registers(), cut);
  const auto a = offsets(rho.registers(), layout.first);
  const auto b = offsets(rho.registers(), layout.second);
  const Matrix& m = rho.matrix();
  Matrix pt(m.rows(), m.cols());
  for (std::size_t ja = 0; ja < a.size(); ++ja) {
    for (std::size_t jb = 0; jb < b.size(); ++jb) {
      for (std::size_t ia = 0; ia < a.size(); ++ia) {
        for (std::size_t ib = 0; ib < b.size(); ++ib) {
          pt(a[ia] + b[jb], a[ja] + b[ib]) = m(a[ia] + b[ib], a[ja] + b[jb]);
        }
      }
    }
  }
  const double min_eig = hermitian_eigenvalues(pt).minCoeff();
  return PptResult{min_eig >= -tol.psd, min_eig};
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double afw_continuity_bound(double eps, std::size_t dim_a) {
  if (eps < 0.0) throw Error(ErrorCode::InvalidArgument, "continuity bound needs eps >= 0");
  const double half = eps / 2.0;
  return eps * std::log2(static_cast<double>(dim_a)) + (1.0 + half) * binary_entropy(half / (1.0 + half));
}

}  // namespace coordsim
