#include "coordsim/cq_model.hpp"

#include <cmath>
#include <numeric>

#include "coordsim/error.hpp"

namespace coordsim {

std::string_view to_string(Topology topology) {
  switch (topology) {
    case Topology::TwoNode: return "two-node";
    case Topology::NoComm: return "no-comm";
    case Topology::Broadcast: return "broadcast";
  }
  return "unknown";
}

Topology topology_from_string(std::string_view name) {
  if (name == "two-node") return Topology::TwoNode;
  if (name == "no-comm") return Topology::NoComm;
  if (name == "broadcast") return Topology::Broadcast;
  throw Error(ErrorCode::InvalidArgument, "unknown topology '" + std::string(name) + "'");
}

std::size_t factor_count(Topology topology) {
  switch (topology) {
    case Topology::TwoNode: return 1;
    case Topology::NoComm: return 3;
    case Topology::Broadcast: return 2;
  }
  return 0;
}

namespace {

void check_pmf(const std::vector<double>& pmf, const Tolerances& tol, const std::string& what) {
  if (pmf.empty()) throw Error(ErrorCode::InvalidArgument, what + " is empty");
  double total = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw Error(ErrorCode::InvalidArgument, what + " has a negative entry");
    total += p;
  }
  if (!(std::abs(total - 1.0) <= tol.trace)) {
    throw Error(ErrorCode::NotUnitTrace, what + " sums to " + std::to_string(total));
  }
}

double plogp_sum(const std::vector<double>& values) {
  double h = 0.0;
  for (double p : values) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

Register classical_register(const char* label, std::size_t size) { return Register{label, size}; }

/// Reduced state of omega on register `index` alone.
DensityOperator single_marginal(const DensityOperator& omega, std::size_t index) {
  return partial_trace(omega, omega.cut({omega.registers()[index].name}));
}

Matrix average_state(const CqNetworkState& target) {
  const auto weights = target.classical_weights();
  Matrix avg = Matrix::Zero(static_cast<Eigen::Index>(target.quantum_dim()), static_cast<Eigen::Index>(target.quantum_dim()));
  for (std::size_t x = 0; x < weights.size(); ++x) avg += weights[x] * target.conditionals[x].matrix();
  return avg;
}

}  // namespace

std::vector<double> CqNetworkState::classical_weights() const {
  if (topology == Topology::NoComm) return {1.0};
  return pmf;
}

CqNetworkState make_cq_state(Topology topology, std::vector<double> pmf, std::vector<DensityOperator> conditionals,
                             const Tolerances& tol) {
  if (conditionals.empty()) throw Error(ErrorCode::InvalidArgument, "state has no conditionals");
  if (topology == Topology::NoComm) {
    if (!pmf.empty() || conditionals.size() != 1) {
      throw Error(ErrorCode::InvalidArgument, "no-comm state carries no classical part and exactly one operator");
    }
  } else {
    check_pmf(pmf, tol, "p_X");
    if (conditionals.size() != pmf.size()) {
      throw Error(ErrorCode::DimMismatch, "need one conditional per classical symbol");
    }
  }
  const auto& registers = conditionals.front().registers();
  if (registers.size() != factor_count(topology)) {
    throw Error(ErrorCode::DimMismatch, std::string(to_string(topology)) + " state needs " +
                                            std::to_string(factor_count(topology)) + " quantum registers");
  }
  for (const auto& c : conditionals) {
    if (c.registers() != registers) throw Error(ErrorCode::DimMismatch, "conditionals disagree on registers");
  }
  for (const auto& r : registers) {
    if (r.name == kClassicalLabel || r.name == kAuxiliaryLabel) {
      throw Error(ErrorCode::InvalidArgument, "quantum register may not be named X or U");
    }
  }
  return CqNetworkState{topology, std::move(pmf), std::move(conditionals)};
}

std::vector<Register> Extension::quantum_registers() const {
  std::vector<Register> out;
  for (const auto& f : factors.front()) out.push_back(f.registers().front());
  return out;
}

std::vector<double> Extension::u_marginal() const {
  std::vector<double> out(u_size(), 0.0);
  for (const auto& row : joint) {
    for (std::size_t u = 0; u < row.size(); ++u) out[u] += row[u];
  }
  return out;
}

std::vector<double> Extension::x_marginal() const {
  std::vector<double> out;
  for (const auto& row : joint) out.push_back(std::accumulate(row.begin(), row.end(), 0.0));
  return out;
}

Matrix Extension::product_state(std::size_t u) const {
  Matrix out = factors[u].front().matrix();
  for (std::size_t f = 1; f < factors[u].size(); ++f) out = kron(out, factors[u][f].matrix());
  return out;
}

Extension make_extension(Topology topology, std::vector<std::vector<double>> joint,
                         std::vector<std::vector<DensityOperator>> factors, const Tolerances& tol) {
  if (joint.empty() || factors.empty()) throw Error(ErrorCode::InvalidArgument, "extension is empty");
  if (topology == Topology::NoComm && joint.size() != 1) {
    throw Error(ErrorCode::InvalidArgument, "no-comm extension holds a single row p_U");
  }
  std::vector<double> flat;
  for (const auto& row : joint) {
    if (row.size() != factors.size()) throw Error(ErrorCode::DimMismatch, "joint PMF row length differs from |U|");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  check_pmf(flat, tol, "p_XU");
  const std::size_t nf = factor_count(topology);
  std::vector<Register> registers;
  for (std::size_t u = 0; u < factors.size(); ++u) {
    if (factors[u].size() != nf) {
      throw Error(ErrorCode::DimMismatch, "extension needs " + std::to_string(nf) + " factors per u");
    }
    for (std::size_t f = 0; f < nf; ++f) {
      if (factors[u][f].registers().size() != 1) {
        throw Error(ErrorCode::DimMismatch, "each factor lives on exactly one register");
      }
      if (u == 0) {
        registers.push_back(factors[u][f].registers().front());
      } else if (factors[u][f].registers().front() != registers[f]) {
        throw Error(ErrorCode::DimMismatch, "factor registers differ between values of u");
      }
    }
  }
  return Extension{topology, std::move(joint), std::move(factors)};
}

std::size_t cardinality_bound(Topology topology, std::size_t x_size, const std::vector<Register>& registers) {
  std::size_t d = 1;
  for (const auto& r : registers) d *= r.dim;
  const std::size_t nx = topology == Topology::NoComm ? 1 : x_size;
  return nx * nx * d * d + 1;
}

bool exceeds_cardinality_bound(const Extension& ext) {
  return ext.u_size() > cardinality_bound(ext.topology, ext.x_size(), ext.quantum_registers());
}

DensityOperator assemble(const CqNetworkState& state, std::size_t dim_cap) {
  if (state.topology == Topology::NoComm) return state.conditionals.front();
  const std::size_t nx = state.x_size();
  const std::size_t dq = state.quantum_dim();
  if (nx * dq > dim_cap) throw Error(ErrorCode::DimensionCap, "assembled state exceeds dimension cap");
  const auto d = static_cast<Eigen::Index>(dq);
  Matrix m = Matrix::Zero(d * static_cast<Eigen::Index>(nx), d * static_cast<Eigen::Index>(nx));
  for (std::size_t x = 0; x < nx; ++x) {
    m.block(static_cast<Eigen::Index>(x) * d, static_cast<Eigen::Index>(x) * d, d, d) =
        state.pmf[x] * state.conditionals[x].matrix();
  }
  std::vector<Register> registers{classical_register(kClassicalLabel, nx)};
  const auto& q = state.quantum_registers();
  registers.insert(registers.end(), q.begin(), q.end());
  return DensityOperator::unchecked(std::move(m), std::move(registers));
}

DensityOperator assemble(const Extension& ext, std::size_t dim_cap) {
  const bool has_x = ext.topology != Topology::NoComm;
  const std::size_t nx = ext.x_size();
  const std::size_t nu = ext.u_size();
  std::vector<Matrix> products;
  for (std::size_t u = 0; u < nu; ++u) products.push_back(ext.product_state(u));
  const auto d = products.front().rows();
  if (static_cast<std::size_t>(d) * nx * nu > dim_cap) {
    throw Error(ErrorCode::DimensionCap, "assembled extension exceeds dimension cap");
  }
  const Eigen::Index total = d * static_cast<Eigen::Index>(nx * nu);
  Matrix m = Matrix::Zero(total, total);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t u = 0; u < nu; ++u) {
      const Eigen::Index offset = static_cast<Eigen::Index>(x * nu + u) * d;
      m.block(offset, offset, d, d) = ext.joint[x][u] * products[u];
    }
  }
  std::vector<Register> registers;
  if (has_x) registers.push_back(classical_register(kClassicalLabel, nx));
  registers.push_back(classical_register(kAuxiliaryLabel, nu));
  const auto q = ext.quantum_registers();
  registers.insert(registers.end(), q.begin(), q.end());
  return DensityOperator::unchecked(std::move(m), std::move(registers));
}

CqNetworkState marginalize_extension(const Extension& ext) {
  const auto pu = ext.u_marginal();
  const auto px = ext.x_marginal();
  std::vector<Matrix> products;
  for (std::size_t u = 0; u < ext.u_size(); ++u) products.push_back(ext.product_state(u));
  const auto registers = ext.quantum_registers();
  std::vector<DensityOperator> conditionals;
  for (std::size_t x = 0; x < ext.x_size(); ++x) {
    Matrix m = Matrix::Zero(products.front().rows(), products.front().cols());
    if (px[x] > 0.0) {
      for (std::size_t u = 0; u < ext.u_size(); ++u) m += (ext.joint[x][u] / px[x]) * products[u];
    } else {
      // Unreachable symbol: any valid conditional preserves the assembled state.
      for (std::size_t u = 0; u < ext.u_size(); ++u) m += pu[u] * products[u];
    }
    conditionals.push_back(DensityOperator::unchecked(hermitian_part(m), registers));
  }
  CqNetworkState out;
  out.topology = ext.topology;
  if (ext.topology != Topology::NoComm) out.pmf = px;
  out.conditionals = std::move(conditionals);
  return out;
}

double feasibility_residual(const Extension& ext, const CqNetworkState& target) {
  if (ext.topology != target.topology) {
    throw Error(ErrorCode::TopologyMismatch, std::string("extension is ") + std::string(to_string(ext.topology)) +
                                                 ", target is " + std::string(to_string(target.topology)));
  }
  if (ext.x_size() != target.classical_weights().size() || ext.quantum_registers() != target.quantum_registers()) {
    throw Error(ErrorCode::DimMismatch, "extension and target shapes differ");
  }
  const auto weights = target.classical_weights();
  std::vector<Matrix> products;
  for (std::size_t u = 0; u < ext.u_size(); ++u) products.push_back(ext.product_state(u));
  double residual = 0.0;
  for (std::size_t x = 0; x < weights.size(); ++x) {
    Matrix diff = -weights[x] * target.conditionals[x].matrix();
    for (std::size_t u = 0; u < ext.u_size(); ++u) diff += ext.joint[x][u] * products[u];
    residual += hermitian_trace_norm(diff);
  }
  return residual;
}

namespace {

void require_topology(const Extension& ext, Topology expected) {
  if (ext.topology != expected) {
    throw Error(ErrorCode::TopologyMismatch, "expected a " + std::string(to_string(expected)) + " extension");
  }
}

InfoPair dense_info_with_x(const Extension& ext, const Tolerances& tol) {
  const auto sigma = assemble(ext);
  const auto sigma_xu = partial_trace(sigma, sigma.cut({kClassicalLabel, kAuxiliaryLabel}));
  InfoPair out;
  out.x_u = mutual_information(sigma_xu, RegisterCut{{kClassicalLabel}, {kAuxiliaryLabel}}, tol);
  std::vector<std::string> xq{kClassicalLabel};
  for (const auto& r : ext.quantum_registers()) xq.push_back(r.name);
  out.all_u = mutual_information(sigma, RegisterCut{xq, {kAuxiliaryLabel}}, tol);
  return out;
}

}  // namespace

InfoPair info_two_node(const Extension& ext, const Tolerances& tol) {
  require_topology(ext, Topology::TwoNode);
  return dense_info_with_x(ext, tol);
}

double info_nc(const Extension& ext, const Tolerances& tol) {
  require_topology(ext, Topology::NoComm);
  const auto sigma = assemble(ext);
  return mutual_information(sigma, sigma.cut({kAuxiliaryLabel}), tol);
}

InfoPair info_broadcast(const Extension& ext, const Tolerances& tol) {
  require_topology(ext, Topology::Broadcast);
  return dense_info_with_x(ext, tol);
}

double shannon_entropy(const std::vector<double>& pmf) { return plogp_sum(pmf); }

double classical_mutual_information(const std::vector<std::vector<double>>& joint) {
  std::vector<double> rows;
  std::vector<double> cols(joint.empty() ? 0 : joint.front().size(), 0.0);
  std::vector<double> flat;
  for (const auto& row : joint) {
    rows.push_back(std::accumulate(row.begin(), row.end(), 0.0));
    for (std::size_t c = 0; c < row.size(); ++c) cols[c] += row[c];
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return plogp_sum(rows) + plogp_sum(cols) - plogp_sum(flat);
}

InfoPair info_structured(const Extension& ext) {
  InfoPair out;
  out.x_u = ext.topology == Topology::NoComm ? 0.0 : classical_mutual_information(ext.joint);
  const auto pu = ext.u_marginal();
  const auto px = ext.x_marginal();
  std::vector<Matrix> products;
  for (std::size_t u = 0; u < ext.u_size(); ++u) products.push_back(ext.product_state(u));
  double conditional_output = 0.0;
  for (std::size_t x = 0; x < ext.x_size(); ++x) {
    if (px[x] <= 0.0) continue;
    Matrix m = Matrix::Zero(products.front().rows(), products.front().cols());
    for (std::size_t u = 0; u < ext.u_size(); ++u) m += (ext.joint[x][u] / px[x]) * products[u];
    conditional_output += px[x] * spectrum_entropy(hermitian_eigenvalues(m));
  }
  double factor_entropy = 0.0;
  for (std::size_t u = 0; u < ext.u_size(); ++u) {
    if (pu[u] <= 0.0) continue;
    for (const auto& f : ext.factors[u]) factor_entropy += pu[u] * von_neumann_entropy(f);
  }
  out.all_u = out.x_u + conditional_output - factor_entropy;
  return out;
}

Extension product_extension(const CqNetworkState& target) {
  const auto registers = target.quantum_registers();
  const Matrix avg = average_state(target);
  const auto avg_state = DensityOperator::unchecked(hermitian_part(avg), registers);
  std::vector<DensityOperator> factors;
  for (std::size_t f = 0; f < registers.size(); ++f) factors.push_back(single_marginal(avg_state, f));
  std::vector<std::vector<double>> joint;
  for (double w : target.classical_weights()) joint.push_back({w});
  return Extension{target.topology, std::move(joint), {std::move(factors)}};
}

Extension identity_extension(const CqNetworkState& target) {
  if (target.topology == Topology::NoComm) {
    throw Error(ErrorCode::TopologyMismatch, "U = X needs a classical register");
  }
  const std::size_t nx = target.x_size();
  Extension ext;
  ext.topology = target.topology;
  ext.joint.assign(nx, std::vector<double>(nx, 0.0));
  for (std::size_t x = 0; x < nx; ++x) {
    ext.joint[x][x] = target.pmf[x];
    std::vector<DensityOperator> factors;
    for (std::size_t f = 0; f < target.quantum_registers().size(); ++f) {
      factors.push_back(single_marginal(target.conditionals[x], f));
    }
    ext.factors.push_back(std::move(factors));
  }
  return ext;
}

bool is_classical(const CqNetworkState& target) {
  for (const auto& c : target.conditionals) {
    if (!is_diagonal(c.matrix())) return false;
  }
  return true;
}

Extension basis_extension(const CqNetworkState& target) {
  if (!is_classical(target)) throw Error(ErrorCode::InvalidArgument, "basis extension needs a classical target");
  const auto registers = target.quantum_registers();
  const auto weights = target.classical_weights();
  const std::size_t dq = target.quantum_dim();
  Extension ext;
  ext.topology = target.topology;
  ext.joint.assign(weights.size(), std::vector<double>(dq, 0.0));
  for (std::size_t x = 0; x < weights.size(); ++x) {
    for (std::size_t y = 0; y < dq; ++y) {
      ext.joint[x][y] = weights[x] * target.conditionals[x].matrix()(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(y)).real();
    }
  }
  for (std::size_t y = 0; y < dq; ++y) {
    std::vector<DensityOperator> factors;
    std::size_t rest = y;
    std::vector<std::size_t> digits(registers.size());
    for (std::size_t f = registers.size(); f-- > 0;) {
      digits[f] = rest % registers[f].dim;
      rest /= registers[f].dim;
    }
    for (std::size_t f = 0; f < registers.size(); ++f) {
      const auto d = static_cast<Eigen::Index>(registers[f].dim);
      Matrix m = Matrix::Zero(d, d);
      m(static_cast<Eigen::Index>(digits[f]), static_cast<Eigen::Index>(digits[f])) = 1.0;
      factors.push_back(DensityOperator::unchecked(std::move(m), {registers[f]}));
    }
    ext.factors.push_back(std::move(factors));
  }
  return ext;
}

}  // namespace coordsim
