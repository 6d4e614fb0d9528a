#pragma once

// Target states of the three coordination networks and their auxiliary-variable
// extensions. A two-node target is omega_XB = sum_x p(x) |x><x| (x) omega_B^x;
// an extension adds a classical U such that, given u, the quantum registers are
// in a fixed product state independent of x:
//
//   sigma_XUB = sum_{x,u} p(x,u) |x><x| (x) |u><u| (x) theta_B^u
//
// The broadcast network has two factors per u (theta_B1^u (x) eta_B2^u) and the
// no-communication network has no X and three factors (A, B, C).

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "coordsim/density.hpp"
#include "coordsim/tolerances.hpp"

namespace coordsim {

enum class Topology { TwoNode, NoComm, Broadcast };

std::string_view to_string(Topology topology);
Topology topology_from_string(std::string_view name);

/// Number of quantum registers (and of per-u product factors) for a topology.
std::size_t factor_count(Topology topology);

inline constexpr const char* kClassicalLabel = "X";
inline constexpr const char* kAuxiliaryLabel = "U";

struct CqNetworkState {
  Topology topology = Topology::TwoNode;
  std::vector<double> pmf;                    // p_X; empty for NoComm
  std::vector<DensityOperator> conditionals;  // omega^x per x; NoComm: the single omega_ABC

  std::size_t x_size() const { return pmf.size(); }
  const std::vector<Register>& quantum_registers() const { return conditionals.front().registers(); }
  std::size_t quantum_dim() const { return conditionals.front().dim(); }
  /// p_X, or {1} for the no-communication network.
  std::vector<double> classical_weights() const;
};

/// Validates topology, PMF and conditionals. Conditionals must already be
/// valid density operators over the same registers.
CqNetworkState make_cq_state(Topology topology, std::vector<double> pmf,
                             std::vector<DensityOperator> conditionals, const Tolerances& tol = {});

struct Extension {
  Topology topology = Topology::TwoNode;
  /// joint[x][u] = p(x,u). The no-communication network uses one row (p_U).
  std::vector<std::vector<double>> joint;
  /// factors[u][f]: theta^u for each quantum register, in register order.
  std::vector<std::vector<DensityOperator>> factors;

  std::size_t x_size() const { return joint.size(); }
  std::size_t u_size() const { return factors.size(); }
  std::vector<Register> quantum_registers() const;
  std::vector<double> u_marginal() const;
  std::vector<double> x_marginal() const;
  /// theta^u as one matrix over all quantum registers.
  Matrix product_state(std::size_t u) const;
};

Extension make_extension(Topology topology, std::vector<std::vector<double>> joint,
                         std::vector<std::vector<DensityOperator>> factors, const Tolerances& tol = {});

/// |U| <= |X|^2 (prod of local dims)^2 + 1. For the two-node network this is
/// the Caratheodory bound; for the other networks it is the same expression
/// used as a heuristic search cap.
std::size_t cardinality_bound(Topology topology, std::size_t x_size, const std::vector<Register>& registers);

/// Extensions larger than the bound are legal; callers may warn.
bool exceeds_cardinality_bound(const Extension& ext);

/// Block-diagonal density operator with registers [X, quantum...]
/// (NoComm: the quantum state itself).
DensityOperator assemble(const CqNetworkState& state, std::size_t dim_cap = Caps{}.max_dim);

/// sigma with registers [X, U, quantum...] (NoComm: [U, quantum...]).
DensityOperator assemble(const Extension& ext, std::size_t dim_cap = Caps{}.max_dim);

/// Sums out U: p_X(x) = sum_u p(x,u), omega^x = sum_u p(u|x) theta^u.
CqNetworkState marginalize_extension(const Extension& ext);

/// Trace distance between the extension's marginal and the target, computed
/// block by block over the shared classical basis.
double feasibility_residual(const Extension& ext, const CqNetworkState& target);

struct InfoPair {
  double x_u = 0.0;    // I(X;U)
  double all_u = 0.0;  // I(X Q;U), Q = every quantum register
};

/// Computed on the assembled sigma_XUB.
InfoPair info_two_node(const Extension& ext, const Tolerances& tol = {});
/// I(U;ABC) on the assembled sigma_UABC.
double info_nc(const Extension& ext, const Tolerances& tol = {});
/// Computed on the assembled sigma_XUB1B2.
InfoPair info_broadcast(const Extension& ext, const Tolerances& tol = {});

/// Same functionals from the block structure of sigma without assembling it:
///   I(XQ;U) = I(X;U) + sum_x p(x) H(omega^x) - sum_u p(u) sum_f H(theta_f^u).
InfoPair info_structured(const Extension& ext);

/// Classical mutual information of a joint PMF given as rows.
double classical_mutual_information(const std::vector<std::vector<double>>& joint);

/// Shannon entropy in bits.
double shannon_entropy(const std::vector<double>& pmf);

// Canonical extensions of a target, used as seeds by the region search.

/// |U| = 1 with theta_f the single-register marginals of the averaged state.
/// Feasible iff the target is a product.
Extension product_extension(const CqNetworkState& target);

/// U = X (two-node, broadcast): theta^x built from the marginals of omega^x.
/// Feasible iff each omega^x is a product over the quantum registers.
Extension identity_extension(const CqNetworkState& target);

/// True when every conditional is diagonal in the computational basis.
bool is_classical(const CqNetworkState& target);

/// For classical targets: U ranges over computational basis outcomes y of all
/// quantum registers, theta^y = |y><y|. Always feasible for classical targets.
Extension basis_extension(const CqNetworkState& target);

}  // namespace coordsim
