#pragma once

// Exact small-n execution of the coordination codes built from an extension.
//
// Two-node and broadcast: Nature draws x^n; common randomness j is uniform on
// the bins; the encoder picks i with probability
//   P(i | x^n, j)  proportional to  prod_k p(x_k | u_k(i, j))
// and the decoder(s) prepare the product state of u^n(i, j). Every expectation
// except the codebook draw is computed exactly, block by block over x^n.
//
// No communication: each party prepares its factor of u^n(j) for the shared j.
// Per-copy registers are interleaved: (A_1 B_1 C_1)(A_2 B_2 C_2)...

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "coordsim/cq_model.hpp"
#include "coordsim/curve.hpp"
#include "coordsim/softcover.hpp"
#include "coordsim/tolerances.hpp"

namespace coordsim {

struct TwoNodeCode {
  std::size_t n = 0;
  double r0 = 0.0;
  double r1 = 0.0;
  Codebook codebook;  // ceil(2^{n R0}) bins of ceil(2^{n R1}) words over U
  Extension extension;
  CqNetworkState target;
};

struct BroadcastCode {
  std::size_t n = 0;
  double r0 = 0.0;
  double r1 = 0.0;
  Codebook codebook;
  Extension extension;
  CqNetworkState target;
};

struct NoCommCode {
  std::size_t n = 0;
  double r0 = 0.0;
  Codebook codebook;  // ceil(2^{n R0}) bins of one word each
  Extension extension;
  CqNetworkState target;
};

struct ProtocolOptions {
  std::size_t threads = 1;
  Caps caps{};
  Tolerances tol{};
};

/// Builders check the extension against the target (InfeasibleExtension when
/// the residual exceeds tol.feasibility) and draw the codebook from p_U.
TwoNodeCode make_two_node_code(const CqNetworkState& target, const Extension& ext, double r0, double r1,
                               std::size_t n, std::uint64_t seed, const ProtocolOptions& opts = {});
BroadcastCode make_broadcast_code(const CqNetworkState& target, const Extension& ext, double r0, double r1,
                                  std::size_t n, std::uint64_t seed, const ProtocolOptions& opts = {});
NoCommCode make_no_comm_code(const CqNetworkState& target, const Extension& ext, double r0, std::size_t n,
                             std::uint64_t seed, const ProtocolOptions& opts = {});

/// P(i | x^n, j) over the words of bin j; uniform when every likelihood is 0.
std::vector<double> encoder_pmf(const TwoNodeCode& code, std::span<const std::size_t> x_seq, std::size_t j);
std::vector<double> encoder_pmf(const BroadcastCode& code, std::span<const std::size_t> x_seq, std::size_t j);

/// One classical block of an induced c-q state: weight p_X^n(x^n) and the
/// unit-trace conditional operator on the quantum registers.
struct InducedBlock {
  std::vector<std::size_t> x_seq;
  double weight = 0.0;
  Matrix state;
};

struct InducedState {
  std::vector<InducedBlock> blocks;  // x^n in lexicographic order
  std::vector<Register> registers;   // quantum registers, copy-interleaved
};

InducedState induced_state_two_node(const TwoNodeCode& code, const Caps& caps = {});
InducedState induced_state_broadcast(const BroadcastCode& code, const Caps& caps = {});
DensityOperator induced_state_no_comm(const NoCommCode& code, const Caps& caps = {});

/// Dense form [X^n, quantum...] of an induced c-q state (small instances).
DensityOperator assemble_induced(const InducedState& state, std::size_t x_size);

/// The n-fold target omega^{(x) n} in the same layout as the induced state.
CqNetworkState target_power(const CqNetworkState& target, std::size_t n, const Caps& caps = {});

/// sum_{x^n} || block(x^n) - p(x^n) omega^{x^n} ||_1
double protocol_gap(const TwoNodeCode& code, const Caps& caps = {});
double protocol_gap(const BroadcastCode& code, const Caps& caps = {});
/// || rho_hat - omega_ABC^{(x) n} ||_1
double protocol_gap(const NoCommCode& code, const Caps& caps = {});

struct ProtocolCurve {
  Topology topology = Topology::TwoNode;
  double r0 = 0.0;
  double r1 = 0.0;
  std::vector<GapRow> rows;
  /// Largest |p_hat(x^n) - p(x^n)| seen over all trials; must stay at rounding
  /// level since the encoder never alters x^n.
  double max_marginal_defect = 0.0;
};

/// Trial t at blocklength n draws its codebook with derive_seed(seed, {n, t}).
ProtocolCurve run_two_node(const CqNetworkState& target, const Extension& ext, double r0, double r1,
                           const std::vector<std::size_t>& n_list, std::size_t trials, std::uint64_t seed,
                           const ProtocolOptions& opts = {});
ProtocolCurve run_broadcast(const CqNetworkState& target, const Extension& ext, double r0, double r1,
                            const std::vector<std::size_t>& n_list, std::size_t trials, std::uint64_t seed,
                            const ProtocolOptions& opts = {});
ProtocolCurve run_no_comm(const CqNetworkState& target, const Extension& ext, double r0,
                          const std::vector<std::size_t>& n_list, std::size_t trials, std::uint64_t seed,
                          const ProtocolOptions& opts = {});

}  // namespace coordsim
