#include "coordsim/protocols.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "coordsim/error.hpp"
#include "coordsim/parallel.hpp"
#include "coordsim/random.hpp"
#include "internal/tensor_mixture.hpp"

namespace coordsim {

namespace {

void check_feasible(const CqNetworkState& target, const Extension& ext, const Tolerances& tol) {
  const double residual = feasibility_residual(ext, target);
  if (!(residual <= tol.feasibility)) {
    throw Error(ErrorCode::InfeasibleExtension, "extension residual " + std::to_string(residual) +
                                                    " exceeds tolerance " + std::to_string(tol.feasibility));
  }
}

std::size_t checked_power(std::size_t base, std::size_t n, std::size_t cap, const std::string& what) {
  std::size_t out = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (out > cap / base) {
      throw Error(ErrorCode::DimensionCap, what + " " + std::to_string(base) + "^" + std::to_string(n) +
                                               " exceeds cap " + std::to_string(cap));
    }
    out *= base;
  }
  return out;
}

std::vector<Register> interleaved_registers(const std::vector<Register>& per_copy, std::size_t n) {
  std::vector<Register> out;
  for (std::size_t k = 1; k <= n; ++k) {
    for (const auto& r : per_copy) out.push_back({r.name + "_" + std::to_string(k), r.dim});
  }
  return out;
}

// Per-copy operators: one per symbol, either all dense or all diagonal.
struct Locals {
  bool diagonal = true;
  std::vector<Matrix> dense;
  std::vector<RealVector> diag;
};

Locals make_locals(std::vector<Matrix> matrices, bool force_dense) {
  Locals out;
  out.diagonal = !force_dense;
  for (const auto& m : matrices) out.diagonal = out.diagonal && is_diagonal(m);
  if (out.diagonal) {
    for (const auto& m : matrices) out.diag.push_back(m.diagonal().real());
  }
  out.dense = std::move(matrices);
  return out;
}

bool all_diagonal(const std::vector<Matrix>& ms) {
  for (const auto& m : ms) {
    if (!is_diagonal(m)) return false;
  }
  return true;
}

// Shared machinery for the two topologies with a classical source.
struct CqCode {
  std::size_t n;
  const Codebook& codebook;
  const Extension& ext;
  const CqNetworkState& target;

  // p(x | u) as [u][x]; rows for unused u stay zero.
  std::vector<std::vector<double>> likelihood() const {
    const auto pu = ext.u_marginal();
    std::vector<std::vector<double>> out(ext.u_size(), std::vector<double>(ext.x_size(), 0.0));
    for (std::size_t u = 0; u < ext.u_size(); ++u) {
      if (pu[u] <= 0.0) continue;
      for (std::size_t x = 0; x < ext.x_size(); ++x) out[u][x] = ext.joint[x][u] / pu[u];
    }
    return out;
  }

  std::vector<double> encoder(const std::vector<std::vector<double>>& lik, std::span<const std::size_t> x_seq,
                              std::size_t j) const {
    if (x_seq.size() != n) {
      throw Error(ErrorCode::LengthMismatch, "x sequence has length " + std::to_string(x_seq.size()) +
                                                 ", code has n = " + std::to_string(n));
    }
    if (j >= codebook.num_bins) throw Error(ErrorCode::InvalidArgument, "bin index out of range");
    std::vector<double> p(codebook.bin_size, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < codebook.bin_size; ++i) {
      const auto word = codebook.word(i, j);
      double l = 1.0;
      for (std::size_t k = 0; k < n && l > 0.0; ++k) {
        if (x_seq[k] >= ext.x_size()) throw Error(ErrorCode::InvalidArgument, "x symbol out of range");
        l *= lik[word[k]][x_seq[k]];
      }
      p[i] = l;
      total += l;
    }
    if (total > 0.0) {
      for (auto& v : p) v /= total;
    } else {
      p.assign(codebook.bin_size, 1.0 / static_cast<double>(codebook.bin_size));
    }
    return p;
  }

  struct BlockResult {
    std::vector<std::size_t> x_seq;
    double weight = 0.0;
    double gap = 0.0;     // weight * trace norm of (state - omega^{x^n})
    double defect = 0.0;  // weight * |tr(state) - 1|
    Matrix state;
  };

  // Visits every x^n in lexicographic order.
  template <typename Visit>
  void for_each_block(const Caps& caps, bool keep_state, Visit&& visit) const {
    const std::size_t nx = ext.x_size();
    checked_power(nx, n, caps.max_blocks, "classical blocks");
    const std::size_t dq = target.quantum_dim();
    checked_power(dq, n, caps.max_block_dim, "block dimension");

    std::vector<Matrix> theta;
    for (std::size_t u = 0; u < ext.u_size(); ++u) theta.push_back(ext.product_state(u));
    std::vector<Matrix> omega;
    for (const auto& c : target.conditionals) omega.push_back(c.matrix());
    const bool dense = keep_state || !all_diagonal(theta) || !all_diagonal(omega);
    const Locals theta_l = make_locals(std::move(theta), dense);
    const Locals omega_l = make_locals(std::move(omega), dense);
    const auto lik = likelihood();
    const double bin_weight = 1.0 / static_cast<double>(codebook.num_bins);

    std::vector<std::size_t> x_seq(n, 0);
    const std::size_t blocks = checked_power(nx, n, caps.max_blocks, "classical blocks");
    for (std::size_t b = 0; b < blocks; ++b) {
      std::size_t rest = b;
      for (std::size_t k = n; k-- > 0;) {
        x_seq[k] = rest % nx;
        rest /= nx;
      }
      double weight = 1.0;
      for (auto x : x_seq) weight *= target.pmf[x];

      detail::WordSet words;
      words.n = n;
      for (std::size_t j = 0; j < codebook.num_bins; ++j) {
        const auto p = encoder(lik, x_seq, j);
        for (std::size_t i = 0; i < codebook.bin_size; ++i) words.add(codebook.word(i, j), bin_weight * p[i]);
      }
      detail::WordSet omega_word;
      omega_word.n = n;
      std::vector<std::uint32_t> xs(x_seq.begin(), x_seq.end());
      omega_word.add(xs, 1.0);

      BlockResult r;
      r.x_seq = x_seq;
      r.weight = weight;
      if (theta_l.diagonal) {
        const RealVector state = detail::product_mixture(words, theta_l.diag);
        const RealVector ref = detail::product_mixture(omega_word, omega_l.diag);
        r.gap = weight * (state - ref).cwiseAbs().sum();
        r.defect = weight * std::abs(state.sum() - 1.0);
      } else {
        Matrix state = detail::product_mixture(words, theta_l.dense);
        const Matrix ref = detail::product_mixture(omega_word, omega_l.dense);
        r.gap = weight > 0.0 ? weight * hermitian_trace_norm(state - ref) : 0.0;
        r.defect = weight * std::abs(state.trace().real() - 1.0);
        if (keep_state) r.state = std::move(state);
      }
      visit(std::move(r));
    }
  }

  InducedState induced(const Caps& caps) const {
    InducedState out;
    out.registers = interleaved_registers(target.quantum_registers(), n);
    for_each_block(caps, true, [&](BlockResult&& r) {
      out.blocks.push_back(InducedBlock{std::move(r.x_seq), r.weight, std::move(r.state)});
    });
    return out;
  }

  // Returns (gap, marginal defect).
  std::pair<double, double> gap(const Caps& caps) const {
    double gap = 0.0;
    double defect = 0.0;
    for_each_block(caps, false, [&](BlockResult&& r) {
      gap += r.gap;
      defect = std::max(defect, r.defect);
    });
    return {gap, defect};
  }
};

Codebook draw_for(const Extension& ext, std::size_t n, double r0, double r1, bool with_bins, std::uint64_t seed,
                  const Caps& caps) {
  const std::size_t bins = codebook_size(r0, n, caps.max_codewords);
  const std::size_t per_bin = with_bins ? codebook_size(r1, n, caps.max_codewords) : 1;
  return draw_codebook(ext.u_marginal(), n, bins, per_bin, seed, caps.max_codewords);
}

void require(const CqNetworkState& target, const Extension& ext, Topology topology) {
  if (target.topology != topology || ext.topology != topology) {
    throw Error(ErrorCode::TopologyMismatch, "expected a " + std::string(to_string(topology)) + " target and extension");
  }
}

template <typename Code>
Code make_cq_code(const CqNetworkState& target, const Extension& ext, double r0, double r1, std::size_t n,
                  std::uint64_t seed, const ProtocolOptions& opts, Topology topology) {
  require(target, ext, topology);
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "blocklength must be positive");
  check_feasible(target, ext, opts.tol);
  Code code;
  code.n = n;
  code.r0 = r0;
  code.r1 = r1;
  code.codebook = draw_for(ext, n, r0, r1, true, seed, opts.caps);
  code.extension = ext;
  code.target = target;
  return code;
}

template <typename Code>
CqCode view(const Code& code) {
  return CqCode{code.n, code.codebook, code.extension, code.target};
}

template <typename MakeCode, typename GapOf>
ProtocolCurve run_curve(Topology topology, double r0, double r1, const std::vector<std::size_t>& n_list,
                        std::size_t trials, std::uint64_t seed, const ProtocolOptions& opts, MakeCode&& make,
                        GapOf&& gap_of) {
  if (trials == 0) throw Error(ErrorCode::InvalidArgument, "need at least one trial");
  ProtocolCurve curve;
  curve.topology = topology;
  curve.r0 = r0;
  curve.r1 = r1;
  for (std::size_t n : n_list) {
    std::vector<double> gaps(trials);
    std::vector<double> defects(trials);
    parallel_for(trials, opts.threads, [&](std::size_t t) {
      const auto code = make(n, derive_seed(seed, {n, t}));
      const auto [g, d] = gap_of(code);
      gaps[t] = g;
      defects[t] = d;
    });
    for (double d : defects) {
      curve.max_marginal_defect = std::max(curve.max_marginal_defect, d);
      if (!(d <= opts.tol.numeric)) {
        throw std::logic_error("induced classical marginal deviates from p_X^n by " + std::to_string(d));
      }
    }
    curve.rows.push_back(summarize_gaps(n, std::move(gaps)));
  }
  return curve;
}

}  // namespace

TwoNodeCode make_two_node_code(const CqNetworkState& target, const Extension& ext, double r0, double r1,
                               std::size_t n, std::uint64_t seed, const ProtocolOptions& opts) {
  return make_cq_code<TwoNodeCode>(target, ext, r0, r1, n, seed, opts, Topology::TwoNode);
}

BroadcastCode make_broadcast_code(const CqNetworkState& target, const Extension& ext, double r0, double r1,
                                  std::size_t n, std::uint64_t seed, const ProtocolOptions& opts) {
  return make_cq_code<BroadcastCode>(target, ext, r0, r1, n, seed, opts, Topology::Broadcast);
}

NoCommCode make_no_comm_code(const CqNetworkState& target, const Extension& ext, double r0, std::size_t n,
                             std::uint64_t seed, const ProtocolOptions& opts) {
  require(target, ext, Topology::NoComm);
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "blocklength must be positive");
  check_feasible(target, ext, opts.tol);
  NoCommCode code;
  code.n = n;
  code.r0 = r0;
  code.codebook = draw_for(ext, n, r0, 0.0, false, seed, opts.caps);
  code.extension = ext;
  code.target = target;
  return code;
}

std::vector<double> encoder_pmf(const TwoNodeCode& code, std::span<const std::size_t> x_seq, std::size_t j) {
  const auto v = view(code);
  return v.encoder(v.likelihood(), x_seq, j);
}

std::vector<double> encoder_pmf(const BroadcastCode& code, std::span<const std::size_t> x_seq, std::size_t j) {
  const auto v = view(code);
  return v.encoder(v.likelihood(), x_seq, j);
}

InducedState induced_state_two_node(const TwoNodeCode& code, const Caps& caps) { return view(code).induced(caps); }

InducedState induced_state_broadcast(const BroadcastCode& code, const Caps& caps) {
  return view(code).induced(caps);
}

namespace {

// Returns mixture and target for the no-communication code, dense or diagonal.
struct NoCommPair {
  bool diagonal = false;
  Matrix mix;
  Matrix ref;
  RealVector mix_diag;
  RealVector ref_diag;
};

NoCommPair no_comm_pair(const NoCommCode& code, const Caps& caps, bool force_dense) {
  checked_power(code.target.quantum_dim(), code.n, caps.max_total_dim, "total dimension");
  std::vector<Matrix> theta;
  for (std::size_t u = 0; u < code.extension.u_size(); ++u) theta.push_back(code.extension.product_state(u));
  const Matrix omega = code.target.conditionals.front().matrix();
  const bool diagonal = !force_dense && all_diagonal(theta) && is_diagonal(omega);
  detail::WordSet words;
  words.n = code.n;
  const double w = 1.0 / static_cast<double>(code.codebook.size());
  for (std::size_t j = 0; j < code.codebook.num_bins; ++j) words.add(code.codebook.word(0, j), w);
  NoCommPair out;
  out.diagonal = diagonal;
  if (diagonal) {
    std::vector<RealVector> diag;
    for (const auto& t : theta) diag.push_back(t.diagonal().real());
    out.mix_diag = detail::product_mixture(words, diag);
    out.ref_diag = detail::tensor_power(RealVector(omega.diagonal().real()), code.n);
  } else {
    out.mix = detail::product_mixture(words, theta);
    out.ref = detail::tensor_power(omega, code.n);
  }
  return out;
}

std::pair<double, double> no_comm_gap(const NoCommCode& code, const Caps& caps) {
  const auto pair = no_comm_pair(code, caps, false);
  if (pair.diagonal) {
    return {(pair.mix_diag - pair.ref_diag).cwiseAbs().sum(), std::abs(pair.mix_diag.sum() - 1.0)};
  }
  return {hermitian_trace_norm(pair.mix - pair.ref), std::abs(pair.mix.trace().real() - 1.0)};
}

}  // namespace

DensityOperator induced_state_no_comm(const NoCommCode& code, const Caps& caps) {
  const auto pair = no_comm_pair(code, caps, true);
  return DensityOperator::unchecked(hermitian_part(pair.mix),
                                    interleaved_registers(code.target.quantum_registers(), code.n));
}

DensityOperator assemble_induced(const InducedState& state, std::size_t x_size) {
  const std::size_t nx = state.blocks.size();
  const Eigen::Index d = state.blocks.front().state.rows();
  Matrix m = Matrix::Zero(d * static_cast<Eigen::Index>(nx), d * static_cast<Eigen::Index>(nx));
  for (std::size_t b = 0; b < nx; ++b) {
    m.block(static_cast<Eigen::Index>(b) * d, static_cast<Eigen::Index>(b) * d, d, d) =
        state.blocks[b].weight * state.blocks[b].state;
  }
  std::vector<Register> registers;
  const std::size_t n = state.blocks.front().x_seq.size();
  for (std::size_t k = 1; k <= n; ++k) registers.push_back({std::string(kClassicalLabel) + "_" + std::to_string(k), x_size});
  registers.insert(registers.end(), state.registers.begin(), state.registers.end());
  return DensityOperator::unchecked(std::move(m), std::move(registers));
}

CqNetworkState target_power(const CqNetworkState& target, std::size_t n, const Caps& caps) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "blocklength must be positive");
  CqNetworkState out;
  out.topology = target.topology;
  const auto registers = interleaved_registers(target.quantum_registers(), n);
  if (target.topology == Topology::NoComm) {
    checked_power(target.quantum_dim(), n, caps.max_total_dim, "total dimension");
    out.conditionals.push_back(
        DensityOperator::unchecked(detail::tensor_power(target.conditionals.front().matrix(), n), registers));
    return out;
  }
  const std::size_t nx = target.x_size();
  const std::size_t blocks = checked_power(nx, n, caps.max_blocks, "classical blocks");
  checked_power(target.quantum_dim(), n, caps.max_block_dim, "block dimension");
  std::vector<Matrix> omega;
  for (const auto& c : target.conditionals) omega.push_back(c.matrix());
  for (std::size_t b = 0; b < blocks; ++b) {
    std::vector<std::uint32_t> xs(n);
    std::size_t rest = b;
    double weight = 1.0;
    for (std::size_t k = n; k-- > 0;) {
      xs[k] = static_cast<std::uint32_t>(rest % nx);
      rest /= nx;
      weight *= target.pmf[xs[k]];
    }
    detail::WordSet word;
    word.n = n;
    word.add(xs, 1.0);
    out.pmf.push_back(weight);
    out.conditionals.push_back(DensityOperator::unchecked(detail::product_mixture(word, omega), registers));
  }
  return out;
}

double protocol_gap(const TwoNodeCode& code, const Caps& caps) { return view(code).gap(caps).first; }
double protocol_gap(const BroadcastCode& code, const Caps& caps) { return view(code).gap(caps).first; }
double protocol_gap(const NoCommCode& code, const Caps& caps) { return no_comm_gap(code, caps).first; }

ProtocolCurve run_two_node(const CqNetworkState& target, const Extension& ext, double r0, double r1,
                           const std::vector<std::size_t>& n_list, std::size_t trials, std::uint64_t seed,
                           const ProtocolOptions& opts) {
  require(target, ext, Topology::TwoNode);
  check_feasible(target, ext, opts.tol);
  return run_curve(
      Topology::TwoNode, r0, r1, n_list, trials, seed, opts,
      [&](std::size_t n, std::uint64_t s) { return make_two_node_code(target, ext, r0, r1, n, s, opts); },
      [&](const TwoNodeCode& code) { return view(code).gap(opts.caps); });
}

ProtocolCurve run_broadcast(const CqNetworkState& target, const Extension& ext, double r0, double r1,
                            const std::vector<std::size_t>& n_list, std::size_t trials, std::uint64_t seed,
                            const ProtocolOptions& opts) {
  require(target, ext, Topology::Broadcast);
  check_feasible(target, ext, opts.tol);
  return run_curve(
      Topology::Broadcast, r0, r1, n_list, trials, seed, opts,
      [&](std::size_t n, std::uint64_t s) { return make_broadcast_code(target, ext, r0, r1, n, s, opts); },
      [&](const BroadcastCode& code) { return view(code).gap(opts.caps); });
}

ProtocolCurve run_no_comm(const CqNetworkState& target, const Extension& ext, double r0,
                          const std::vector<std::size_t>& n_list, std::size_t trials, std::uint64_t seed,
                          const ProtocolOptions& opts) {
  require(target, ext, Topology::NoComm);
  check_feasible(target, ext, opts.tol);
  return run_curve(
      Topology::NoComm, r0, 0.0, n_list, trials, seed, opts,
      [&](std::size_t n, std::uint64_t s) { return make_no_comm_code(target, ext, r0, n, s, opts); },
      [&](const NoCommCode& code) { return no_comm_gap(code, opts.caps); });
}

}  // namespace coordsim
