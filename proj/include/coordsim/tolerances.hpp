#pragma once

#include <cstddef>

namespace coordsim {

/// Numerical tolerances shared by every module. Defaults are the values the
/// test suites are written against.
struct Tolerances {
  double hermitian = 1e-9;  // max |M - M^dagger| entrywise
  double trace = 1e-9;      // |Tr M - 1|
  double psd = 1e-9;        // smallest eigenvalue may dip this far below zero
  double numeric = 1e-7;    // generic slack for entropy identities
  double feasibility = 1e-6;  // trace-distance residual of an extension's marginal

  bool operator==(const Tolerances&) const = default;
};

/// Size limits guarding dense constructions. All are configurable; the CLI can
/// raise them through COORDSIM_CAPS.
struct Caps {
  std::size_t max_dim = 16384;        // dense operator dimension (tensor, mixture_state)
  std::size_t max_blocks = 4096;      // |X|^n classical blocks in induced states
  std::size_t max_block_dim = 256;    // per-block quantum dimension (two-node, broadcast)
  std::size_t max_total_dim = 4096;   // (dA dB dC)^n for the no-communication network
  std::size_t max_codewords = std::size_t{1} << 20;

  bool operator==(const Caps&) const = default;
};

}  // namespace coordsim
