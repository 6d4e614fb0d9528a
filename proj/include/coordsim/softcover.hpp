#pragma once

// Random codebooks and quantum soft covering. A rate-R codebook of i.i.d.
// words x^n(m) ~ p^n induces the mixture 2^{-nR} sum_m rho^{x^n(m)}; once R
// exceeds I(X;A) of the ensemble it approaches rho_A^{(x) n} in trace norm.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "coordsim/curve.hpp"
#include "coordsim/density.hpp"
#include "coordsim/tolerances.hpp"

namespace coordsim {

/// ceil(2^{n R}). Values within 1e-9 (relative) of an integer snap to it so
/// that, for example, R = 0.25 at n = 4 gives 2 rather than 3. Throws
/// ShapeOverflow above `cap`.
std::size_t codebook_size(double rate, std::size_t n, std::size_t cap = Caps{}.max_codewords);

struct Codebook {
  std::size_t n = 0;
  std::size_t num_bins = 1;
  std::size_t bin_size = 1;
  std::uint64_t seed = 0;
  std::vector<double> pmf;
  std::vector<std::uint32_t> symbols;  // word (i, j) at ((j * bin_size + i) * n)

  std::size_t size() const { return num_bins * bin_size; }
  std::span<const std::uint32_t> word(std::size_t i, std::size_t j) const {
    return {symbols.data() + (j * bin_size + i) * n, n};
  }
};

/// num_bins * bin_size i.i.d. words of length n. Word (i, j) is drawn from its
/// own stream seeded with derive_seed(seed, {i, j}).
Codebook draw_codebook(const std::vector<double>& pmf, std::size_t n, std::size_t num_bins, std::size_t bin_size,
                       std::uint64_t seed, std::size_t max_codewords = Caps{}.max_codewords);

/// Classical-quantum ensemble {p(x), rho^x}.
struct CEnsemble {
  std::vector<double> pmf;
  std::vector<DensityOperator> states;

  DensityOperator average() const;
  /// Holevo information I(X;A) = H(sum p rho) - sum p H(rho^x).
  double mutual_information() const;
};

CEnsemble make_ensemble(std::vector<double> pmf, std::vector<DensityOperator> states, const Tolerances& tol = {});

/// Uniform mixture over every codeword of the tensor-product conditionals.
/// Registers are "<name>_1" ... "<name>_n".
DensityOperator mixture_state(const Codebook& cb, const CEnsemble& ens, std::size_t dim_cap = Caps{}.max_dim);

/// ||rho_A^{(x) n} - mixture_state(cb, ens)||_1
double resolvability_gap(const Codebook& cb, const CEnsemble& ens, std::size_t dim_cap = Caps{}.max_dim);

struct CurveOptions {
  std::size_t threads = 1;
  Caps caps{};
};

struct ResolvabilityCurve {
  double rate = 0.0;
  double mutual_info_ref = 0.0;
  std::vector<GapRow> rows;
};

/// Mean gap over `trials` codebooks of size codebook_size(R, n) per n. Trial t
/// at blocklength n uses seed derive_seed(seed, {n, t}).
ResolvabilityCurve resolvability_curve(const CEnsemble& ens, double rate, const std::vector<std::size_t>& n_list,
                                       std::size_t trials, std::uint64_t seed, const CurveOptions& opts = {});

}  // namespace coordsim
