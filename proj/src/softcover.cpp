#include "coordsim/softcover.hpp"

#include <cmath>
#include <string>

#include "coordsim/error.hpp"
#include "coordsim/parallel.hpp"
#include "coordsim/random.hpp"
#include "internal/tensor_mixture.hpp"

namespace coordsim {

std::size_t codebook_size(double rate, std::size_t n, std::size_t cap) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw Error(ErrorCode::InvalidArgument, "rate must be finite and nonnegative");
  const double exact = std::exp2(rate * static_cast<double>(n));
  if (!(exact <= static_cast<double>(cap))) {
    // Allow values that snap down onto the cap.
    if (!(std::abs(exact - static_cast<double>(cap)) <= 1e-9 * exact)) {
      throw Error(ErrorCode::ShapeOverflow, "2^(nR) = " + std::to_string(exact) + " exceeds codebook cap " + std::to_string(cap));
    }
  }
  const double nearest = std::round(exact);
  const double size = std::abs(exact - nearest) <= 1e-9 * exact ? nearest : std::ceil(exact);
  return static_cast<std::size_t>(std::max(1.0, size));
}

Codebook draw_codebook(const std::vector<double>& pmf, std::size_t n, std::size_t num_bins, std::size_t bin_size,
                       std::uint64_t seed, std::size_t max_codewords) {
  if (pmf.empty()) throw Error(ErrorCode::InvalidArgument, "codebook PMF is empty");
  if (num_bins == 0 || bin_size == 0) throw Error(ErrorCode::InvalidArgument, "codebook needs at least one word");
  if (num_bins > max_codewords / bin_size) {
    throw Error(ErrorCode::ShapeOverflow, "codebook with " + std::to_string(num_bins) + " x " +
                                              std::to_string(bin_size) + " words exceeds cap " +
                                              std::to_string(max_codewords));
  }
  Codebook cb;
  cb.n = n;
  cb.num_bins = num_bins;
  cb.bin_size = bin_size;
  cb.seed = seed;
  cb.pmf = pmf;
  cb.symbols.resize(num_bins * bin_size * n);
  for (std::size_t j = 0; j < num_bins; ++j) {
    for (std::size_t i = 0; i < bin_size; ++i) {
      Stream stream(derive_seed(seed, {i, j}));
      std::uint32_t* out = cb.symbols.data() + (j * bin_size + i) * n;
      for (std::size_t k = 0; k < n; ++k) out[k] = static_cast<std::uint32_t>(stream.categorical(pmf));
    }
  }
  return cb;
}

DensityOperator CEnsemble::average() const {
  Matrix avg = Matrix::Zero(states.front().matrix().rows(), states.front().matrix().cols());
  for (std::size_t x = 0; x < pmf.size(); ++x) avg += pmf[x] * states[x].matrix();
  return DensityOperator::unchecked(hermitian_part(avg), states.front().registers());
}

double CEnsemble::mutual_information() const {
  double conditional = 0.0;
  for (std::size_t x = 0; x < pmf.size(); ++x) {
    if (pmf[x] > 0.0) conditional += pmf[x] * von_neumann_entropy(states[x]);
  }
  return std::max(0.0, von_neumann_entropy(average()) - conditional);
}

CEnsemble make_ensemble(std::vector<double> pmf, std::vector<DensityOperator> states, const Tolerances& tol) {
  if (pmf.empty() || pmf.size() != states.size()) {
    throw Error(ErrorCode::DimMismatch, "ensemble needs one state per symbol");
  }
  double total = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0)) throw Error(ErrorCode::InvalidArgument, "ensemble PMF has a negative entry");
    total += p;
  }
  if (!(std::abs(total - 1.0) <= tol.trace)) throw Error(ErrorCode::NotUnitTrace, "ensemble PMF does not sum to 1");
  for (const auto& s : states) {
    if (s.registers() != states.front().registers()) throw Error(ErrorCode::DimMismatch, "ensemble states differ in shape");
  }
  return CEnsemble{std::move(pmf), std::move(states)};
}

namespace {

std::size_t checked_power(std::size_t d, std::size_t n, std::size_t cap) {
  std::size_t out = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (out > cap / d) throw Error(ErrorCode::DimensionCap, "dimension " + std::to_string(d) + "^" + std::to_string(n) + " exceeds cap " + std::to_string(cap));
    out *= d;
  }
  return out;
}

void check_alphabet(const Codebook& cb, const CEnsemble& ens) {
  if (cb.pmf.size() != ens.pmf.size()) throw Error(ErrorCode::DimMismatch, "codebook alphabet differs from ensemble");
}

std::vector<Register> power_registers(const CEnsemble& ens, std::size_t n) {
  std::vector<Register> out;
  for (std::size_t k = 1; k <= n; ++k) {
    for (const auto& r : ens.states.front().registers()) out.push_back({r.name + "_" + std::to_string(k), r.dim});
  }
  return out;
}

bool all_diagonal(const CEnsemble& ens) {
  for (const auto& s : ens.states) {
    if (!is_diagonal(s.matrix())) return false;
  }
  return true;
}

detail::WordSet uniform_words(const Codebook& cb) {
  detail::WordSet words;
  words.n = cb.n;
  const double w = 1.0 / static_cast<double>(cb.size());
  for (std::size_t j = 0; j < cb.num_bins; ++j) {
    for (std::size_t i = 0; i < cb.bin_size; ++i) words.add(cb.word(i, j), w);
  }
  return words;
}

std::vector<Matrix> local_matrices(const CEnsemble& ens) {
  std::vector<Matrix> out;
  for (const auto& s : ens.states) out.push_back(s.matrix());
  return out;
}

std::vector<RealVector> local_diagonals(const CEnsemble& ens) {
  std::vector<RealVector> out;
  for (const auto& s : ens.states) out.push_back(s.matrix().diagonal().real());
  return out;
}

// Trace norm of target - mixture for one codebook, with the target computed
// once by the caller.
struct GapEvaluator {
  const CEnsemble& ens;
  std::size_t n;
  bool diagonal;
  Matrix target;
  RealVector target_diag;

  GapEvaluator(const CEnsemble& e, std::size_t blocklength, std::size_t dim_cap)
      : ens(e), n(blocklength), diagonal(all_diagonal(e)) {
    checked_power(e.states.front().dim(), blocklength, dim_cap);
    const Matrix avg = e.average().matrix();
    if (diagonal) {
      target_diag = detail::tensor_power(RealVector(avg.diagonal().real()), n);
    } else {
      target = detail::tensor_power(avg, n);
    }
  }

  double operator()(const Codebook& cb) const {
    const auto words = uniform_words(cb);
    if (diagonal) {
      const RealVector mix = detail::product_mixture(words, local_diagonals(ens));
      return (mix - target_diag).cwiseAbs().sum();
    }
    const Matrix mix = detail::product_mixture(words, local_matrices(ens));
    return hermitian_trace_norm(mix - target);
  }
};

}  // namespace

DensityOperator mixture_state(const Codebook& cb, const CEnsemble& ens, std::size_t dim_cap) {
  check_alphabet(cb, ens);
  checked_power(ens.states.front().dim(), cb.n, dim_cap);
  Matrix mix = detail::product_mixture(uniform_words(cb), local_matrices(ens));
  return DensityOperator::unchecked(hermitian_part(mix), power_registers(ens, cb.n));
}

double resolvability_gap(const Codebook& cb, const CEnsemble& ens, std::size_t dim_cap) {
  check_alphabet(cb, ens);
  return GapEvaluator(ens, cb.n, dim_cap)(cb);
}

ResolvabilityCurve resolvability_curve(const CEnsemble& ens, double rate, const std::vector<std::size_t>& n_list,
                                       std::size_t trials, std::uint64_t seed, const CurveOptions& opts) {
  if (trials < 2) throw Error(ErrorCode::InvalidArgument, "a curve needs at least 2 trials");
  ResolvabilityCurve curve;
  curve.rate = rate;
  curve.mutual_info_ref = ens.mutual_information();
  for (std::size_t n : n_list) {
    const std::size_t size = codebook_size(rate, n, opts.caps.max_codewords);
    const GapEvaluator evaluate(ens, n, opts.caps.max_dim);
    std::vector<double> gaps(trials);
    parallel_for(trials, opts.threads, [&](std::size_t t) {
      const auto cb = draw_codebook(ens.pmf, n, 1, size, derive_seed(seed, {n, t}), opts.caps.max_codewords);
      gaps[t] = evaluate(cb);
    });
    curve.rows.push_back(summarize_gaps(n, std::move(gaps)));
  }
  return curve;
}

}  // namespace coordsim
