#include "internal/tensor_mixture.hpp"

#include <algorithm>
#include <numeric>

namespace coordsim::detail {

namespace {

template <typename Local>
std::size_t local_dim(const Local& a) {
  return static_cast<std::size_t>(a.rows());
}

Matrix zeros_like(const Matrix&, Eigen::Index d) { return Matrix::Zero(d, d); }
RealVector zeros_like(const RealVector&, Eigen::Index d) { return RealVector::Zero(d); }

void accumulate(double w, const Matrix& a, const Matrix& b, Matrix& out) { kron_accumulate(cplx(w, 0.0), a, b, out); }
void accumulate(double w, const RealVector& a, const RealVector& b, RealVector& out) { kron_accumulate(w, a, b, out); }

template <typename Local>
struct Builder {
  const WordSet& words;
  const std::vector<Local>& locals;
  std::vector<std::size_t> order;  // word indices sorted lexicographically
  std::size_t d;

  std::uint32_t symbol(std::size_t idx, std::size_t level) const { return words.symbols[order[idx] * words.n + level]; }

  // Mixture of the suffixes (from `level`) of words order[lo..hi).
  Local build(std::size_t lo, std::size_t hi, std::size_t level) const {
    if (level + 1 == words.n) {
      Local out = zeros_like(locals.front(), static_cast<Eigen::Index>(d));
      for (std::size_t k = lo; k < hi; ++k) out += words.weights[order[k]] * locals[symbol(k, level)];
      return out;
    }
    Eigen::Index dim = 1;
    for (std::size_t k = level; k < words.n; ++k) dim *= static_cast<Eigen::Index>(d);
    Local out = zeros_like(locals.front(), dim);
    std::size_t start = lo;
    while (start < hi) {
      const std::uint32_t a = symbol(start, level);
      std::size_t stop = start + 1;
      while (stop < hi && symbol(stop, level) == a) ++stop;
      const Local tail = build(start, stop, level + 1);
      accumulate(1.0, locals[a], tail, out);
      start = stop;
    }
    return out;
  }
};

template <typename Local>
Local mixture(const WordSet& words, const std::vector<Local>& locals) {
  const std::size_t d = local_dim(locals.front());
  if (words.n == 0) {
    Local out = zeros_like(locals.front(), 1);
    out(0) = std::accumulate(words.weights.begin(), words.weights.end(), 0.0);
    return out;
  }
  Builder<Local> b{words, locals, {}, d};
  b.order.resize(words.size());
  std::iota(b.order.begin(), b.order.end(), std::size_t{0});
  std::stable_sort(b.order.begin(), b.order.end(), [&](std::size_t l, std::size_t r) {
    return std::lexicographical_compare(words.symbols.begin() + static_cast<std::ptrdiff_t>(l * words.n),
                                        words.symbols.begin() + static_cast<std::ptrdiff_t>((l + 1) * words.n),
                                        words.symbols.begin() + static_cast<std::ptrdiff_t>(r * words.n),
                                        words.symbols.begin() + static_cast<std::ptrdiff_t>((r + 1) * words.n));
  });
  if (words.size() == 0) {
    Eigen::Index dim = 1;
    for (std::size_t k = 0; k < words.n; ++k) dim *= static_cast<Eigen::Index>(d);
    return zeros_like(locals.front(), dim);
  }
  return b.build(0, words.size(), 0);
}

}  // namespace

Matrix product_mixture(const WordSet& words, const std::vector<Matrix>& locals) { return mixture(words, locals); }

RealVector product_mixture(const WordSet& words, const std::vector<RealVector>& locals) {
  return mixture(words, locals);
}

Matrix tensor_power(const Matrix& a, std::size_t n) {
  Matrix out = Matrix::Identity(1, 1);
  for (std::size_t k = 0; k < n; ++k) out = kron(out, a);
  return out;
}

RealVector tensor_power(const RealVector& a, std::size_t n) {
  RealVector out = RealVector::Ones(1);
  for (std::size_t k = 0; k < n; ++k) {
    RealVector next = RealVector::Zero(out.size() * a.size());
    kron_accumulate(1.0, out, a, next);
    out = std::move(next);
  }
  return out;
}

}  // namespace coordsim::detail
