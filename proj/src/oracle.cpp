#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "coordsim/error.hpp"
#include "coordsim/region.hpp"

namespace coordsim {

ClassicalTarget to_classical(const CqNetworkState& target) {
  if (!is_classical(target)) throw Error(ErrorCode::InvalidArgument, "oracle needs a diagonal target");
  ClassicalTarget out;
  out.topology = target.topology;
  const auto weights = target.classical_weights();
  if (target.topology != Topology::NoComm) out.sizes.push_back(target.x_size());
  for (const auto& r : target.quantum_registers()) out.sizes.push_back(r.dim);
  for (std::size_t x = 0; x < weights.size(); ++x) {
    const auto diag = target.conditionals[x].matrix().diagonal().real();
    for (Eigen::Index y = 0; y < diag.size(); ++y) out.pmf.push_back(weights[x] * std::max(0.0, diag[y]));
  }
  return out;
}

namespace {

constexpr double kProductTol = 1e-12;

double entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

// Depth-first scan of integer compositions W(u | input) = c / N.
class Scanner {
 public:
  Scanner(const ClassicalTarget& target, const OracleOptions& opts, std::size_t nu, std::size_t& nodes)
      : t_(target), opts_(opts), nu_(nu), nodes_(nodes) {
    steps_ = static_cast<std::size_t>(std::llround(1.0 / opts.grid_step));
    const std::size_t total = t_.pmf.size();
    strides_.assign(t_.sizes.size(), 1);
    for (std::size_t k = t_.sizes.size(); k-- > 1;) strides_[k - 1] = strides_[k] * t_.sizes[k];
    for (std::size_t i = 0; i < total; ++i) {
      if (t_.pmf[i] > 0.0) active_.push_back(i);
    }
    position_.assign(total, kUnassigned);
    for (std::size_t k = 0; k < active_.size(); ++k) position_[active_[k]] = k;
    counts_.assign(active_.size() * nu_, 0);
    digits_.assign(total, std::vector<std::size_t>(t_.sizes.size()));
    for (std::size_t i = 0; i < total; ++i) {
      std::size_t rest = i;
      for (std::size_t m = t_.sizes.size(); m-- > 0;) {
        digits_[i][m] = rest % t_.sizes[m];
        rest /= t_.sizes[m];
      }
    }
  }

  void run(double& best, std::size_t& evaluated) {
    best_ = &best;
    evaluated_ = &evaluated;
    if (active_.empty()) return;
    assign(0, 0, steps_);
  }

 private:
  static constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

  // Joint mass p(input) W(u|input); inputs without mass are exactly zero.
  // Returns NaN while the entry is still unassigned.
  double mass(std::size_t input, std::size_t u, std::size_t row, std::size_t col) const {
    const std::size_t k = position_[input];
    if (k == kUnassigned) return 0.0;
    if (k > row || (k == row && u > col)) return std::numeric_limits<double>::quiet_NaN();
    return t_.pmf[input] * static_cast<double>(counts_[k * nu_ + u]) / static_cast<double>(steps_);
  }

  // Every single-variable flattening of column u must stay rank one: check the
  // 2x2 minors that involve the entry just set.
  bool consistent(std::size_t row, std::size_t u) const {
    const std::size_t input = active_[row];
    const double v = mass(input, u, row, u);
    for (std::size_t other = 0; other < t_.pmf.size(); ++other) {
      if (other == input) continue;
      const double w = mass(other, u, row, u);
      if (std::isnan(w)) continue;
      for (std::size_t m = 0; m < t_.sizes.size(); ++m) {
        if (digits_[other][m] == digits_[input][m]) continue;
        // Swap variable m between the two inputs.
        const std::size_t a = input + (digits_[other][m] - digits_[input][m]) * strides_[m];
        const std::size_t b = other + (digits_[input][m] - digits_[other][m]) * strides_[m];
        if (a == input || a == other) continue;
        const double pa = mass(a, u, row, u);
        const double pb = mass(b, u, row, u);
        if (std::isnan(pa) || std::isnan(pb)) continue;
        if (std::abs(v * w - pa * pb) > kProductTol) return false;
      }
    }
    return true;
  }

  void assign(std::size_t row, std::size_t u, std::size_t remaining) {
    if (++nodes_ > opts_.budget) {
      throw BudgetExceeded("oracle exceeded its budget of " + std::to_string(opts_.budget) + " search nodes", *best_);
    }
    if (row == active_.size()) {
      evaluate();
      return;
    }
    if (u + 1 == nu_) {
      place(row, u, remaining, [&] { assign(row + 1, 0, steps_); });
      return;
    }
    // The first row is nonincreasing in u: relabelling U leaves the objective unchanged.
    std::size_t hi = remaining;
    if (row == 0 && u > 0) hi = std::min(hi, counts_[u - 1]);
    for (std::size_t c = hi + 1; c-- > 0;) {
      if (row == 0 && (remaining - c) > c * (nu_ - u - 1)) break;
      place(row, u, c, [&] { assign(row, u + 1, remaining - c); });
    }
  }

  template <typename Next>
  void place(std::size_t row, std::size_t u, std::size_t c, Next&& next) {
    if (row == 0 && u > 0 && c > counts_[u - 1]) return;
    counts_[row * nu_ + u] = c;
    if (consistent(row, u)) next();
    counts_[row * nu_ + u] = 0;
  }

  void evaluate() {
    ++*evaluated_;
    const std::size_t total = t_.pmf.size();
    std::vector<double> pu(nu_, 0.0);
    std::vector<double> joint;  // over (input, u)
    std::vector<double> first_u(t_.sizes.front() * nu_, 0.0);
    for (std::size_t i = 0; i < total; ++i) {
      for (std::size_t u = 0; u < nu_; ++u) {
        const double m = mass(i, u, active_.size(), nu_);
        pu[u] += m;
        joint.push_back(m);
        first_u[digits_[i][0] * nu_ + u] += m;
      }
    }
    std::vector<double> first(t_.sizes.front(), 0.0);
    for (std::size_t i = 0; i < total; ++i) first[digits_[i][0]] += t_.pmf[i];
    const double h_u = entropy(pu);
    const double i_all = std::max(0.0, entropy(t_.pmf) + h_u - entropy(joint));
    const double i_first = std::max(0.0, entropy(first) + h_u - entropy(first_u));
    double value = 0.0;
    switch (opts_.objective) {
      case OracleObjective::FirstInput: value = i_first; break;
      case OracleObjective::AllInputs: value = i_all; break;
      case OracleObjective::Region: value = std::max(i_first, i_all - opts_.r0); break;
    }
    *best_ = std::min(*best_, value);
  }

  const ClassicalTarget& t_;
  const OracleOptions& opts_;
  std::size_t nu_;
  std::size_t steps_ = 1;
  std::vector<std::size_t> strides_;
  std::vector<std::size_t> active_;
  std::vector<std::size_t> position_;
  std::vector<std::size_t> counts_;
  std::vector<std::vector<std::size_t>> digits_;
  double* best_ = nullptr;
  std::size_t* evaluated_ = nullptr;
  std::size_t& nodes_;
};

}  // namespace

OracleResult brute_force_oracle(const ClassicalTarget& target, const OracleOptions& opts) {
  if (target.sizes.empty()) throw Error(ErrorCode::InvalidArgument, "oracle target has no variables");
  const std::size_t total =
      std::accumulate(target.sizes.begin(), target.sizes.end(), std::size_t{1}, std::multiplies<>());
  if (target.pmf.size() != total) throw Error(ErrorCode::DimMismatch, "oracle PMF size differs from the variable sizes");
  const double inv = 1.0 / opts.grid_step;
  const double k = std::log2(inv);
  if (!(opts.grid_step > 0.0) || std::abs(k - std::round(k)) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "grid step must be 1/2^k");
  }
  if (opts.max_u == 0) throw Error(ErrorCode::InvalidArgument, "max_u must be positive");

  OracleResult result;
  double best = std::numeric_limits<double>::infinity();
  std::size_t evaluated = 0;
  std::size_t nodes = 0;
  for (std::size_t nu = 1; nu <= opts.max_u; ++nu) {
    const double before = best;
    Scanner(target, opts, nu, nodes).run(best, evaluated);
    if (best < before - 1e-12) result.u_size = nu;
    if (best <= 0.0) break;
  }
  result.value = best;
  result.evaluated = evaluated;
  return result;
}

}  // namespace coordsim
