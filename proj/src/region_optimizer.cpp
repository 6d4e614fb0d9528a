#include "internal/region_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coordsim/parallel.hpp"
#include "coordsim/random.hpp"

namespace coordsim::detail {

namespace {

constexpr double kPenaltyStages[] = {1.0, 10.0, 100.0, 1000.0, 10000.0};
constexpr double kGradientClip = 50.0;

struct Problem {
  Topology topology;
  std::size_t nx = 1;
  std::size_t factors = 1;
  std::vector<Register> registers;
  std::size_t dim = 1;
  std::vector<double> px;
  std::vector<Matrix> omega;  // per x, over all quantum registers
  bool classical = false;
};

Problem make_problem(const CqNetworkState& target) {
  Problem p;
  p.topology = target.topology;
  p.px = target.classical_weights();
  p.nx = p.px.size();
  p.registers = target.quantum_registers();
  p.factors = p.registers.size();
  p.dim = target.quantum_dim();
  for (const auto& c : target.conditionals) p.omega.push_back(c.matrix());
  p.classical = is_classical(target);
  return p;
}

struct Point {
  std::vector<std::vector<double>> cond;  // [x][u] = p(u|x)
  std::vector<std::vector<Matrix>> roots;  // [u][f], theta = A A^dagger / tr
};

Matrix theta_of(const Matrix& a) {
  Matrix t = a * a.adjoint();
  return hermitian_part(t / t.trace().real());
}

Matrix kron_all(const std::vector<Matrix>& parts) {
  Matrix out = parts.front();
  for (std::size_t k = 1; k < parts.size(); ++k) out = kron(out, parts[k]);
  return out;
}

// Everything the gradients need at one point.
struct Evaluation {
  std::vector<std::vector<Matrix>> theta;  // [u][f]
  std::vector<Matrix> product;             // [u]
  std::vector<Matrix> residual;            // [x]: sum_u p(x,u) Theta^u - p(x) omega^x
  std::vector<double> pu;
  double penalty = 0.0;  // sum_x ||R_x||_F^2
};

Evaluation evaluate(const Problem& prob, const Point& pt) {
  Evaluation ev;
  const std::size_t nu = pt.roots.size();
  ev.pu.assign(nu, 0.0);
  for (std::size_t u = 0; u < nu; ++u) {
    std::vector<Matrix> ts;
    for (const auto& a : pt.roots[u]) ts.push_back(theta_of(a));
    ev.product.push_back(kron_all(ts));
    ev.theta.push_back(std::move(ts));
    for (std::size_t x = 0; x < prob.nx; ++x) ev.pu[u] += prob.px[x] * pt.cond[x][u];
  }
  for (std::size_t x = 0; x < prob.nx; ++x) {
    Matrix r = -prob.px[x] * prob.omega[x];
    for (std::size_t u = 0; u < nu; ++u) r += (prob.px[x] * pt.cond[x][u]) * ev.product[u];
    ev.penalty += r.squaredNorm();
    ev.residual.push_back(std::move(r));
  }
  return ev;
}

// Tr_{others}[M (theta_1 (x) ... I_f ... (x) theta_F)]
Matrix factor_gradient(const Matrix& m, const std::vector<Matrix>& theta, std::size_t f,
                       const std::vector<Register>& registers) {
  std::vector<Matrix> parts = theta;
  parts[f] = Matrix::Identity(theta[f].rows(), theta[f].cols());
  const Matrix mp = m * kron_all(parts);
  std::vector<Register> regs;
  for (std::size_t g = 0; g < registers.size(); ++g) regs.push_back({std::to_string(g), registers[g].dim});
  const auto op = DensityOperator::unchecked(mp, regs);
  return hermitian_part(partial_trace(op, op.cut({std::to_string(f)})).matrix());
}

struct Gradient {
  std::vector<std::vector<double>> cond;   // d/dp(u|x)
  std::vector<std::vector<Matrix>> roots;  // d/dA
};

// Gradient of w*I(X;U) + (1-w)*I(XQ;U) + lambda * penalty.
Gradient gradient(const Problem& prob, const Point& pt, const Evaluation& ev, double w, double lambda,
                  bool objective) {
  const std::size_t nu = pt.roots.size();
  const double q = objective ? 1.0 - w : 0.0;
  Gradient g;
  g.cond.assign(prob.nx, std::vector<double>(nu, 0.0));

  std::vector<Matrix> log_cond(prob.nx);  // log2 of omega-tilde^x
  if (q > 0.0) {
    for (std::size_t x = 0; x < prob.nx; ++x) {
      if (prob.px[x] <= 0.0) continue;
      Matrix m = Matrix::Zero(static_cast<Eigen::Index>(prob.dim), static_cast<Eigen::Index>(prob.dim));
      for (std::size_t u = 0; u < nu; ++u) m += pt.cond[x][u] * ev.product[u];
      log_cond[x] = hermitian_log2(hermitian_part(m));
    }
  }
  std::vector<double> factor_entropy(nu, 0.0);
  std::vector<std::vector<Matrix>> log_theta(nu);
  if (q > 0.0) {
    for (std::size_t u = 0; u < nu; ++u) {
      for (const auto& t : ev.theta[u]) {
        factor_entropy[u] += spectrum_entropy(hermitian_eigenvalues(t));
        log_theta[u].push_back(hermitian_log2(t));
      }
    }
  }

  for (std::size_t x = 0; x < prob.nx; ++x) {
    if (prob.px[x] <= 0.0) continue;
    for (std::size_t u = 0; u < nu; ++u) {
      double d = 0.0;
      if (objective && prob.nx > 1) {
        const double ratio = (pt.cond[x][u] + 1e-300) / (ev.pu[u] + 1e-300);
        d += std::log2(ratio);
      }
      if (q > 0.0) {
        d += q * (-(ev.product[u] * log_cond[x]).trace().real() - factor_entropy[u]);
      }
      d += 2.0 * lambda * (ev.residual[x] * ev.product[u]).trace().real();
      d = std::clamp(d, -kGradientClip, kGradientClip);
      g.cond[x][u] = prob.px[x] * d;
    }
  }

  g.roots.resize(nu);
  for (std::size_t u = 0; u < nu; ++u) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(prob.dim), static_cast<Eigen::Index>(prob.dim));
    for (std::size_t x = 0; x < prob.nx; ++x) {
      const double pxu = prob.px[x] * pt.cond[x][u];
      if (pxu <= 0.0) continue;
      if (q > 0.0) m -= (pxu * q) * log_cond[x];
      m += (2.0 * lambda * pxu) * ev.residual[x];
    }
    for (std::size_t f = 0; f < prob.factors; ++f) {
      Matrix gf = factor_gradient(m, ev.theta[u], f, prob.registers);
      if (q > 0.0) gf += (q * ev.pu[u]) * log_theta[u][f];
      const Matrix& a = pt.roots[u][f];
      const double t = (a * a.adjoint()).trace().real();
      const cplx shift = (gf * ev.theta[u][f]).trace();
      Matrix centered = gf - shift * Matrix::Identity(gf.rows(), gf.cols());
      g.roots[u].push_back((2.0 / t) * centered * a);
    }
  }
  return g;
}

void eg_step(Point& pt, const Gradient& g, double eta) {
  double sq = 0.0;
  std::size_t count = 0;
  for (std::size_t x = 0; x < pt.cond.size(); ++x) {
    const auto& row = g.cond[x];
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= static_cast<double>(row.size());
    for (double v : row) {
      sq += (v - mean) * (v - mean);
      ++count;
    }
  }
  const double rms = std::sqrt(sq / static_cast<double>(std::max<std::size_t>(count, 1)));
  if (!(rms > 0.0)) return;
  for (std::size_t x = 0; x < pt.cond.size(); ++x) {
    auto& row = pt.cond[x];
    double total = 0.0;
    for (std::size_t u = 0; u < row.size(); ++u) {
      row[u] *= std::exp(-eta * g.cond[x][u] / rms);
      total += row[u];
    }
    for (auto& v : row) v /= total;
  }
}

struct Adam {
  std::vector<std::vector<Matrix>> m;
  std::vector<std::vector<Eigen::MatrixXd>> v_re;
  std::vector<std::vector<Eigen::MatrixXd>> v_im;
  std::size_t step = 0;

  explicit Adam(const Point& pt) {
    for (const auto& row : pt.roots) {
      std::vector<Matrix> mr;
      std::vector<Eigen::MatrixXd> vr;
      for (const auto& a : row) {
        mr.push_back(Matrix::Zero(a.rows(), a.cols()));
        vr.push_back(Eigen::MatrixXd::Zero(a.rows(), a.cols()));
      }
      m.push_back(mr);
      v_re.push_back(vr);
      v_im.push_back(vr);
    }
  }

  void apply(Point& pt, const Gradient& g, double lr) {
    constexpr double b1 = 0.9;
    constexpr double b2 = 0.999;
    constexpr double eps = 1e-12;
    ++step;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(step));
    for (std::size_t u = 0; u < pt.roots.size(); ++u) {
      for (std::size_t f = 0; f < pt.roots[u].size(); ++f) {
        const Matrix& gr = g.roots[u][f];
        m[u][f] = b1 * m[u][f] + (1.0 - b1) * gr;
        v_re[u][f] = b2 * v_re[u][f] + (1.0 - b2) * gr.real().cwiseAbs2();
        v_im[u][f] = b2 * v_im[u][f] + (1.0 - b2) * gr.imag().cwiseAbs2();
        const Eigen::MatrixXd mr = m[u][f].real() / c1;
        const Eigen::MatrixXd mi = m[u][f].imag() / c1;
        const Eigen::MatrixXd dr = mr.array() / ((v_re[u][f].array() / c2).sqrt() + eps);
        const Eigen::MatrixXd di = mi.array() / ((v_im[u][f].array() / c2).sqrt() + eps);
        Matrix delta(dr.rows(), dr.cols());
        delta.real() = dr;
        delta.imag() = di;
        Matrix& a = pt.roots[u][f];
        a -= lr * delta;
        a /= std::sqrt((a * a.adjoint()).trace().real());
      }
    }
  }
};

Point random_point(const Problem& prob, std::size_t nu, std::uint64_t seed) {
  Stream rng(seed);
  Point pt;
  pt.cond.assign(prob.nx, std::vector<double>(nu, 0.0));
  for (auto& row : pt.cond) {
    double total = 0.0;
    for (auto& v : row) {
      v = std::exp(rng.normal());
      total += v;
    }
    for (auto& v : row) v /= total;
  }
  pt.roots.resize(nu);
  for (std::size_t u = 0; u < nu; ++u) {
    for (const auto& r : prob.registers) {
      const auto d = static_cast<Eigen::Index>(r.dim);
      Matrix a(d, d);
      for (Eigen::Index c = 0; c < d; ++c) {
        for (Eigen::Index k = 0; k < d; ++k) {
          const double re = rng.normal();
          const double im = prob.classical ? 0.0 : rng.normal();
          a(k, c) = cplx(re, im);
        }
      }
      pt.roots[u].push_back(a);
    }
  }
  return pt;
}

Extension to_extension(const Problem& prob, const Point& pt) {
  Extension ext;
  ext.topology = prob.topology;
  for (std::size_t x = 0; x < prob.nx; ++x) {
    std::vector<double> row(pt.cond[x].size());
    for (std::size_t u = 0; u < row.size(); ++u) row[u] = prob.px[x] * pt.cond[x][u];
    ext.joint.push_back(std::move(row));
  }
  for (const auto& roots : pt.roots) {
    std::vector<DensityOperator> fs;
    for (std::size_t f = 0; f < roots.size(); ++f) {
      fs.push_back(DensityOperator::unchecked(theta_of(roots[f]), {prob.registers[f]}));
    }
    ext.factors.push_back(std::move(fs));
  }
  return ext;
}

// Classical targets: dephase the factors, then fit the latent-class model
// sum_u p(u|x) prod_f q_{u,f}(y_f) = omega^x(y) by EM.
Extension polish_classical(const Problem& prob, const Point& pt, std::size_t max_iter, double target_residual) {
  const std::size_t nu = pt.roots.size();
  std::vector<std::vector<double>> cond = pt.cond;
  std::vector<std::vector<RealVector>> q(nu);
  for (std::size_t u = 0; u < nu; ++u) {
    for (const auto& a : pt.roots[u]) q[u].push_back(theta_of(a).diagonal().real());
  }
  std::vector<RealVector> target(prob.nx);
  for (std::size_t x = 0; x < prob.nx; ++x) target[x] = prob.omega[x].diagonal().real();

  // Mixed-radix digits of each joint outcome y.
  std::vector<std::vector<std::size_t>> digits(prob.dim, std::vector<std::size_t>(prob.factors));
  for (std::size_t y = 0; y < prob.dim; ++y) {
    std::size_t rest = y;
    for (std::size_t f = prob.factors; f-- > 0;) {
      digits[y][f] = rest % prob.registers[f].dim;
      rest /= prob.registers[f].dim;
    }
  }
  auto model = [&](std::size_t u, std::size_t y) {
    double v = 1.0;
    for (std::size_t f = 0; f < prob.factors; ++f) v *= q[u][f][static_cast<Eigen::Index>(digits[y][f])];
    return v;
  };
  auto residual = [&] {
    double r = 0.0;
    for (std::size_t x = 0; x < prob.nx; ++x) {
      for (std::size_t y = 0; y < prob.dim; ++y) {
        double m = 0.0;
        for (std::size_t u = 0; u < nu; ++u) m += cond[x][u] * model(u, y);
        r += prob.px[x] * std::abs(m - target[x][static_cast<Eigen::Index>(y)]);
      }
    }
    return r;
  };

  std::vector<double> post(nu);
  for (std::size_t it = 0; it < max_iter; ++it) {
    if (it % 25 == 0 && residual() <= target_residual) break;
    std::vector<std::vector<double>> new_cond(prob.nx, std::vector<double>(nu, 0.0));
    std::vector<std::vector<RealVector>> acc(nu);
    for (std::size_t u = 0; u < nu; ++u) {
      for (std::size_t f = 0; f < prob.factors; ++f) acc[u].push_back(RealVector::Zero(q[u][f].size()));
    }
    for (std::size_t x = 0; x < prob.nx; ++x) {
      if (prob.px[x] <= 0.0) {
        new_cond[x] = cond[x];
        continue;
      }
      for (std::size_t y = 0; y < prob.dim; ++y) {
        const double w = target[x][static_cast<Eigen::Index>(y)];
        if (w <= 0.0) continue;
        double total = 0.0;
        for (std::size_t u = 0; u < nu; ++u) {
          post[u] = cond[x][u] * model(u, y);
          total += post[u];
        }
        if (!(total > 0.0)) continue;
        for (std::size_t u = 0; u < nu; ++u) {
          const double r = w * post[u] / total;
          new_cond[x][u] += r;
          for (std::size_t f = 0; f < prob.factors; ++f) acc[u][f][static_cast<Eigen::Index>(digits[y][f])] += prob.px[x] * r;
        }
      }
      double rs = 0.0;
      for (double v : new_cond[x]) rs += v;
      if (rs > 0.0) {
        for (auto& v : new_cond[x]) v /= rs;
      } else {
        new_cond[x] = cond[x];
      }
    }
    cond = std::move(new_cond);
    for (std::size_t u = 0; u < nu; ++u) {
      for (std::size_t f = 0; f < prob.factors; ++f) {
        const double s = acc[u][f].sum();
        if (s > 0.0) q[u][f] = acc[u][f] / s;
      }
    }
  }

  Extension ext;
  ext.topology = prob.topology;
  for (std::size_t x = 0; x < prob.nx; ++x) {
    std::vector<double> row(nu);
    for (std::size_t u = 0; u < nu; ++u) row[u] = prob.px[x] * cond[x][u];
    ext.joint.push_back(std::move(row));
  }
  for (std::size_t u = 0; u < nu; ++u) {
    std::vector<DensityOperator> fs;
    for (std::size_t f = 0; f < prob.factors; ++f) {
      Matrix m = Matrix::Zero(q[u][f].size(), q[u][f].size());
      m.diagonal() = q[u][f].cast<cplx>();
      fs.push_back(DensityOperator::unchecked(std::move(m), {prob.registers[f]}));
    }
    ext.factors.push_back(std::move(fs));
  }
  return ext;
}

// Quantum targets: gradient descent with backtracking on the penalty alone.
Point polish_quantum(const Problem& prob, Point pt, std::size_t max_iter, double target_penalty) {
  double step = 0.1;
  Evaluation ev = evaluate(prob, pt);
  for (std::size_t it = 0; it < max_iter && ev.penalty > target_penalty; ++it) {
    const Gradient g = gradient(prob, pt, ev, 0.0, 1.0, false);
    bool improved = false;
    for (int tries = 0; tries < 30; ++tries) {
      Point trial = pt;
      for (std::size_t x = 0; x < prob.nx; ++x) {
        double total = 0.0;
        for (std::size_t u = 0; u < trial.cond[x].size(); ++u) {
          trial.cond[x][u] *= std::exp(-step * g.cond[x][u]);
          total += trial.cond[x][u];
        }
        for (auto& v : trial.cond[x]) v /= total;
      }
      for (std::size_t u = 0; u < trial.roots.size(); ++u) {
        for (std::size_t f = 0; f < trial.roots[u].size(); ++f) trial.roots[u][f] -= step * g.roots[u][f];
      }
      Evaluation te = evaluate(prob, trial);
      if (te.penalty < ev.penalty) {
        pt = std::move(trial);
        ev = std::move(te);
        step *= 1.5;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return pt;
}

struct RestartResult {
  bool ok = false;
  Candidate candidate;
  double residual = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
};

double objective_of(const InfoPair& info, double w) { return w * info.x_u + (1.0 - w) * info.all_u; }

RestartResult run_restart(const Problem& prob, const CqNetworkState& target, const SearchSpec& spec, std::size_t nu,
                          std::uint64_t seed) {
  RestartResult out;
  Point pt = random_point(prob, nu, seed);
  Adam adam(pt);
  for (double lambda : kPenaltyStages) {
    for (std::size_t it = 0; it < spec.iterations; ++it) {
      const double decay = 1.0 / std::sqrt(1.0 + 0.05 * static_cast<double>(it));
      const Evaluation ev = evaluate(prob, pt);
      const Gradient g = gradient(prob, pt, ev, spec.weight_x_u, lambda, true);
      eg_step(pt, g, 0.2 * decay);
      adam.apply(pt, g, 0.05 * decay);
      ++out.iterations;
    }
  }
  Extension ext;
  if (prob.classical) {
    ext = polish_classical(prob, pt, 20 * spec.iterations + 1000, 1e-13);
  } else {
    pt = polish_quantum(prob, pt, 10 * spec.iterations + 500, 1e-18);
    ext = to_extension(prob, pt);
  }
  ext = compact(ext);
  out.residual = feasibility_residual(ext, target);
  if (out.residual <= spec.tol.feasibility) {
    out.ok = true;
    out.candidate.info = info_structured(ext);
    out.candidate.objective = objective_of(out.candidate.info, spec.weight_x_u);
    out.candidate.residual = out.residual;
    out.candidate.ext = std::move(ext);
  }
  return out;
}

}  // namespace

Extension compact(const Extension& ext) {
  const auto pu = ext.u_marginal();
  Extension out;
  out.topology = ext.topology;
  out.joint.assign(ext.x_size(), {});
  for (std::size_t u = 0; u < ext.u_size(); ++u) {
    if (pu[u] <= 0.0) continue;
    for (std::size_t x = 0; x < ext.x_size(); ++x) out.joint[x].push_back(ext.joint[x][u]);
    out.factors.push_back(ext.factors[u]);
  }
  if (out.factors.empty()) return ext;
  return out;
}

SearchOutcome search_extensions(const CqNetworkState& target, const SearchSpec& spec) {
  const Problem prob = make_problem(target);
  SearchOutcome out;
  out.best_residual = std::numeric_limits<double>::infinity();

  auto consider = [&](Extension ext, std::string origin) {
    ++out.candidates;
    ext = compact(ext);
    const double residual = feasibility_residual(ext, target);
    out.best_residual = std::min(out.best_residual, residual);
    if (!(residual <= spec.tol.feasibility)) return;
    Candidate c;
    c.info = info_structured(ext);
    c.objective = objective_of(c.info, spec.weight_x_u);
    c.residual = residual;
    c.ext = std::move(ext);
    c.origin = std::move(origin);
    out.feasible.push_back(std::move(c));
  };

  consider(product_extension(target), "product");
  if (target.topology != Topology::NoComm) consider(identity_extension(target), "identity");
  if (prob.classical) consider(basis_extension(target), "basis");

  const std::size_t max_u =
      spec.max_u > 0 ? spec.max_u : cardinality_bound(target.topology, target.x_size(), prob.registers);
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t nu = 1; nu <= max_u; ++nu) {
    for (std::size_t r = 0; r < spec.restarts; ++r) jobs.emplace_back(nu, r);
  }
  std::vector<RestartResult> results(jobs.size());
  parallel_for(jobs.size(), spec.threads, [&](std::size_t k) {
    const auto [nu, r] = jobs[k];
    results[k] = run_restart(prob, target, spec, nu, derive_seed(spec.seed, {nu, r}));
  });
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    ++out.candidates;
    out.iterations += results[k].iterations;
    out.best_residual = std::min(out.best_residual, results[k].residual);
    if (results[k].ok) {
      results[k].candidate.origin = "restart u=" + std::to_string(jobs[k].first) + " r=" + std::to_string(jobs[k].second);
      out.feasible.push_back(std::move(results[k].candidate));
    }
  }
  return out;
}

const Candidate* best_candidate(const SearchOutcome& outcome) {
  const Candidate* best = nullptr;
  for (const auto& c : outcome.feasible) {
    if (best == nullptr || c.objective < best->objective - 1e-9) best = &c;
  }
  return best;
}

}  // namespace coordsim::detail
