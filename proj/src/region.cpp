#include "coordsim/region.hpp"

#include <algorithm>
#include <cmath>

#include "coordsim/error.hpp"
#include "coordsim/random.hpp"
#include "internal/region_optimizer.hpp"

namespace coordsim {

std::string_view to_string(FeasibilityStatus status) {
  switch (status) {
    case FeasibilityStatus::Feasible: return "FEASIBLE";
    case FeasibilityStatus::InfeasibleEntangled: return "INFEASIBLE_ENTANGLED";
    case FeasibilityStatus::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::string_view to_string(RegionVariant variant) {
  return variant == RegionVariant::Proof ? "proof" : "printed";
}

RegionVariant region_variant_from_string(std::string_view name) {
  if (name == "proof") return RegionVariant::Proof;
  if (name == "printed") return RegionVariant::Printed;
  throw Error(ErrorCode::InvalidArgument, "region variant must be 'proof' or 'printed'");
}

namespace {

detail::SearchSpec spec_from(const RegionOptions& opts, double weight, std::uint64_t salt) {
  detail::SearchSpec spec;
  spec.weight_x_u = weight;
  spec.max_u = opts.max_u;
  spec.restarts = opts.restarts;
  spec.iterations = opts.iterations;
  spec.seed = derive_seed(opts.seed, {salt});
  spec.threads = opts.threads;
  spec.tol = opts.tol;
  return spec;
}

void add_diagnostics(OptimizerDiagnostics& d, const detail::SearchOutcome& o, std::size_t restarts) {
  const bool first = d.candidates == 0;
  d.restarts += restarts;
  d.candidates += o.candidates;
  d.feasible += o.feasible.size();
  d.iterations += o.iterations;
  d.best_residual = first ? o.best_residual : std::min(d.best_residual, o.best_residual);
}

std::size_t restart_count(const CqNetworkState& target, const RegionOptions& opts) {
  const std::size_t max_u =
      opts.max_u > 0 ? opts.max_u : cardinality_bound(target.topology, target.x_size(), target.quantum_registers());
  return max_u * opts.restarts;
}

RegionResult minimize(const CqNetworkState& target, const RegionOptions& opts, double weight) {
  RegionResult result;
  result.topology = target.topology;
  const auto outcome = detail::search_extensions(target, spec_from(opts, weight, weight == 1.0 ? 1 : 2));
  add_diagnostics(result.diagnostics, outcome, restart_count(target, opts));
  const auto* best = detail::best_candidate(outcome);
  if (best == nullptr) {
    result.status = FeasibilityStatus::Unknown;
    return result;
  }
  result.status = FeasibilityStatus::Feasible;
  result.value = best->objective;
  result.argmin = best->ext;
  result.info_at_argmin = best->info;
  if (target.topology != Topology::NoComm) result.sufficient_cr_rate = std::max(0.0, best->info.all_u - best->info.x_u);
  return result;
}

void require(const CqNetworkState& target, Topology topology) {
  if (target.topology != topology) {
    throw Error(ErrorCode::TopologyMismatch, "expected a " + std::string(to_string(topology)) + " target");
  }
}

bool any_failure(const std::vector<PptCertificate>& certs) {
  return std::any_of(certs.begin(), certs.end(), [](const PptCertificate& c) { return !c.pass; });
}

RegionBoundary trace_region(const CqNetworkState& target, const std::vector<double>& r0_grid,
                            const RegionOptions& opts, RegionVariant variant) {
  RegionBoundary out;
  out.topology = target.topology;
  out.variant = variant;
  std::vector<BoundaryPoint> points;
  for (std::size_t k = 0; k < opts.boundary_weights.size(); ++k) {
    const auto outcome = detail::search_extensions(target, spec_from(opts, opts.boundary_weights[k], 10 + k));
    add_diagnostics(out.diagnostics, outcome, restart_count(target, opts));
    for (const auto& c : outcome.feasible) points.push_back({c.info.x_u, c.info.all_u});
  }
  if (points.empty()) {
    out.status = FeasibilityStatus::Unknown;
    for (double r0 : r0_grid) out.rows.push_back({r0, std::nullopt});
    return out;
  }
  out.status = FeasibilityStatus::Feasible;
  out.hull = lower_hull(std::move(points));
  for (double r0 : r0_grid) {
    if (r0 < 0.0) throw ValidationError("R0", "nonnegative");
    out.rows.push_back({r0, boundary_r1(out.hull, r0, variant)});
  }
  return out;
}

}  // namespace

RegionResult min_comm_rate(const CqNetworkState& target, const RegionOptions& opts) {
  require(target, Topology::TwoNode);
  return minimize(target, opts, 1.0);
}

RegionResult min_no_cr_rate(const CqNetworkState& target, const RegionOptions& opts) {
  require(target, Topology::TwoNode);
  return minimize(target, opts, 0.0);
}

std::vector<PptCertificate> ppt_screen(const CqNetworkState& target, const Tolerances& tol) {
  std::vector<PptCertificate> out;
  const auto& regs = target.quantum_registers();
  auto check = [&](const DensityOperator& rho, std::size_t single, const std::string& prefix) {
    const auto cut = rho.cut({regs[single].name});
    const auto res = ppt_check(rho, cut, tol);
    std::string label = prefix + regs[single].name + ":";
    for (const auto& name : cut.second) label += name;
    out.push_back({label, res.pass, res.min_eigenvalue});
  };
  if (target.topology == Topology::NoComm) {
    for (std::size_t k = 0; k < regs.size(); ++k) check(target.conditionals.front(), k, "");
  } else if (target.topology == Topology::Broadcast) {
    Matrix avg = Matrix::Zero(static_cast<Eigen::Index>(target.quantum_dim()), static_cast<Eigen::Index>(target.quantum_dim()));
    for (std::size_t x = 0; x < target.x_size(); ++x) {
      check(target.conditionals[x], 0, "x=" + std::to_string(x) + " ");
      avg += target.pmf[x] * target.conditionals[x].matrix();
    }
    check(DensityOperator::unchecked(hermitian_part(avg), regs), 0, "average ");
  }
  return out;
}

RegionResult nc_capacity(const CqNetworkState& target, const RegionOptions& opts) {
  require(target, Topology::NoComm);
  auto certs = ppt_screen(target, opts.tol);
  if (any_failure(certs)) {
    RegionResult result;
    result.topology = Topology::NoComm;
    result.status = FeasibilityStatus::InfeasibleEntangled;
    result.ppt = std::move(certs);
    return result;
  }
  RegionResult result = minimize(target, opts, 0.0);
  result.ppt = std::move(certs);
  return result;
}

RegionResult best_extension(const CqNetworkState& target, const RegionOptions& opts) {
  if (target.topology == Topology::NoComm) return nc_capacity(target, opts);
  auto certs = ppt_screen(target, opts.tol);
  if (any_failure(certs)) {
    RegionResult result;
    result.topology = target.topology;
    result.status = FeasibilityStatus::InfeasibleEntangled;
    result.ppt = std::move(certs);
    return result;
  }
  RegionResult result = minimize(target, opts, 0.0);
  result.ppt = std::move(certs);
  return result;
}

RegionBoundary trace_two_node_region(const CqNetworkState& target, const std::vector<double>& r0_grid,
                                     const RegionOptions& opts, RegionVariant variant) {
  require(target, Topology::TwoNode);
  return trace_region(target, r0_grid, opts, variant);
}

RegionBoundary broadcast_region(const CqNetworkState& target, const std::vector<double>& r0_grid,
                                const RegionOptions& opts, RegionVariant variant) {
  require(target, Topology::Broadcast);
  auto certs = ppt_screen(target, opts.tol);
  if (any_failure(certs)) {
    RegionBoundary out;
    out.topology = Topology::Broadcast;
    out.variant = variant;
    out.status = FeasibilityStatus::InfeasibleEntangled;
    for (double r0 : r0_grid) out.rows.push_back({r0, std::nullopt});
    out.ppt = std::move(certs);
    return out;
  }
  RegionBoundary out = trace_region(target, r0_grid, opts, variant);
  out.ppt = std::move(certs);
  return out;
}

std::vector<BoundaryPoint> lower_hull(std::vector<BoundaryPoint> points) {
  std::sort(points.begin(), points.end(), [](const BoundaryPoint& l, const BoundaryPoint& r) {
    return l.x_u < r.x_u || (l.x_u == r.x_u && l.all_u < r.all_u);
  });
  // Pareto front: strictly decreasing all_u as x_u grows.
  std::vector<BoundaryPoint> front;
  for (const auto& p : points) {
    if (front.empty() || p.all_u < front.back().all_u - 1e-12) {
      if (!front.empty() && std::abs(p.x_u - front.back().x_u) <= 1e-12) {
        front.back() = p;
      } else {
        front.push_back(p);
      }
    }
  }
  // Convex chain (monotone chain, lower side).
  std::vector<BoundaryPoint> hull;
  for (const auto& p : front) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      const double cross = (b.x_u - a.x_u) * (p.all_u - a.all_u) - (b.all_u - a.all_u) * (p.x_u - a.x_u);
      if (cross <= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(p);
  }
  return hull;
}

std::optional<double> boundary_r1(const std::vector<BoundaryPoint>& hull, double r0, RegionVariant variant) {
  if (hull.empty()) return std::nullopt;
  std::optional<double> best;
  auto offer = [&](double v) {
    if (!best || v < *best) best = v;
  };
  if (variant == RegionVariant::Proof) {
    // min over the hull of max(a, b - r0)
    for (const auto& p : hull) offer(std::max(p.x_u, p.all_u - r0));
    for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
      const auto& p = hull[k];
      const auto& q = hull[k + 1];
      // a(t) = p.a + t da, c(t) = p.b - r0 + t db; equal where t = (c0 - a0) / (da - db)
      const double da = q.x_u - p.x_u;
      const double db = q.all_u - p.all_u;
      const double gap0 = (p.all_u - r0) - p.x_u;
      if (da - db != 0.0) {
        const double t = gap0 / (da - db);
        if (t > 0.0 && t < 1.0) offer(std::max(p.x_u + t * da, p.all_u - r0 + t * db));
      }
    }
    return std::max(0.0, *best);
  }
  // Printed reading: the X-side rate is covered by R0.
  for (const auto& p : hull) {
    if (p.x_u <= r0) offer(std::max(0.0, p.all_u - r0));
  }
  for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
    const auto& p = hull[k];
    const auto& q = hull[k + 1];
    if (p.x_u <= r0 && q.x_u > r0) {
      const double t = (r0 - p.x_u) / (q.x_u - p.x_u);
      offer(std::max(0.0, p.all_u + t * (q.all_u - p.all_u) - r0));
    }
  }
  return best;
}

}  // namespace coordsim
