#pragma once

// Numerical characterization of the coordination capacity regions. Every value
// is the best found over feasible extensions (residual within the feasibility
// tolerance); global optimality is not claimed.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coordsim/cq_model.hpp"
#include "coordsim/tolerances.hpp"

namespace coordsim {

enum class FeasibilityStatus { Feasible, InfeasibleEntangled, Unknown };
std::string_view to_string(FeasibilityStatus status);

/// Which reading of the two-node and broadcast regions to trace.
///   Proof:   R1 >= I(X;U), R0 + R1 >= I(XQ;U)   (default)
///   Printed: R0 >= I(X;U), R0 + R1 >= I(XQ;U)
enum class RegionVariant { Proof, Printed };
std::string_view to_string(RegionVariant variant);
RegionVariant region_variant_from_string(std::string_view name);

struct PptCertificate {
  std::string cut;  // e.g. "A:BC" or "x=1 B1:B2"
  bool pass = true;
  double min_eigenvalue = 0.0;
};

struct RegionOptions {
  std::size_t restarts = 32;
  std::size_t max_u = 0;  // 0: cardinality bound of the topology
  std::size_t iterations = 200;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  Tolerances tol{};
  /// Scalarization weights w in w I(X;U) + (1-w) I(XQ;U) used to sample the
  /// boundary.
  std::vector<double> boundary_weights{1.0, 0.5, 0.0};
};

struct OptimizerDiagnostics {
  std::size_t restarts = 0;
  std::size_t candidates = 0;
  std::size_t feasible = 0;
  std::size_t iterations = 0;
  double best_residual = 0.0;
};

struct RegionResult {
  Topology topology = Topology::TwoNode;
  FeasibilityStatus status = FeasibilityStatus::Unknown;
  /// Best objective found; empty when the status is not Feasible (an
  /// infeasible target has capacity +infinity).
  std::optional<double> value;
  std::optional<Extension> argmin;
  InfoPair info_at_argmin;
  /// I(U;B|X) at the argmin: a sufficient common-randomness rate.
  std::optional<double> sufficient_cr_rate;
  std::vector<PptCertificate> ppt;
  OptimizerDiagnostics diagnostics;
};

/// min I(X;U): communication rate with unlimited common randomness.
RegionResult min_comm_rate(const CqNetworkState& target, const RegionOptions& opts = {});
/// min I(XB;U): communication rate without common randomness.
RegionResult min_no_cr_rate(const CqNetworkState& target, const RegionOptions& opts = {});
/// min I(U;ABC) after PPT screening of A:BC, B:AC and C:AB.
RegionResult nc_capacity(const CqNetworkState& target, const RegionOptions& opts = {});
/// min I(XQ;U) for any topology, with the PPT screen of that topology. Used to
/// pick an extension when none is given.
RegionResult best_extension(const CqNetworkState& target, const RegionOptions& opts = {});

struct BoundaryRow {
  double r0 = 0.0;
  std::optional<double> r1;  // empty: no finite R1 at this R0
};

struct BoundaryPoint {
  double x_u = 0.0;
  double all_u = 0.0;
};

struct RegionBoundary {
  Topology topology = Topology::TwoNode;
  RegionVariant variant = RegionVariant::Proof;
  FeasibilityStatus status = FeasibilityStatus::Unknown;
  std::vector<BoundaryRow> rows;
  /// Lower convex hull of the feasible (I(X;U), I(XQ;U)) pairs found.
  std::vector<BoundaryPoint> hull;
  std::vector<PptCertificate> ppt;
  OptimizerDiagnostics diagnostics;
};

RegionBoundary trace_two_node_region(const CqNetworkState& target, const std::vector<double>& r0_grid,
                                     const RegionOptions& opts = {}, RegionVariant variant = RegionVariant::Proof);
RegionBoundary broadcast_region(const CqNetworkState& target, const std::vector<double>& r0_grid,
                                const RegionOptions& opts = {}, RegionVariant variant = RegionVariant::Proof);

/// Boundary of the region spanned by (I(X;U), I(XQ;U)) points, with time
/// sharing along the lower convex hull.
std::vector<BoundaryPoint> lower_hull(std::vector<BoundaryPoint> points);
std::optional<double> boundary_r1(const std::vector<BoundaryPoint>& hull, double r0, RegionVariant variant);

/// PPT certificates for the no-communication bipartitions, or for B1:B2 of
/// each broadcast conditional and of their average.
std::vector<PptCertificate> ppt_screen(const CqNetworkState& target, const Tolerances& tol = {});

// Exhaustive grid oracle for fully classical targets.

enum class OracleObjective {
  FirstInput,  // I(X;U) (NoComm: I(A;U))
  AllInputs,   // I(X Y...;U)
  Region,      // max(I(X;U), I(all;U) - r0)
};

struct ClassicalTarget {
  Topology topology = Topology::TwoNode;
  /// Joint PMF over the variables, first most significant: (X, Y) for
  /// two-node, (X, Y1, Y2) for broadcast, (A, B, C) for no-comm.
  std::vector<std::size_t> sizes;
  std::vector<double> pmf;
};

/// Reads the computational-basis distribution of a diagonal target.
ClassicalTarget to_classical(const CqNetworkState& target);

struct OracleOptions {
  std::size_t max_u = 4;
  double grid_step = 1.0 / 64.0;
  OracleObjective objective = OracleObjective::AllInputs;
  double r0 = 0.0;
  std::size_t budget = 50'000'000;  // search nodes
};

struct OracleResult {
  double value = 0.0;
  std::size_t u_size = 0;
  std::size_t evaluated = 0;
};

/// Scans grid-valued conditionals W(u | input) for every input with positive
/// probability. A candidate counts only when, given u, the variables are
/// exactly independent (products across all of them) so that it is an
/// extension of the target. Throws BudgetExceeded carrying the best value when
/// the budget runs out.
OracleResult brute_force_oracle(const ClassicalTarget& target, const OracleOptions& opts = {});

}  // namespace coordsim
