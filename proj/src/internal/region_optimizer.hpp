#pragma once

// Search over extensions of a target for small values of
//   w * I(X;U) + (1 - w) * I(XQ;U)
// subject to the marginal constraint. Structured candidates come first, then
// random restarts for every |U| up to max_u. Only candidates whose residual is
// within the feasibility tolerance are returned.

#include <cstdint>
#include <string>
#include <vector>

#include "coordsim/cq_model.hpp"
#include "coordsim/tolerances.hpp"

namespace coordsim::detail {

struct SearchSpec {
  double weight_x_u = 0.0;  // w
  std::size_t max_u = 0;
  std::size_t restarts = 32;
  std::size_t iterations = 200;  // per penalty stage
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  Tolerances tol{};
};

struct Candidate {
  Extension ext;
  InfoPair info;
  double residual = 0.0;
  double objective = 0.0;
  std::string origin;
};

struct SearchOutcome {
  std::vector<Candidate> feasible;  // in candidate order
  std::size_t candidates = 0;
  std::size_t iterations = 0;
  double best_residual = 0.0;
};

SearchOutcome search_extensions(const CqNetworkState& target, const SearchSpec& spec);

/// Lowest objective; ties within 1e-9 go to the earliest candidate.
const Candidate* best_candidate(const SearchOutcome& outcome);

/// Drops values of U with zero probability.
Extension compact(const Extension& ext);

}  // namespace coordsim::detail
