#pragma once

// JSON forms of matrices, states, ensembles and extensions. Matrices are
// row-major nested arrays of [re, im] pairs; a bare number is accepted as a
// real entry.

#include <string>
#include <vector>

#include <json.hpp>

#include "coordsim/cq_model.hpp"
#include "coordsim/softcover.hpp"
#include "coordsim/tolerances.hpp"

namespace coordsim::cli {

using Json = nlohmann::ordered_json;

Matrix matrix_from_json(const Json& j, const std::string& field);
Json matrix_to_json(const Matrix& m);

/// Default register names for a topology: B; A, B, C; B1, B2.
std::vector<std::string> default_register_names(Topology topology);

/// {"topology", "pmf", "registers", "conditionals"} or, for no-comm,
/// {"topology", "registers", "state"}.
CqNetworkState state_from_json(const Json& j, const Tolerances& tol);
Json state_to_json(const CqNetworkState& state);

/// {"pmf", "states", "register"}
CEnsemble ensemble_from_json(const Json& j, const Tolerances& tol);
Json ensemble_to_json(const CEnsemble& ens);

/// {"joint": [[p(x,u)]], "factors": [[theta_f^u]]}; registers come from the
/// target.
Extension extension_from_json(const Json& j, const CqNetworkState& target, const Tolerances& tol);
Json extension_to_json(const Extension& ext);

}  // namespace coordsim::cli
