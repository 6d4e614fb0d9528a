#include "coordsim/cli/json_io.hpp"

#include <cmath>

#include "coordsim/error.hpp"

namespace coordsim::cli {

namespace {

double number(const Json& j, const std::string& field) {
  if (!j.is_number()) throw ValidationError(field, "expected a number");
  return j.get<double>();
}

std::vector<double> numbers(const Json& j, const std::string& field) {
  if (!j.is_array()) throw ValidationError(field, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, field));
  return out;
}

const Json& member(const Json& j, const char* key, const std::string& field) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(field + "." + key, "required");
  return j.at(key);
}

void only_keys(const Json& j, std::initializer_list<const char*> keys, const std::string& field) {
  if (!j.is_object()) throw ValidationError(field, "expected an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* allowed : keys) known = known || k == allowed;
    if (!known) throw ValidationError(field + "." + k, "unknown key");
  }
}

std::vector<Register> registers_from_json(const Json& j, Topology topology, const std::string& field) {
  const auto names = default_register_names(topology);
  if (!j.is_array() || j.size() != names.size()) {
    throw ValidationError(field, "expected " + std::to_string(names.size()) + " registers");
  }
  std::vector<Register> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const auto& r = j[k];
    if (r.is_number_unsigned() || r.is_number_integer()) {
      const auto dim = r.get<long long>();
      if (dim < 1) throw ValidationError(field, "register dimension must be positive");
      out.push_back({names[k], static_cast<std::size_t>(dim)});
    } else {
      only_keys(r, {"name", "dim"}, field);
      const auto& dim = member(r, "dim", field);
      if (!dim.is_number_integer() || dim.get<long long>() < 1) throw ValidationError(field, "register dimension must be positive");
      const std::string name = r.contains("name") ? r.at("name").get<std::string>() : names[k];
      out.push_back({name, static_cast<std::size_t>(dim.get<long long>())});
    }
  }
  return out;
}

// Without "registers", every register gets the same dimension: the k-th root
// of the matrix size for k registers.
std::vector<Register> inferred_registers(const Json& j, Topology topology, const std::string& field) {
  const Json* m = nullptr;
  if (topology == Topology::NoComm) {
    if (j.contains("state")) m = &j.at("state");
  } else if (j.contains("conditionals") && j.at("conditionals").is_array() && !j.at("conditionals").empty()) {
    m = &j.at("conditionals")[0];
  }
  if (m == nullptr || !m->is_array() || m->empty()) throw ValidationError(field + ".registers", "required");
  const auto names = default_register_names(topology);
  const std::size_t total = m->size();
  const auto local = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(total), 1.0 / names.size())));
  std::size_t product = 1;
  for (std::size_t k = 0; k < names.size(); ++k) product *= local;
  if (product != total) {
    throw ValidationError(field + ".registers", "required: dimension " + std::to_string(total) + " does not split evenly");
  }
  std::vector<Register> out;
  for (const auto& name : names) out.push_back({name, local});
  return out;
}

Json registers_to_json(const std::vector<Register>& regs) {
  Json out = Json::array();
  for (const auto& r : regs) out.push_back(Json{{"name", r.name}, {"dim", r.dim}});
  return out;
}

DensityOperator density_from_json(const Json& j, std::vector<Register> regs, const Tolerances& tol,
                                  const std::string& field) {
  const Matrix m = matrix_from_json(j, field);
  std::size_t dim = 1;
  for (const auto& r : regs) dim *= r.dim;
  if (static_cast<std::size_t>(m.rows()) != dim) {
    throw ValidationError(field, "matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                     ", registers need dimension " + std::to_string(dim));
  }
  return validate_density(m, std::move(regs), tol);
}

}  // namespace

Matrix matrix_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ValidationError(field, "expected a square matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Matrix m(rows, rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows) {
      throw ValidationError(field, "expected a square matrix");
    }
    for (Eigen::Index c = 0; c < rows; ++c) {
      const auto& e = row[static_cast<std::size_t>(c)];
      if (e.is_number()) {
        m(r, c) = cplx(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
      } else {
        throw ValidationError(field, "matrix entries are [re, im] pairs");
      }
    }
  }
  return m;
}

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<std::string> default_register_names(Topology topology) {
  switch (topology) {
    case Topology::TwoNode: return {"B"};
    case Topology::NoComm: return {"A", "B", "C"};
    case Topology::Broadcast: return {"B1", "B2"};
  }
  return {};
}

CqNetworkState state_from_json(const Json& j, const Tolerances& tol) {
  const std::string field = "target";
  if (!j.is_object()) throw ValidationError(field, "expected an object");
  const auto& topo = member(j, "topology", field);
  if (!topo.is_string()) throw ValidationError(field + ".topology", "expected a string");
  Topology topology;
  try {
    topology = topology_from_string(topo.get<std::string>());
  } catch (const Error&) {
    throw ValidationError(field + ".topology", "must be two-node, no-comm or broadcast");
  }
  const auto regs = j.contains("registers")
                        ? registers_from_json(j.at("registers"), topology, field + ".registers")
                        : inferred_registers(j, topology, field);
  try {
    if (topology == Topology::NoComm) {
      only_keys(j, {"topology", "registers", "state"}, field);
      auto rho = density_from_json(member(j, "state", field), regs, tol, field + ".state");
      return make_cq_state(topology, {}, {std::move(rho)}, tol);
    }
    only_keys(j, {"topology", "pmf", "registers", "conditionals"}, field);
    const auto pmf = numbers(member(j, "pmf", field), field + ".pmf");
    const auto& conds = member(j, "conditionals", field);
    if (!conds.is_array()) throw ValidationError(field + ".conditionals", "expected an array of matrices");
    std::vector<DensityOperator> conditionals;
    for (std::size_t x = 0; x < conds.size(); ++x) {
      conditionals.push_back(
          density_from_json(conds[x], regs, tol, field + ".conditionals[" + std::to_string(x) + "]"));
    }
    return make_cq_state(topology, pmf, std::move(conditionals), tol);
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(field, e.what());
  }
}

Json state_to_json(const CqNetworkState& state) {
  Json out;
  out["topology"] = std::string(to_string(state.topology));
  out["registers"] = registers_to_json(state.quantum_registers());
  if (state.topology == Topology::NoComm) {
    out["state"] = matrix_to_json(state.conditionals.front().matrix());
    return out;
  }
  out["pmf"] = state.pmf;
  Json conds = Json::array();
  for (const auto& c : state.conditionals) conds.push_back(matrix_to_json(c.matrix()));
  out["conditionals"] = std::move(conds);
  return out;
}

CEnsemble ensemble_from_json(const Json& j, const Tolerances& tol) {
  const std::string field = "ensemble";
  only_keys(j, {"pmf", "states", "register"}, field);
  const auto pmf = numbers(member(j, "pmf", field), field + ".pmf");
  const auto& states = member(j, "states", field);
  if (!states.is_array() || states.empty()) throw ValidationError(field + ".states", "expected an array of matrices");
  const std::string name = j.contains("register") ? j.at("register").get<std::string>() : "A";
  std::vector<DensityOperator> out;
  for (std::size_t x = 0; x < states.size(); ++x) {
    const std::string f = field + ".states[" + std::to_string(x) + "]";
    const Matrix m = matrix_from_json(states[x], f);
    try {
      out.push_back(validate_density(m, {{name, static_cast<std::size_t>(m.rows())}}, tol));
    } catch (const Error& e) {
      throw ValidationError(f, e.what());
    }
  }
  try {
    return make_ensemble(pmf, std::move(out), tol);
  } catch (const Error& e) {
    throw ValidationError(field, e.what());
  }
}

Json ensemble_to_json(const CEnsemble& ens) {
  Json out;
  out["pmf"] = ens.pmf;
  Json states = Json::array();
  for (const auto& s : ens.states) states.push_back(matrix_to_json(s.matrix()));
  out["states"] = std::move(states);
  out["register"] = ens.states.front().registers().front().name;
  return out;
}

Extension extension_from_json(const Json& j, const CqNetworkState& target, const Tolerances& tol) {
  const std::string field = "extension";
  only_keys(j, {"joint", "factors"}, field);
  const auto& joint_j = member(j, "joint", field);
  if (!joint_j.is_array()) throw ValidationError(field + ".joint", "expected rows p(x, u)");
  std::vector<std::vector<double>> joint;
  for (const auto& row : joint_j) joint.push_back(numbers(row, field + ".joint"));
  const auto& factors_j = member(j, "factors", field);
  if (!factors_j.is_array()) throw ValidationError(field + ".factors", "expected factors per u");
  const auto& regs = target.quantum_registers();
  std::vector<std::vector<DensityOperator>> factors;
  for (std::size_t u = 0; u < factors_j.size(); ++u) {
    const auto& fu = factors_j[u];
    if (!fu.is_array() || fu.size() != regs.size()) {
      throw ValidationError(field + ".factors", "expected " + std::to_string(regs.size()) + " factors per u");
    }
    std::vector<DensityOperator> row;
    for (std::size_t f = 0; f < regs.size(); ++f) {
      const std::string name = field + ".factors[" + std::to_string(u) + "][" + std::to_string(f) + "]";
      try {
        row.push_back(density_from_json(fu[f], {regs[f]}, tol, name));
      } catch (const ValidationError&) {
        throw;
      } catch (const Error& e) {
        throw ValidationError(name, e.what());
      }
    }
    factors.push_back(std::move(row));
  }
  try {
    return make_extension(target.topology, std::move(joint), std::move(factors), tol);
  } catch (const Error& e) {
    throw ValidationError(field, e.what());
  }
}

Json extension_to_json(const Extension& ext) {
  Json out;
  out["joint"] = ext.joint;
  Json factors = Json::array();
  for (const auto& fu : ext.factors) {
    Json row = Json::array();
    for (const auto& f : fu) row.push_back(matrix_to_json(f.matrix()));
    factors.push_back(std::move(row));
  }
  out["factors"] = std::move(factors);
  return out;
}

}  // namespace coordsim::cli
