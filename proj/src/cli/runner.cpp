#include "coordsim/cli/runner.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coordsim/error.hpp"
#include "coordsim/protocols.hpp"
#include "coordsim/region.hpp"
#include "coordsim/softcover.hpp"

namespace coordsim::cli {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : "inf"; }

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      if (!first) out_ << ',';
      out_ << h;
      first = false;
    }
    out_ << '\n';
  }
  void row(std::initializer_list<std::string> cells) {
    bool first = true;
    for (const auto& c : cells) {
      if (!first) out_ << ',';
      out_ << c;
      first = false;
    }
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

RegionOptions region_options(const ExperimentConfig& c) {
  RegionOptions o = c.region;
  o.seed = c.seed;
  o.threads = c.threads;
  o.tol = c.tolerances;
  return o;
}

Json ppt_json(const std::vector<PptCertificate>& certs) {
  Json out = Json::array();
  for (const auto& c : certs) out.push_back(Json{{"cut", c.cut}, {"pass", c.pass}, {"min_eigenvalue", c.min_eigenvalue}});
  return out;
}

Json diagnostics_json(const OptimizerDiagnostics& d) {
  return Json{{"restarts", d.restarts},
              {"candidates", d.candidates},
              {"feasible", d.feasible},
              {"iterations", d.iterations},
              {"best_residual", d.best_residual}};
}

Json region_json(const RegionResult& r) {
  Json j;
  j["status"] = std::string(to_string(r.status));
  j["value"] = opt_json(r.value);
  j["I_X_U"] = r.argmin ? Json(r.info_at_argmin.x_u) : Json(nullptr);
  j["I_XQ_U"] = r.argmin ? Json(r.info_at_argmin.all_u) : Json(nullptr);
  j["sufficient_cr_rate"] = opt_json(r.sufficient_cr_rate);
  j["u_size"] = r.argmin ? Json(r.argmin->u_size()) : Json(nullptr);
  if (r.argmin) j["argmin"] = extension_to_json(*r.argmin);
  j["ppt"] = ppt_json(r.ppt);
  j["optimizer"] = diagnostics_json(r.diagnostics);
  return j;
}

struct Resolved {
  Extension ext;
  Json diagnostics;
};

// Explicit extension, or the best-found extension for min I(XQ;U).
Resolved resolve_extension(const ExperimentConfig& c, const CqNetworkState& target, int& exit_code) {
  Resolved out;
  if (c.extension) {
    out.ext = extension_from_json(*c.extension, target, c.tolerances);
    out.diagnostics = Json{{"source", "config"}};
    return out;
  }
  const auto result = best_extension(target, region_options(c));
  out.diagnostics = region_json(result);
  out.diagnostics["source"] = "auto";
  if (result.status == FeasibilityStatus::InfeasibleEntangled) {
    exit_code = kExitInfeasibleEntangled;
    return out;
  }
  if (!result.argmin) {
    throw Error(ErrorCode::InfeasibleExtension, "no feasible extension found for the target");
  }
  out.ext = *result.argmin;
  return out;
}

void run_info(const ExperimentConfig& c, RunResult& r) {
  const auto target = state_from_json(*c.target, c.tolerances);
  const auto resolved = resolve_extension(c, target, r.exit_code);
  r.record["diagnostics"]["extension"] = resolved.diagnostics;
  Csv csv{"quantity", "value"};
  Json rows = Json::array();
  auto add = [&](const std::string& name, double v) {
    csv.row({name, num(v)});
    rows.push_back(Json{{"quantity", name}, {"value", v}});
  };
  // Target correlation between the first party and the rest.
  const auto omega = assemble(target, c.caps.max_dim);
  const auto labels = omega.labels();
  add("I(first;rest)_target", mutual_information(omega, omega.cut({labels.front()}), c.tolerances));
  if (r.exit_code == kExitOk) {
    const auto& ext = resolved.ext;
    add("feasibility_residual", feasibility_residual(ext, target));
    add("u_size", static_cast<double>(ext.u_size()));
    const auto structured = info_structured(ext);
    switch (target.topology) {
      case Topology::TwoNode: {
        const auto dense = info_two_node(ext, c.tolerances);
        add("I(X;U)", dense.x_u);
        add("I(XQ;U)", dense.all_u);
        break;
      }
      case Topology::Broadcast: {
        const auto dense = info_broadcast(ext, c.tolerances);
        add("I(X;U)", dense.x_u);
        add("I(XQ;U)", dense.all_u);
        break;
      }
      case Topology::NoComm: add("I(U;ABC)", info_nc(ext, c.tolerances)); break;
    }
    add("I(X;U)_structured", structured.x_u);
    add("I(XQ;U)_structured", structured.all_u);
  }
  r.record["rows"] = rows;
  r.csv = csv.str();
}

void run_resolvability(const ExperimentConfig& c, RunResult& r) {
  const auto ens = ensemble_from_json(*c.ensemble, c.tolerances);
  CurveOptions opts;
  opts.threads = c.threads;
  opts.caps = c.caps;
  const auto curve = resolvability_curve(ens, *c.rates.r, c.n_list, c.trials, c.seed, opts);
  Csv csv{"n", "R", "trials", "mean_gap", "std_err", "mutual_info_ref"};
  Json rows = Json::array();
  for (const auto& row : curve.rows) {
    csv.row({std::to_string(row.n), num(curve.rate), std::to_string(row.trials), num(row.mean_gap), num(row.std_err),
             num(curve.mutual_info_ref)});
    rows.push_back(Json{{"n", row.n},
                        {"R", curve.rate},
                        {"trials", row.trials},
                        {"mean_gap", row.mean_gap},
                        {"std_err", row.std_err},
                        {"mutual_info_ref", curve.mutual_info_ref}});
  }
  r.record["rows"] = rows;
  r.csv = csv.str();
}

void run_simulation(const ExperimentConfig& c, RunResult& r) {
  const auto target = state_from_json(*c.target, c.tolerances);
  const auto resolved = resolve_extension(c, target, r.exit_code);
  r.record["diagnostics"]["extension"] = resolved.diagnostics;
  Csv csv{"topology", "n", "R0", "R1", "trials", "mean_gap", "std_err"};
  if (r.exit_code != kExitOk) {
    r.record["rows"] = Json::array();
    r.csv = csv.str();
    return;
  }
  ProtocolOptions opts;
  opts.threads = c.threads;
  opts.caps = c.caps;
  opts.tol = c.tolerances;
  const double r0 = *c.rates.r0;
  const double r1 = c.rates.r1.value_or(0.0);
  ProtocolCurve curve;
  switch (target.topology) {
    case Topology::TwoNode: curve = run_two_node(target, resolved.ext, r0, r1, c.n_list, c.trials, c.seed, opts); break;
    case Topology::Broadcast: curve = run_broadcast(target, resolved.ext, r0, r1, c.n_list, c.trials, c.seed, opts); break;
    case Topology::NoComm: curve = run_no_comm(target, resolved.ext, r0, c.n_list, c.trials, c.seed, opts); break;
  }
  const std::string topo(to_string(curve.topology));
  Json rows = Json::array();
  for (const auto& row : curve.rows) {
    csv.row({topo, std::to_string(row.n), num(curve.r0), num(curve.r1), std::to_string(row.trials), num(row.mean_gap),
             num(row.std_err)});
    rows.push_back(Json{{"topology", topo},
                        {"n", row.n},
                        {"R0", curve.r0},
                        {"R1", curve.r1},
                        {"trials", row.trials},
                        {"mean_gap", row.mean_gap},
                        {"std_err", row.std_err}});
  }
  r.record["rows"] = rows;
  r.record["diagnostics"]["max_marginal_defect"] = curve.max_marginal_defect;
  r.record["diagnostics"]["extension_residual"] = feasibility_residual(resolved.ext, target);
  r.csv = csv.str();
}

void boundary_rows(const RegionBoundary& b, RunResult& r) {
  Csv csv{"R0", "R1"};
  Json rows = Json::array();
  for (const auto& row : b.rows) {
    csv.row({num(row.r0), opt_num(row.r1)});
    rows.push_back(Json{{"R0", row.r0}, {"R1", opt_json(row.r1)}});
  }
  Json hull = Json::array();
  for (const auto& p : b.hull) hull.push_back(Json{{"I_X_U", p.x_u}, {"I_XQ_U", p.all_u}});
  r.record["rows"] = rows;
  r.record["diagnostics"]["status"] = std::string(to_string(b.status));
  r.record["diagnostics"]["region_variant"] = std::string(to_string(b.variant));
  r.record["diagnostics"]["hull"] = hull;
  r.record["diagnostics"]["ppt"] = ppt_json(b.ppt);
  r.record["diagnostics"]["optimizer"] = diagnostics_json(b.diagnostics);
  r.csv = csv.str();
  if (b.status == FeasibilityStatus::InfeasibleEntangled) r.exit_code = kExitInfeasibleEntangled;
}

void run_region_two_node(const ExperimentConfig& c, RunResult& r) {
  const auto target = state_from_json(*c.target, c.tolerances);
  const auto opts = region_options(c);
  r.record["diagnostics"]["min_comm_rate"] = region_json(min_comm_rate(target, opts));
  r.record["diagnostics"]["min_no_cr_rate"] = region_json(min_no_cr_rate(target, opts));
  boundary_rows(trace_two_node_region(target, c.r0_grid, opts, c.region_variant), r);
}

void run_region_broadcast(const ExperimentConfig& c, RunResult& r) {
  const auto target = state_from_json(*c.target, c.tolerances);
  boundary_rows(broadcast_region(target, c.r0_grid, region_options(c), c.region_variant), r);
}

void run_region_nc(const ExperimentConfig& c, RunResult& r) {
  const auto target = state_from_json(*c.target, c.tolerances);
  const auto result = nc_capacity(target, region_options(c));
  Csv csv{"status", "capacity", "min_ppt_eigenvalue"};
  double min_ppt = 0.0;
  for (const auto& p : result.ppt) min_ppt = std::min(min_ppt, p.min_eigenvalue);
  csv.row({std::string(to_string(result.status)), opt_num(result.value), num(min_ppt)});
  r.record["rows"] = Json::array({Json{{"status", std::string(to_string(result.status))},
                                       {"capacity", opt_json(result.value)},
                                       {"min_ppt_eigenvalue", min_ppt}}});
  r.record["diagnostics"]["nc_capacity"] = region_json(result);
  r.csv = csv.str();
  if (result.status == FeasibilityStatus::InfeasibleEntangled) r.exit_code = kExitInfeasibleEntangled;
}

void run_oracle(const ExperimentConfig& c, RunResult& r) {
  const auto target = state_from_json(*c.target, c.tolerances);
  const auto classical = to_classical(target);
  Csv csv{"objective", "status", "value", "u_size", "evaluated"};
  const std::string objective = serialize_config(c)["oracle"]["objective"];
  try {
    const auto res = brute_force_oracle(classical, c.oracle);
    csv.row({objective, "complete", num(res.value), std::to_string(res.u_size), std::to_string(res.evaluated)});
    r.record["rows"] = Json::array({Json{{"objective", objective},
                                         {"status", "complete"},
                                         {"value", res.value},
                                         {"u_size", res.u_size},
                                         {"evaluated", res.evaluated}}});
  } catch (const BudgetExceeded& e) {
    csv.row({objective, "budget_exceeded", num(e.best()), "", ""});
    r.record["rows"] = Json::array({Json{{"objective", objective}, {"status", "budget_exceeded"}, {"value", e.best()}}});
    r.exit_code = kExitBudget;
  }
  r.csv = csv.str();
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->code()) {
      case ErrorCode::ParseError:
      case ErrorCode::ValidationError: return kExitConfig;
      case ErrorCode::InfeasibleExtension: return kExitInfeasibleExtension;
      case ErrorCode::DimensionCap:
      case ErrorCode::ShapeOverflow: return kExitDimensionCap;
      case ErrorCode::BudgetExceeded: return kExitBudget;
      default: return kExitOther;
    }
  }
  return kExitOther;
}

RunResult run(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunResult r;
  r.record["config"] = serialize_config(config);
  r.record["version"] = kVersion;
  r.record["wall_time_s"] = 0.0;
  r.record["rows"] = Json::array();
  r.record["diagnostics"] = Json::object();
  switch (config.kind) {
    case ExperimentKind::Info: run_info(config, r); break;
    case ExperimentKind::Resolvability: run_resolvability(config, r); break;
    case ExperimentKind::SimulateTwoNode:
    case ExperimentKind::SimulateNc:
    case ExperimentKind::SimulateBroadcast: run_simulation(config, r); break;
    case ExperimentKind::RegionTwoNode: run_region_two_node(config, r); break;
    case ExperimentKind::RegionNc: run_region_nc(config, r); break;
    case ExperimentKind::RegionBroadcast: run_region_broadcast(config, r); break;
    case ExperimentKind::Oracle: run_oracle(config, r); break;
  }
  r.record["exit_code"] = r.exit_code;
  r.record["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string utc_stamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

OutputPaths write_outputs(const RunResult& result, const ExperimentConfig& config, const std::string& stamp) {
  namespace fs = std::filesystem;
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);
  const std::string base = std::string(to_string(config.kind)) + "-" + stamp;
  std::string name = base;
  for (int k = 1; fs::exists(dir / (name + ".json")) || fs::exists(dir / (name + ".csv")); ++k) {
    name = base + "-" + std::to_string(k);
  }
  OutputPaths paths{(dir / (name + ".json")).string(), (dir / (name + ".csv")).string()};
  std::ofstream(paths.json) << result.record.dump(2) << '\n';
  std::ofstream(paths.csv) << result.csv;
  return paths;
}

}  // namespace coordsim::cli
