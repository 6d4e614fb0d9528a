#include "coordsim/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "coordsim/error.hpp"

namespace coordsim::cli {

namespace {

struct KindName {
  ExperimentKind kind;
  const char* name;
};

constexpr KindName kKinds[] = {
    {ExperimentKind::Info, "info"},
    {ExperimentKind::Resolvability, "resolvability"},
    {ExperimentKind::SimulateTwoNode, "simulate-two-node"},
    {ExperimentKind::SimulateNc, "simulate-nc"},
    {ExperimentKind::SimulateBroadcast, "simulate-broadcast"},
    {ExperimentKind::RegionTwoNode, "region-two-node"},
    {ExperimentKind::RegionNc, "region-nc"},
    {ExperimentKind::RegionBroadcast, "region-broadcast"},
    {ExperimentKind::Oracle, "oracle"},
};

void only_keys(const Json& j, std::initializer_list<const char*> keys, const std::string& prefix) {
  if (!j.is_object()) throw ValidationError(prefix.empty() ? "config" : prefix, "expected an object");
  for (const auto& [k, v] : j.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; })) {
      throw ValidationError(prefix.empty() ? k : prefix + "." + k, "unknown key");
    }
  }
}

double get_number(const Json& j, const std::string& field) {
  if (!j.is_number()) throw ValidationError(field, "expected a number");
  return j.get<double>();
}

double get_nonnegative(const Json& j, const std::string& field) {
  const double v = get_number(j, field);
  if (!(v >= 0.0)) throw ValidationError(field, "nonnegative");
  return v;
}

double get_positive(const Json& j, const std::string& field) {
  const double v = get_number(j, field);
  if (!(v > 0.0)) throw ValidationError(field, "positive");
  return v;
}

std::uint64_t get_count(const Json& j, const std::string& field) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) {
    if (j.get<long long>() < 0) throw ValidationError(field, "nonnegative");
    return static_cast<std::uint64_t>(j.get<long long>());
  }
  throw ValidationError(field, "expected a nonnegative integer");
}

std::size_t get_positive_count(const Json& j, const std::string& field) {
  const auto v = get_count(j, field);
  if (v == 0) throw ValidationError(field, "positive");
  return static_cast<std::size_t>(v);
}

std::string get_string(const Json& j, const std::string& field) {
  if (!j.is_string()) throw ValidationError(field, "expected a string");
  return j.get<std::string>();
}

Json load_json_file(const std::string& path, const std::string& field) {
  std::ifstream in(path);
  if (!in) throw ValidationError(field, "cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const Json::parse_error& e) {
    throw ValidationError(field, "'" + path + "' is not valid JSON: " + e.what());
  }
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

Topology expected_topology(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::SimulateTwoNode:
    case ExperimentKind::RegionTwoNode: return Topology::TwoNode;
    case ExperimentKind::SimulateNc:
    case ExperimentKind::RegionNc: return Topology::NoComm;
    case ExperimentKind::SimulateBroadcast:
    case ExperimentKind::RegionBroadcast: return Topology::Broadcast;
    default: return Topology::TwoNode;
  }
}

bool kind_fixes_topology(ExperimentKind kind) {
  return kind != ExperimentKind::Info && kind != ExperimentKind::Oracle && kind != ExperimentKind::Resolvability;
}

bool is_simulation(ExperimentKind kind) {
  return kind == ExperimentKind::SimulateTwoNode || kind == ExperimentKind::SimulateNc ||
         kind == ExperimentKind::SimulateBroadcast;
}

OracleObjective objective_from_string(const std::string& s) {
  if (s == "first") return OracleObjective::FirstInput;
  if (s == "all") return OracleObjective::AllInputs;
  if (s == "region") return OracleObjective::Region;
  throw ValidationError("oracle.objective", "must be first, all or region");
}

const char* objective_name(OracleObjective o) {
  switch (o) {
    case OracleObjective::FirstInput: return "first";
    case OracleObjective::AllInputs: return "all";
    case OracleObjective::Region: return "region";
  }
  return "all";
}

void parse_rates(const Json& j, Rates& rates) {
  only_keys(j, {"R0", "R1", "R"}, "rates");
  if (j.contains("R0")) rates.r0 = get_nonnegative(j.at("R0"), "R0");
  if (j.contains("R1")) rates.r1 = get_nonnegative(j.at("R1"), "R1");
  if (j.contains("R")) rates.r = get_nonnegative(j.at("R"), "R");
}

void parse_region(const Json& j, RegionOptions& r) {
  only_keys(j, {"restarts", "max_u", "iterations", "boundary_weights"}, "region");
  if (j.contains("restarts")) r.restarts = static_cast<std::size_t>(get_count(j.at("restarts"), "region.restarts"));
  if (j.contains("max_u")) r.max_u = static_cast<std::size_t>(get_count(j.at("max_u"), "region.max_u"));
  if (j.contains("iterations")) r.iterations = static_cast<std::size_t>(get_count(j.at("iterations"), "region.iterations"));
  if (j.contains("boundary_weights")) {
    const auto& w = j.at("boundary_weights");
    if (!w.is_array() || w.empty()) throw ValidationError("region.boundary_weights", "expected a nonempty array");
    r.boundary_weights.clear();
    for (const auto& v : w) {
      const double x = get_number(v, "region.boundary_weights");
      if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("region.boundary_weights", "weights lie in [0, 1]");
      r.boundary_weights.push_back(x);
    }
  }
}

void parse_oracle(const Json& j, OracleOptions& o) {
  only_keys(j, {"max_u", "grid_step", "objective", "r0", "budget"}, "oracle");
  if (j.contains("max_u")) o.max_u = get_positive_count(j.at("max_u"), "oracle.max_u");
  if (j.contains("grid_step")) {
    o.grid_step = get_positive(j.at("grid_step"), "oracle.grid_step");
    const double k = std::log2(1.0 / o.grid_step);
    if (std::abs(k - std::round(k)) > 1e-12 || k < 0.0) throw ValidationError("oracle.grid_step", "must be 1/2^k");
  }
  if (j.contains("objective")) o.objective = objective_from_string(get_string(j.at("objective"), "oracle.objective"));
  if (j.contains("r0")) o.r0 = get_nonnegative(j.at("r0"), "oracle.r0");
  if (j.contains("budget")) o.budget = get_positive_count(j.at("budget"), "oracle.budget");
}

void parse_caps(const Json& j, Caps& c) {
  only_keys(j, {"max_dim", "max_blocks", "max_block_dim", "max_total_dim", "max_codewords"}, "caps");
  if (j.contains("max_dim")) c.max_dim = get_positive_count(j.at("max_dim"), "caps.max_dim");
  if (j.contains("max_blocks")) c.max_blocks = get_positive_count(j.at("max_blocks"), "caps.max_blocks");
  if (j.contains("max_block_dim")) c.max_block_dim = get_positive_count(j.at("max_block_dim"), "caps.max_block_dim");
  if (j.contains("max_total_dim")) c.max_total_dim = get_positive_count(j.at("max_total_dim"), "caps.max_total_dim");
  if (j.contains("max_codewords")) c.max_codewords = get_positive_count(j.at("max_codewords"), "caps.max_codewords");
}

void parse_tolerances(const Json& j, Tolerances& t) {
  only_keys(j, {"hermitian", "trace", "psd", "numeric", "feasibility"}, "tolerances");
  if (j.contains("hermitian")) t.hermitian = get_positive(j.at("hermitian"), "tolerances.hermitian");
  if (j.contains("trace")) t.trace = get_positive(j.at("trace"), "tolerances.trace");
  if (j.contains("psd")) t.psd = get_positive(j.at("psd"), "tolerances.psd");
  if (j.contains("numeric")) t.numeric = get_positive(j.at("numeric"), "tolerances.numeric");
  if (j.contains("feasibility")) t.feasibility = get_positive(j.at("feasibility"), "tolerances.feasibility");
}

void require(bool present, const std::string& field) {
  if (!present) throw ValidationError(field, "required for this experiment kind");
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k.name;
  }
  return "info";
}

ExperimentKind kind_from_string(std::string_view name) {
  for (const auto& k : kKinds) {
    if (name == k.name) return k.kind;
  }
  throw ValidationError("kind", "unknown experiment kind '" + std::string(name) + "'");
}

const std::vector<std::string>& kind_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& k : kKinds) out.emplace_back(k.name);
    return out;
  }();
  return names;
}

bool ExperimentConfig::operator==(const ExperimentConfig& other) const {
  return serialize_config(*this) == serialize_config(other);
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

}  // namespace

void apply_caps_override(Caps& caps, std::string_view spec) {
  std::string text(spec);
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ValidationError("COORDSIM_CAPS", "expected key=value pairs");
    const std::string key = trim(item.substr(0, eq));
    std::size_t value = 0;
    try {
      value = static_cast<std::size_t>(std::stoull(item.substr(eq + 1)));
    } catch (const std::exception&) {
      throw ValidationError("COORDSIM_CAPS", "bad value for " + key);
    }
    if (value == 0) throw ValidationError("COORDSIM_CAPS", key + " must be positive");
    if (key == "max_dim") caps.max_dim = value;
    else if (key == "max_blocks") caps.max_blocks = value;
    else if (key == "max_block_dim") caps.max_block_dim = value;
    else if (key == "max_total_dim") caps.max_total_dim = value;
    else if (key == "max_codewords") caps.max_codewords = value;
    else throw ValidationError("COORDSIM_CAPS", "unknown cap '" + key + "'");
  }
}

ExperimentConfig parse_config(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ParseError(line_of(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
  }
  only_keys(j, {"kind", "seed", "threads", "target", "ensemble", "extension", "rates", "n_list", "trials", "r0_grid",
                "region", "oracle", "caps", "tolerances", "region_variant", "out_dir"},
            "");
  ExperimentConfig c;
  require(j.contains("kind"), "kind");
  c.kind = kind_from_string(get_string(j.at("kind"), "kind"));
  if (j.contains("seed")) c.seed = get_count(j.at("seed"), "seed");
  if (j.contains("threads")) c.threads = static_cast<std::size_t>(get_count(j.at("threads"), "threads"));
  if (j.contains("tolerances")) parse_tolerances(j.at("tolerances"), c.tolerances);
  if (j.contains("caps")) parse_caps(j.at("caps"), c.caps);
  if (j.contains("rates")) parse_rates(j.at("rates"), c.rates);
  if (j.contains("region")) parse_region(j.at("region"), c.region);
  if (j.contains("oracle")) parse_oracle(j.at("oracle"), c.oracle);
  if (j.contains("region_variant")) {
    const auto v = get_string(j.at("region_variant"), "region_variant");
    if (v != "proof" && v != "printed") throw ValidationError("region_variant", "must be proof or printed");
    c.region_variant = region_variant_from_string(v);
  }
  if (j.contains("out_dir")) c.out_dir = get_string(j.at("out_dir"), "out_dir");
  if (j.contains("trials")) c.trials = get_positive_count(j.at("trials"), "trials");
  if (j.contains("n_list")) {
    const auto& nl = j.at("n_list");
    if (!nl.is_array() || nl.empty()) throw ValidationError("n_list", "expected a nonempty array");
    for (const auto& v : nl) c.n_list.push_back(get_positive_count(v, "n_list"));
  }
  if (j.contains("r0_grid")) {
    const auto& g = j.at("r0_grid");
    if (!g.is_array() || g.empty()) throw ValidationError("r0_grid", "expected a nonempty array");
    c.r0_grid.clear();
    for (const auto& v : g) c.r0_grid.push_back(get_nonnegative(v, "R0"));
  }

  std::optional<CqNetworkState> target;
  if (j.contains("target")) {
    Json t = j.at("target");
    if (t.is_object() && t.contains("file")) {
      only_keys(t, {"file"}, "target");
      t = load_json_file(get_string(t.at("file"), "target.file"), "target.file");
    }
    target = state_from_json(t, c.tolerances);
    c.target = state_to_json(*target);
  }
  if (j.contains("ensemble")) c.ensemble = ensemble_to_json(ensemble_from_json(j.at("ensemble"), c.tolerances));
  if (j.contains("extension")) {
    const auto& e = j.at("extension");
    if (e.is_string()) {
      if (e.get<std::string>() != "auto") throw ValidationError("extension", "expected \"auto\" or an object");
    } else {
      require(target.has_value(), "target");
      c.extension = extension_to_json(extension_from_json(e, *target, c.tolerances));
    }
  }

  // Per-kind requirements.
  const ExperimentKind k = c.kind;
  if (k == ExperimentKind::Resolvability) {
    require(c.ensemble.has_value(), "ensemble");
    require(c.rates.r.has_value(), "R");
    require(!c.n_list.empty(), "n_list");
    if (c.trials < 2) throw ValidationError("trials", "at least 2");
  } else {
    require(target.has_value(), "target");
    if (kind_fixes_topology(k) && target->topology != expected_topology(k)) {
      throw ValidationError("target.topology", "must be " + std::string(coordsim::to_string(expected_topology(k))) +
                                                   " for " + std::string(to_string(k)));
    }
  }
  if (is_simulation(k)) {
    require(c.rates.r0.has_value(), "R0");
    if (k != ExperimentKind::SimulateNc) require(c.rates.r1.has_value(), "R1");
    require(!c.n_list.empty(), "n_list");
  }
  if (k == ExperimentKind::Oracle && !is_classical(*target)) {
    throw ValidationError("target", "oracle needs a diagonal (classical) target");
  }
  return c;
}

Json serialize_config(const ExperimentConfig& c) {
  Json j;
  j["kind"] = std::string(to_string(c.kind));
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  if (c.target) j["target"] = *c.target;
  if (c.ensemble) j["ensemble"] = *c.ensemble;
  if (c.extension) {
    j["extension"] = *c.extension;
  } else if (c.kind != ExperimentKind::Resolvability) {
    j["extension"] = "auto";
  }
  Json rates = Json::object();
  if (c.rates.r0) rates["R0"] = *c.rates.r0;
  if (c.rates.r1) rates["R1"] = *c.rates.r1;
  if (c.rates.r) rates["R"] = *c.rates.r;
  j["rates"] = rates;
  if (!c.n_list.empty()) j["n_list"] = c.n_list;
  j["trials"] = c.trials;
  j["r0_grid"] = c.r0_grid;
  j["region"] = Json{{"restarts", c.region.restarts},
                     {"max_u", c.region.max_u},
                     {"iterations", c.region.iterations},
                     {"boundary_weights", c.region.boundary_weights}};
  j["oracle"] = Json{{"max_u", c.oracle.max_u},
                     {"grid_step", c.oracle.grid_step},
                     {"objective", objective_name(c.oracle.objective)},
                     {"r0", c.oracle.r0},
                     {"budget", c.oracle.budget}};
  j["caps"] = Json{{"max_dim", c.caps.max_dim},
                   {"max_blocks", c.caps.max_blocks},
                   {"max_block_dim", c.caps.max_block_dim},
                   {"max_total_dim", c.caps.max_total_dim},
                   {"max_codewords", c.caps.max_codewords}};
  j["tolerances"] = Json{{"hermitian", c.tolerances.hermitian},
                         {"trace", c.tolerances.trace},
                         {"psd", c.tolerances.psd},
                         {"numeric", c.tolerances.numeric},
                         {"feasibility", c.tolerances.feasibility}};
  j["region_variant"] = std::string(coordsim::to_string(c.region_variant));
  j["out_dir"] = c.out_dir;
  return j;
}

}  // namespace coordsim::cli
