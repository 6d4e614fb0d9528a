#pragma once

// Experiment configuration. One JSON document per run; keys are snake_case
// and unknown keys are rejected. Parsing validates every referenced object and
// fills defaults, so a parsed config echoes back as a complete description of
// the run.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coordsim/cli/json_io.hpp"
#include "coordsim/region.hpp"
#include "coordsim/tolerances.hpp"

namespace coordsim::cli {

enum class ExperimentKind {
  Info,
  Resolvability,
  SimulateTwoNode,
  SimulateNc,
  SimulateBroadcast,
  RegionTwoNode,
  RegionNc,
  RegionBroadcast,
  Oracle,
};

std::string_view to_string(ExperimentKind kind);
ExperimentKind kind_from_string(std::string_view name);
const std::vector<std::string>& kind_names();

struct Rates {
  std::optional<double> r0;
  std::optional<double> r1;
  std::optional<double> r;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Info;
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0: all available
  /// Normalized JSON of the target (inline form; a "file" reference is
  /// resolved at parse time).
  std::optional<Json> target;
  std::optional<Json> ensemble;
  /// Explicit extension JSON, or empty for "auto".
  std::optional<Json> extension;
  Rates rates;
  std::vector<std::size_t> n_list;
  std::size_t trials = 50;
  std::vector<double> r0_grid{0.0};
  RegionOptions region;
  OracleOptions oracle;
  Caps caps;
  Tolerances tolerances;
  RegionVariant region_variant = RegionVariant::Proof;
  std::string out_dir = "results";

  bool operator==(const ExperimentConfig& other) const;
};

/// Parses and validates. Throws ParseError (with line) for malformed JSON and
/// ValidationError(field, reason) for bad content.
ExperimentConfig parse_config(std::string_view text);

/// Complete JSON form with defaults; parse_config(serialize(c)) == c.
Json serialize_config(const ExperimentConfig& config);

/// Applies COORDSIM_CAPS ("max_dim=...,max_blocks=...").
void apply_caps_override(Caps& caps, std::string_view spec);

}  // namespace coordsim::cli
