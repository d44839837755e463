#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "delayflock/experiments.hpp"

namespace delayflock {

// A scenario file. JSON document with sections
//
//   model       { n, d, lambda, variant, potential { kind, beta | psi0 | samples } }
//   delay       { kind: "constant", tau } | { kind: "sinusoidal", a, b, omega }
//   initial     { mode: "ballistic", x0, v0 } | { mode: "explicit", samples: [{ t, x, v }] }
//   integration { h, t_end, sample_stride? }
//   criteria?   { eps_v?, x_growth_factor?, t_end?, h? }
//
// Unknown keys are rejected. Errors read "<source>:<line>: <key path>: <reason>".
struct ScenarioConfig {
  Scenario scenario;
  ConsensusCriteria criteria;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

ScenarioConfig parse_config_text(std::string_view text, std::string_view source = "<config>");

// Throws IoError when the file cannot be read, ConfigError otherwise.
ScenarioConfig parse_config(const std::filesystem::path& path);

std::string serialize_config(const ScenarioConfig& config);

}  // namespace delayflock
