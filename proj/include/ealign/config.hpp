// Run configuration: JSON or dotted key=value text, schema-validated with
// path-to-field error messages; resolves to a Scenario + module options.
#pragma once

#include "ealign/common.hpp"
#include "ealign/dynamics.hpp"
#include "ealign/scenario.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace ealign {

using Json = nlohmann::json;

struct AnalysisConfig {
  double eps_z = -1.0;
  double degenerate_length = -1.0;
  Index pairs = 1000;
  double rel_slack = 1e-3;
  double eps_p_frac = 1e-3;
  double radii_r0 = 0.0;
  int radii_count = 0;
  double local_dim_x = 0.0;
  double collapse_tol = 0.0;
  double atom_mass_tol_frac = 1e-8;
  double stability_eps = 1e-3;
};

struct RunConfig {
  Json resolved;  // full config echoed into every artifact
  std::string scenario_builder;
  Json scenario;
  IntegratorConfig integrator;
  AnalysisConfig analysis;
  std::string out_dir;
  bool write_trajectory = true;
};

// Parses JSON (contents starting with '{') or dotted key=value text.
Json parse_config_text(const std::string& text);

// Validates against the schema (unknown keys rejected) and fills defaults.
RunConfig make_run_config(const Json& j);

// Loads a config file by path.
RunConfig load_config(const std::string& path);

// Instantiates the scenario named by the config.
Scenario build_scenario(const RunConfig& cfg);

}  // namespace ealign
