// Copyright 2026 The roa Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "roa/bench.hpp"
#include "roa/oracle.hpp"

namespace roa {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleSettings {
  oracle::SimOptions sim;
  long mc_samples = 100000;
  long vdot_samples = 2000;
  long sim_samples = 500;
  int contour_rays = 720;
};

struct RunConfig {
  /// The benchmark fixture or an inline system with its V0, p0 and plan.
  bench::BenchmarkCase problem;
  bench::Algorithm algorithm = bench::Algorithm::A1;
  VsOptions vs;         // base run
  VsOptions branch_vs;  // shift branches
  double eps_rho = 0.10;
  double tau = 2.0;
  OracleSettings oracle;
  std::uint64_t seed = 42;
  std::string output_dir = "out";
  int threads = 1;
};

/// Polynomials as [{"e": [..], "c": ..}, ...].
nlohmann::json poly_to_json(const Polynomial& p);
Polynomial poly_from_json(const nlohmann::json& j, int dim);
nlohmann::json matrix_to_json(const Eigen::MatrixXd& M);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

/// Throws ConfigError on unknown keys, wrong types, odd deg_V, bad plans or
/// systems that fail the equilibrium/Hurwitz checks. Relative paths are not
/// resolved here.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// The effective configuration, re-loadable by parse_config.
nlohmann::json config_to_json(const RunConfig& cfg);

}  // namespace roa
