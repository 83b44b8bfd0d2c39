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

#include <functional>
#include <string>
#include <vector>

#include "roa/rcomssf.hpp"
#include "roa/vsiter.hpp"

namespace roa::bench {

enum class Algorithm { A1, A2, Rcomssf };
std::string to_string(Algorithm a);
/// "a1", "a2", "rcomssf"; throws std::invalid_argument otherwise.
Algorithm parse_algorithm(const std::string& s);

struct BenchmarkCase {
  std::string name;
  std::string description;
  DynSystem sys;
  Polynomial V0;
  ShapeFn p0;
  int deg_V = 4;
  int N_I = 30;
  /// Algorithm producing the parent set of the shift tree.
  Algorithm base = Algorithm::A1;
  int branch_N_I = 30;
  ShiftPlan plan;
  /// Known membership test for the exact region of attraction, if any.
  std::function<bool(const Eigen::VectorXd&)> exact_roa;
};

/// vdp, bistable, saddle, hahn, taylor3d.
std::vector<std::string> names();

/// Throws std::invalid_argument for unknown names.
BenchmarkCase load(const std::string& name);

}  // namespace roa::bench
