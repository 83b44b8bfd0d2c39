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
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "roa/config.hpp"
#include "roa/rcomp.hpp"

namespace roa {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitInitialInfeasible = 3,
  kExitSoundness = 4,
  kExitSolver = 5,
};

/// The three-way agreement check for one certificate: symbolic validation,
/// sampled Vdot < 0 on the sublevel set and simulated convergence of interior
/// samples.
struct SoundnessGate {
  std::string label;
  bool symbolic = false;
  double identity_residual = 0.0;
  double min_eig = 0.0;
  bool vdot = false;
  double worst_vdot = 0.0;
  long vdot_samples = 0;
  bool simulation = false;
  long converged = 0;
  long simulated = 0;
  bool passed() const { return symbolic && vdot && simulation; }
  std::string to_line() const;
};

SoundnessGate check_soundness(const DynSystem& sys, const Certificate& cert, std::string label,
                              const OracleSettings& o, std::uint64_t seed);

struct RunResult {
  RunConfig cfg;
  ShiftTree tree;  // nodes[0] holds the base certificate
  RPtr composed;   // R-union of the accepted nodes
  std::vector<SoundnessGate> gates;
  oracle::Measure base_area, union_area;
  std::vector<oracle::Measure> node_areas;  // parallel to tree.nodes, zero for failed nodes
  /// A2 runs only: area of the A1 set from the same V0, p0 and options.
  std::optional<oracle::Measure> a1_reference;
  int exit_code = kExitOk;
  std::string failure;  // first failed gate or stop reason

  std::string set_id(int node) const;  // "omega0", "omega1.2"
};

using LogFn = std::function<void(const std::string&)>;

/// Runs the configured algorithm, the shift tree for rcomssf, the composition
/// and every soundness gate. Never throws for solver-side failures; they are
/// reported through exit_code.
RunResult run_pipeline(const RunConfig& cfg, const LogFn& log = {});

/// Plain-text report. Contains no timings, so identical configs give identical
/// reports.
std::string render_report(const RunResult& r);

/// One boundary point per ray crossing of {inside} seen from `origin`.
struct ContourPoint {
  int dir_index = 0;
  Eigen::VectorXd x;
};
/// Rays in the plane spanned by axes a and b. More than one crossing on a ray
/// means the set is not star-shaped from `origin`; all crossings are kept.
std::vector<ContourPoint> ray_contour(const std::function<bool(const Eigen::VectorXd&)>& inside,
                                      const Eigen::VectorXd& origin, int a, int b, int rays,
                                      double tmax);

/// contours/<set>.csv files; for three states one file per axis-aligned
/// cross-section, "<set>_x2_0.csv" for x2 = 0.
void write_contours(const RunResult& r, const std::string& dir);

/// Gram matrices, bases and polynomials of every accepted certificate.
nlohmann::json certs_to_json(const RunResult& r);

struct CertCheck {
  std::string label;
  bool ok = false;
  std::string detail;
};
/// Re-checks a certs.json document with polynomial arithmetic and eigenvalues
/// only.
std::vector<CertCheck> validate_certs(const nlohmann::json& certs);

/// report.txt, certs.json, effective config.json and contours/.
void write_outputs(const RunResult& r, const std::string& dir);

/// Boundary of the exact or simulated region of attraction for a benchmark as
/// CSV rows `dir_index,x1,x2,set_id`. Uses the limit cycle for vdp, the known
/// predicate where one exists and ray bisection on simulations otherwise.
std::string true_roa_csv(const bench::BenchmarkCase& b, int rays, const oracle::SimOptions& sim);

/// Area and extent rows of two reports side by side.
std::string compare_reports(const std::string& report_a, const std::string& report_b);

}  // namespace roa
