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

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "roa/vsiter.hpp"

namespace roa {

inline constexpr double kRhoCap = 1e3;

struct RhoResult {
  double t = 0.0;  // +inf when capped
  bool capped = false;
};

/// Smallest t > 0 with V(t u) = level along the unit direction u. A coarse
/// sign scan locates the first crossing, bisection refines it to relative
/// tolerance 1e-6. Capped when V stays below level up to t = 1e3.
RhoResult rho(const Polynomial& V, const Eigen::VectorXd& u, double level = 1.0);

/// Number of sign changes of V(t u) - level on (0, tmax] seen by a scan with
/// `samples` steps. More than one means the set is not star-shaped along u.
int ray_crossings(const Polynomial& V, const Eigen::VectorXd& u, double tmax, int samples = 2000,
                  double level = 1.0);

class SelectionFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// x* = sigma * rho(V, u) * u, shrinking sigma by 0.9 up to five times until
/// V(x*) < 1. Throws SelectionFailed when rho is capped or no retry works.
Eigen::VectorXd select_center(const Polynomial& V, const Eigen::VectorXd& u, double sigma = 0.8);

/// One planned shift. Either an explicit center or a direction with sigma.
struct ShiftEntry {
  std::optional<Eigen::VectorXd> center;
  Eigen::VectorXd direction;  // used when center is absent
  double sigma = 0.8;
  Eigen::MatrixXd N;          // empty: identity
  /// Index of the parent node in the previous round (0-based), or -1 to pick
  /// the previous-round node with the smallest V(x*) among those containing
  /// x*. Round one always uses the root.
  int parent = -1;
};

struct ShiftRound {
  std::vector<ShiftEntry> entries;
};

struct ShiftPlan {
  std::vector<ShiftRound> rounds;
  /// Throws std::invalid_argument on sigma outside (0, 1), zero directions,
  /// wrong dimensions or a non-PD N.
  void check(int dim) const;
};

struct ShiftNode {
  std::vector<int> id;  // {} root, {1} first shift, {1, 2} its second child ...
  int parent = -1;      // index into ShiftTree::nodes
  int round = 0;
  Eigen::VectorXd center;
  Eigen::VectorXd direction;  // unit ray used by the further-shift check
  Eigen::MatrixXd N;
  Certificate cert;
  bool ok = false;            // certificate produced and validated
  std::string diagnostic;     // why a branch failed or was pruned
  double rho_before = 0.0;    // parent V along direction
  double rho_after = 0.0;     // this node's V along direction
  bool further_shift = false;

  /// "1.2" style label, "0" for the root.
  std::string label() const;
};

/// Runs A1 from the parent's V with the fixed shape (x - x*)^T N (x - x*).
/// The returned node carries the certificate and both rho values; ok is
/// false with a diagnostic when the V-s iteration fails.
ShiftNode shift_branch(const DynSystem& sys, const ShiftNode& parent, const Eigen::VectorXd& center,
                       const Eigen::MatrixXd& N, const VsOptions& opts);

/// |(rho_after - rho_before) / rho_before| > eps_rho.
bool further_shift_check(const ShiftNode& node, double eps_rho = 0.10);

inline VsOptions branch_vs_defaults() {
  VsOptions o;
  o.v_gap = 0.0;  // analytic-center V-steps keep growth local to the shift center
  return o;
}

struct RcomssfOptions {
  VsOptions vs = branch_vs_defaults();  // per-branch V-s options (adaptive shape is forced off)
  double eps_rho = 0.10;
  /// Skip children of nodes whose further-shift check failed.
  bool respect_further_shift = true;
  int threads = 1;  // branches of one round run concurrently when > 1
};

struct ShiftTree {
  std::vector<ShiftNode> nodes;  // nodes[0] is the root
  std::vector<int> accepted() const;  // indices of nodes with ok certificates
};

ShiftNode make_root(const Certificate& base);

/// Rounds in plan order; failed branches are recorded, never fatal.
ShiftTree run_rcomssf(const DynSystem& sys, const Certificate& base, const ShiftPlan& plan,
                      const RcomssfOptions& opts,
                      const std::function<void(const ShiftNode&)>& on_node = {});

}  // namespace roa
