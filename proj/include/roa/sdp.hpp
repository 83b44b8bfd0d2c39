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

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace roa::sdp {

/// One nonzero of a sparse linear functional over the problem variables.
struct Term {
  int var;
  double value;
};

struct Equality {
  std::vector<Term> terms;
  double rhs = 0.0;
};

/// Standard-form SDP over symmetric PSD blocks and free scalars.
///
/// Variables are numbered block by block, each block contributing the
/// upper-triangular vectorization of its matrix in row-major order (entry
/// (i,j), i <= j), with off-diagonal entries scaled by sqrt(2) so that the
/// Euclidean inner product of two vectorizations equals the trace inner
/// product of the matrices. Free scalars follow the last block.
///
/// The problem reads: minimize objective . v subject to every equality and
/// every block PSD. An empty objective makes it a feasibility problem.
class SdpProblem {
 public:
  SdpProblem() = default;

  /// Returns the block index.
  int add_block(int dim);
  /// Returns the variable index of the first new free scalar.
  int add_free(int count = 1);

  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int block_dim(int b) const { return blocks_.at(b); }
  const std::vector<int>& blocks() const { return blocks_; }
  int free_vars() const { return free_; }
  int num_vars() const;

  /// Variable index of entry (i, j) of block b (order of i, j irrelevant).
  int block_var(int b, int i, int j) const;
  int free_var(int k) const;

  void add_equality(Equality row) { equalities_.push_back(std::move(row)); }
  const std::vector<Equality>& equalities() const { return equalities_; }
  int num_equalities() const { return static_cast<int>(equalities_.size()); }

  void set_objective(std::vector<Term> objective) { objective_ = std::move(objective); }
  const std::vector<Term>& objective() const { return objective_; }
  bool is_feasibility() const { return objective_.empty(); }

  /// Throws std::invalid_argument on out-of-range variables or NaN data.
  void check() const;

  /// One line per equality nonzero ("row var value"), then one line per
  /// right-hand side ("rhs row value").
  void dump(std::ostream& os) const;

 private:
  std::vector<int> blocks_;
  std::vector<int> block_offset_;
  int free_ = 0;
  std::vector<Equality> equalities_;
  std::vector<Term> objective_;
};

enum class Status { Feasible, Infeasible, Unknown };
std::string to_string(Status s);

struct SdpOptions {
  double eq_tol = 1e-7;
  double psd_tol = 1e-8;
  int max_iter = 200;
  /// Feasibility problems only: stop at the first iterate that already
  /// satisfies the equalities with every block strictly PD. Disable to run
  /// to the phase-I optimum (a better centred witness).
  bool early_exit = true;
  /// Feasibility problems only: solve the zero-objective program directly.
  /// Its central path sits at the analytic center of the feasible set, which
  /// is a far better-centred witness than the phase-I optimum. No
  /// infeasibility detection in this mode (non-convergence gives Unknown).
  bool center = false;
  /// Optimization problems: relative duality gap at which to stop. A loose
  /// value returns a central-path point, interior yet close to optimal.
  double stop_gap = 1e-8;
};

struct Residuals {
  double primal_eq = 0.0;             // max |A v - b|
  double min_block_eigenvalue = 0.0;  // over all blocks; +inf without blocks
};

struct SdpSolution {
  Status status = Status::Unknown;
  std::vector<Eigen::MatrixXd> blocks;
  Eigen::VectorXd free_values;
  double objective_value = 0.0;
  /// Feasibility problems: optimum (or last iterate) of the phase-I shift t,
  /// where blocks + t I is PSD. Negative means strictly feasible.
  double phase1_t = 0.0;
  Residuals residuals;
  int iterations = 0;
};

/// Primal-dual interior point solve. Feasibility problems are solved as a
/// phase-I program: minimize t such that every block + t I is PSD, with t
/// bounded below by -1. Deterministic for identical input.
SdpSolution solve(const SdpProblem& prob, const SdpOptions& opts = {});

/// Smallest eigenvalue of a symmetric matrix. Throws on asymmetric input.
double min_eigenvalue(const Eigen::MatrixXd& M);

/// Recomputes residuals of a candidate point against the problem.
Residuals evaluate(const SdpProblem& prob, const std::vector<Eigen::MatrixXd>& blocks,
                   const Eigen::VectorXd& free_values);

}  // namespace roa::sdp
