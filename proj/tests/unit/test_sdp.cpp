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

#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "roa/sdp.hpp"

using namespace roa::sdp;

namespace {

const double kSqrt2 = std::sqrt(2.0);

// Pins every entry of block b to M.
void pin_block(SdpProblem& p, int b, const Eigen::MatrixXd& M) {
  for (int i = 0; i < M.rows(); ++i)
    for (int j = i; j < M.cols(); ++j)
      p.add_equality({{{p.block_var(b, i, j), 1.0}}, i == j ? M(i, i) : kSqrt2 * M(i, j)});
}

}  // namespace

TEST_CASE("min_eigenvalue") {
  CHECK(min_eigenvalue(Eigen::Vector2d(3, 1).asDiagonal().toDenseMatrix()) ==
        doctest::Approx(1.0));
  Eigen::Matrix2d A;
  A << 1, 1, 1, 2;
  // roots of l^2 - 3 l + 1
  CHECK(min_eigenvalue(A) == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-14));
  A << 0, 1, 1, 0;
  CHECK(min_eigenvalue(A) == doctest::Approx(-1.0));
  A << 0, 1, 0, 0;
  CHECK_THROWS_AS(min_eigenvalue(A), std::invalid_argument);
}

TEST_CASE("pinned PSD block is feasible") {
  SdpProblem p;
  const int b = p.add_block(2);
  Eigen::Matrix2d M;
  M << 1, 1, 1, 2;
  pin_block(p, b, M);
  const SdpSolution s = solve(p);
  CHECK(s.status == Status::Feasible);
  CHECK((s.blocks[0] - M).cwiseAbs().maxCoeff() < 1e-7);
  CHECK(s.residuals.primal_eq <= 1e-7);
  CHECK(s.residuals.min_block_eigenvalue ==
        doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-6));
}

TEST_CASE("negative scalar is infeasible") {
  SdpProblem p;
  p.add_block(1);
  p.add_equality({{{0, 1.0}}, -1.0});
  CHECK(solve(p).status == Status::Infeasible);
}

TEST_CASE("indefinite pinned block is infeasible") {
  SdpProblem p;
  const int b = p.add_block(2);
  Eigen::Matrix2d M;
  M << 0, 1, 1, 0;
  pin_block(p, b, M);
  CHECK(solve(p).status == Status::Infeasible);
}

TEST_CASE("no equalities gives the zero witness") {
  SdpProblem p;
  p.add_block(3);
  const SdpSolution s = solve(p);
  CHECK(s.status == Status::Feasible);
  CHECK(s.blocks[0].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("free variables and objective") {
  // minimize y subject to [[1, y], [y, 1]] PSD and entry (0,0) = 1, (1,1) = 1
  // via Q01 - y = 0. Optimum y = -1.
  SdpProblem p;
  const int b = p.add_block(2);
  const int y = p.add_free(1);
  p.add_equality({{{p.block_var(b, 0, 0), 1.0}}, 1.0});
  p.add_equality({{{p.block_var(b, 1, 1), 1.0}}, 1.0});
  p.add_equality({{{p.block_var(b, 0, 1), 1.0 / kSqrt2}, {y, -1.0}}, 0.0});
  p.set_objective({{y, 1.0}});
  const SdpSolution s = solve(p);
  CHECK(s.status == Status::Feasible);
  CHECK(s.objective_value == doctest::Approx(-1.0).epsilon(1e-5));
  CHECK(s.free_values(0) == doctest::Approx(-1.0).epsilon(1e-5));
}

TEST_CASE("unbounded free direction in feasibility problem") {
  SdpProblem p;
  p.add_block(2);
  const int y = p.add_free(2);
  p.add_equality({{{y, 1.0}, {y + 1, 1.0}}, 3.0});
  const SdpSolution s = solve(p);
  CHECK(s.status == Status::Feasible);
  CHECK(s.free_values(0) + s.free_values(1) == doctest::Approx(3.0));
}

TEST_CASE("empty row with nonzero rhs is infeasible") {
  SdpProblem p;
  p.add_block(1);
  p.add_equality({{}, 1.0});
  CHECK(solve(p).status == Status::Infeasible);
}

TEST_CASE("problem checks") {
  SdpProblem p;
  p.add_block(2);
  p.add_equality({{{17, 1.0}}, 0.0});
  CHECK_THROWS_AS(p.check(), std::invalid_argument);
  CHECK_THROWS_AS(solve(p), std::invalid_argument);
  SdpProblem q;
  q.add_block(1);
  q.add_equality({{{0, std::nan("")}}, 0.0});
  CHECK_THROWS_AS(solve(q), std::invalid_argument);
}

TEST_CASE("debug dump") {
  SdpProblem p;
  p.add_block(2);
  p.add_equality({{{0, 1.0}, {2, 2.5}}, 4.0});
  std::ostringstream os;
  p.dump(os);
  CHECK(os.str() == "# blocks 2\n# free 0\n0 0 1\n0 2 2.5\nrhs 0 4\n");
}

TEST_CASE("property: random feasible problems") {
  std::mt19937 rng(2024);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    SdpProblem p;
    const int nb = 1 + trial % 3;
    std::vector<Eigen::MatrixXd> W;
    for (int k = 0; k < nb; ++k) {
      const int d = 2 + (trial + k) % 5;
      p.add_block(d);
      Eigen::MatrixXd L(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) L(i, j) = g(rng);
      // rank-deficient witnesses for some trials (boundary of the cone)
      const int r = trial % 2 == 0 ? d : std::max(1, d / 2);
      Eigen::MatrixXd Lr = L.leftCols(r);
      W.push_back(Lr * Lr.transpose());
    }
    const int nf = trial % 4 == 0 ? 2 : 0;
    if (nf) p.add_free(nf);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(p.num_vars());
    for (int k = 0; k < nb; ++k)
      for (int i = 0; i < W[k].rows(); ++i)
        for (int j = i; j < W[k].cols(); ++j)
          v(p.block_var(k, i, j)) = i == j ? W[k](i, i) : kSqrt2 * W[k](i, j);
    for (int k = 0; k < nf; ++k) v(p.free_var(k)) = g(rng);
    const int m = p.num_vars() / 2;
    for (int r = 0; r < m; ++r) {
      Equality row;
      double rhs = 0.0;
      for (int c = 0; c < p.num_vars(); ++c) {
        if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) {
          const double a = g(rng);
          row.terms.push_back({c, a});
          rhs += a * v(c);
        }
      }
      row.rhs = rhs;
      p.add_equality(row);
    }
    const SdpSolution s = solve(p);
    CHECK(s.status == Status::Feasible);
    if (s.status == Status::Feasible) {
      const Residuals r = evaluate(p, s.blocks, s.free_values);
      CHECK(r.primal_eq <= 1e-7);
      CHECK(r.min_block_eigenvalue >= -1e-8);
    }
    const SdpSolution s2 = solve(p);
    CHECK(s2.status == s.status);
    CHECK(s2.objective_value == s.objective_value);
    CHECK(s2.phase1_t == s.phase1_t);
  }
}

TEST_CASE("loose stop_gap returns an interior near-optimal point") {
  // min X00 subject to X01 = 1, X11 = 1: optimum X00 = 1 on the boundary.
  auto build = [] {
    SdpProblem p;
    const int b = p.add_block(2);
    p.add_equality({{{p.block_var(b, 0, 1), 1.0}}, kSqrt2 * 1.0});
    p.add_equality({{{p.block_var(b, 1, 1), 1.0}}, 1.0});
    p.set_objective({{p.block_var(b, 0, 0), 1.0}});
    return p;
  };
  const SdpSolution tight = solve(build());
  REQUIRE(tight.status == Status::Feasible);
  CHECK(tight.blocks[0](0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  SdpOptions o;
  o.stop_gap = 0.1;
  const SdpSolution loose = solve(build(), o);
  REQUIRE(loose.status == Status::Feasible);
  CHECK(loose.blocks[0](0, 0) > 1.0 + 1e-4);
  CHECK(loose.blocks[0](0, 0) < 1.3);
  CHECK(min_eigenvalue(loose.blocks[0]) > 1e-5);
  CHECK(loose.iterations < tight.iterations);
}

TEST_CASE("badly scaled pinned block") {
  SdpProblem p;
  const int b = p.add_block(3);
  Eigen::Matrix3d M;
  M << 1e6, 10, 0, 10, 1.0, 0.001, 0, 0.001, 1e-3;
  pin_block(p, b, M);
  const SdpSolution s = solve(p);
  CHECK(s.status == Status::Feasible);
  CHECK(s.residuals.primal_eq <= 1e-6);
}
