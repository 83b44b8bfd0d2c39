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

#include "doctest.h"
#include "roa/rcomssf.hpp"
#include "test_helpers.hpp"

using namespace roa;
using roa::testing::C;
using roa::testing::X;

namespace {

const Polynomial x1 = X(2, 0), x2 = X(2, 1);

DynSystem cubic_1d() {
  return DynSystem::make("cubic1d", {-1.0 * X(1, 0) + X(1, 0) * X(1, 0) * X(1, 0)}, {{-2.0, 2.0}});
}

Certificate cubic_base() {
  const DynSystem sys = cubic_1d();
  const Polynomial V0 = init_lf(sys);
  VsOptions o;
  o.deg_V = 2;
  o.max_iter = 3;
  return run_a1(sys, V0, ShapeFn::at_origin(quadratic_matrix(V0)), o);
}

}  // namespace

TEST_CASE("rho on known level sets") {
  CHECK(rho(x1 * x1 + x2 * x2, Eigen::Vector2d(1, 0)).t == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rho(0.25 * x1 * x1 + 0.25 * x2 * x2, Eigen::Vector2d(0, 1)).t == doctest::Approx(2.0).epsilon(1e-6));
  const Polynomial V = 2.7 * x1 * x1 - x1 * x2 + 0.2 * x2 * x2;
  CHECK(rho(V, Eigen::Vector2d(1, 0)).t == doctest::Approx(1.0 / std::sqrt(2.7)).epsilon(1e-6));
  // Unnormalized directions are normalized.
  CHECK(rho(x1 * x1 + x2 * x2, Eigen::Vector2d(3, 4)).t == doctest::Approx(1.0).epsilon(1e-6));
  const RhoResult capped = rho(x1 * x1, Eigen::Vector2d(0, 1));
  CHECK(capped.capped);
  CHECK(std::isinf(capped.t));
}

TEST_CASE("select_center") {
  const Eigen::VectorXd c1 = select_center(x1 * x1 + x2 * x2, Eigen::Vector2d(1, 0));
  CHECK((c1 - Eigen::Vector2d(0.8, 0)).norm() < 1e-6);
  const Eigen::VectorXd c2 = select_center(0.25 * x1 * x1 + 0.25 * x2 * x2, Eigen::Vector2d(-1, 0), 0.4);
  CHECK((c2 - Eigen::Vector2d(-0.8, 0)).norm() < 1e-6);
  CHECK_THROWS_AS(select_center(x1 * x1, Eigen::Vector2d(0, 1)), SelectionFailed);
  CHECK_THROWS_AS(select_center(x1 * x1 + x2 * x2, Eigen::Vector2d(1, 0), 1.0), std::invalid_argument);
}

TEST_CASE("non-convex level set along a ray") {
  // Along x1: 16 t^2 (t - 1)^2 + 0.5 t^2 rises above 1 near t = 0.5, drops
  // below it near t = 1 and leaves for good after that.
  const Polynomial bump = x1 - C(2, 1.0);
  const Polynomial V = 16.0 * x1 * x1 * bump * bump + 0.5 * x1 * x1 + x2 * x2;
  CHECK(ray_crossings(V, Eigen::Vector2d(1, 0), 2.0) == 3);
  const RhoResult r = rho(V, Eigen::Vector2d(1, 0));
  CHECK(r.t < 0.5);
  CHECK(V.eval(Eigen::Vector2d(r.t, 0)) == doctest::Approx(1.0).epsilon(1e-5));
  const Eigen::VectorXd c = select_center(V, Eigen::Vector2d(1, 0), 0.95);
  CHECK(V.eval(c) < 1.0);
  CHECK(c(0) < r.t);
}

TEST_CASE("further_shift_check") {
  ShiftNode n;
  n.rho_before = 1.0;
  n.rho_after = 1.0;
  CHECK(!further_shift_check(n));
  n.rho_after = 1.25;
  CHECK(further_shift_check(n));
  n.rho_after = 1.05;
  CHECK(!further_shift_check(n));
  CHECK(further_shift_check(n, 0.01));
}

TEST_CASE("shift plan validation") {
  ShiftPlan plan;
  ShiftEntry e;
  e.direction = Eigen::Vector2d(1, 0);
  e.sigma = 1.2;
  plan.rounds = {{{e}}};
  CHECK_THROWS_AS(plan.check(2), std::invalid_argument);
  plan.rounds[0].entries[0].sigma = 0.8;
  CHECK_NOTHROW(plan.check(2));
  CHECK_THROWS_AS(plan.check(3), std::invalid_argument);
  plan.rounds[0].entries[0].N = -Eigen::Matrix2d::Identity();
  CHECK_THROWS_AS(plan.check(2), std::invalid_argument);
}

TEST_CASE("empty plan gives the root only") {
  const Certificate base = cubic_base();
  REQUIRE(base.certified());
  const ShiftTree t = run_rcomssf(cubic_1d(), base, ShiftPlan{}, RcomssfOptions{});
  REQUIRE(t.nodes.size() == 1);
  CHECK(t.nodes[0].label() == "0");
  CHECK(t.accepted() == std::vector<int>{0});
}

TEST_CASE("property: shift tree nodes keep their centers inside the parent set") {
  const Certificate base = cubic_base();
  REQUIRE(base.certified());
  ShiftPlan plan;
  ShiftEntry right, left, outside;
  right.direction = Eigen::VectorXd::Ones(1);
  left.direction = -Eigen::VectorXd::Ones(1);
  outside.center = Eigen::VectorXd::Constant(1, 1.5);
  plan.rounds = {{{right, left, outside}}};
  RcomssfOptions o;
  o.vs.deg_V = 2;
  o.vs.max_iter = 5;
  const ShiftTree t = run_rcomssf(cubic_1d(), base, plan, o);
  REQUIRE(t.nodes.size() == 4);
  CHECK(t.nodes[1].label() == "1");
  for (size_t i = 1; i < t.nodes.size(); ++i) {
    const ShiftNode& n = t.nodes[i];
    const double v_parent = t.nodes[n.parent].cert.V.eval(n.center);
    if (n.ok) {
      CHECK(v_parent < 1.0);
      CHECK(n.cert.certified());
      // The child certificate also holds at the origin side of its center.
      CHECK(n.cert.V.eval(n.center) < 1.0);
    } else {
      CHECK(!n.diagnostic.empty());
    }
  }
  CHECK(!t.nodes[3].ok);  // (1.5) lies outside the parent set
  CHECK(t.nodes[1].ok);
  CHECK(t.nodes[2].ok);
}
