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

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "roa/rcomp.hpp"
#include "test_helpers.hpp"

using namespace roa;
using roa::testing::C;
using roa::testing::X;

namespace {
const Polynomial x1 = X(2, 0), x2 = X(2, 1);
}

TEST_CASE("R-function formulas at tau = 2") {
  CHECK(r_union(3.0, 1.0) == doctest::Approx(6.0));
  CHECK(r_intersection(3.0, 1.0) == doctest::Approx(2.0));
  CHECK(r_union(-1.0, -2.0) == doctest::Approx(-2.0));
}

TEST_CASE("property: Or is 2 max and And is 2 min on random pairs") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int k = 0; k < 10000; ++k) {
    const double a = u(rng), b = u(rng);
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    CHECK(std::abs(r_union(a, b) - 2.0 * std::max(a, b)) <= 1e-12 * scale);
    CHECK(std::abs(r_intersection(a, b) - 2.0 * std::min(a, b)) <= 1e-12 * scale);
  }
}

TEST_CASE("two crossed ellipses") {
  const Polynomial V1 = x1 * x1 + 9.0 * x2 * x2, V2 = 9.0 * x1 * x1 + x2 * x2;
  const RPtr u = r_or(r_leaf(V1, "V1"), r_leaf(V2, "V2"));
  CHECK(r_eval(u, Eigen::Vector2d(0, 0)) > 0.0);
  CHECK(r_eval(u, Eigen::Vector2d(0.9, 0.9)) < 0.0);
  CHECK(r_eval(u, Eigen::Vector2d(0.9, 0.0)) > 0.0);  // only in V1
  const RPtr i = r_and(r_leaf(V1), r_leaf(V2));
  CHECK(r_eval(i, Eigen::Vector2d(0.9, 0.0)) < 0.0);
  CHECK(r_eval(i, Eigen::Vector2d(0.2, 0.2)) > 0.0);
  CHECK(r_eval(r_not(r_leaf(V1)), Eigen::Vector2d(0, 0)) == doctest::Approx(-1.0));
  CHECK(to_string(*u).find("V1") != std::string::npos);
}

TEST_CASE("compose_union nests left and keeps the base leaf") {
  CHECK_THROWS(compose_union(std::vector<Polynomial>{}));
  const RPtr single = compose_union(std::vector<Polynomial>{x1 * x1 + x2 * x2});
  CHECK(single->kind == RNode::Kind::Leaf);
  const RPtr three = compose_union(std::vector<Polynomial>{x1 * x1 + x2 * x2, x1 * x1, x2 * x2}, 2.0,
                                   {"V0", "V1", "V2"});
  REQUIRE(three->kind == RNode::Kind::Or);
  CHECK(three->b->label == "V2");
  CHECK(three->a->kind == RNode::Kind::Or);
  CHECK(leaves(*three).size() == 3);
}

TEST_CASE("property: union membership matches min V < 1") {
  std::mt19937 rng(5);
  const std::vector<Polynomial> Vs = {
      2.7 * x1 * x1 - x1 * x2 + 0.2 * x2 * x2,
      ShapeFn::shifted(Eigen::Matrix2d::Identity(), Eigen::Vector2d(1, 1)).poly(),
      ShapeFn::shifted(Eigen::Vector2d(1, 4).asDiagonal(), Eigen::Vector2d(-1, -1)).poly() * 2.0,
  };
  const RPtr R = compose_union(Vs);
  std::vector<Polynomial> reversed(Vs.rbegin(), Vs.rend());
  const RPtr Rr = compose_union(reversed);
  CHECK(r_eval(R, Eigen::Vector2d::Zero()) > 0.0);
  for (int k = 0; k < 10000; ++k) {
    const Eigen::VectorXd x = roa::testing::random_point(rng, 2, -3.0, 3.0);
    double vmin = 1e300;
    for (const Polynomial& V : Vs) vmin = std::min(vmin, V.eval(x));
    const double r = r_eval(R, x);
    if (std::abs(vmin - 1.0) < 1e-12) continue;
    CHECK((r > 0.0) == (vmin < 1.0));
    // Values depend on the nesting, the set does not.
    CHECK((r > 0.0) == (r_eval(Rr, x) > 0.0));
  }
}

TEST_CASE("property: tau below 2 is conservative for unions") {
  std::mt19937 rng(9);
  const RPtr R = compose_union(std::vector<Polynomial>{x1 * x1 + x2 * x2, 4.0 * x1 * x1 + 0.25 * x2 * x2}, 1.0);
  for (int k = 0; k < 5000; ++k) {
    const Eigen::VectorXd x = roa::testing::random_point(rng, 2, -3.0, 3.0);
    if (r_eval(R, x) > 0.0)
      CHECK(std::min(x.squaredNorm(), 4.0 * x(0) * x(0) + 0.25 * x(1) * x(1)) < 1.0);
  }
}

TEST_CASE("poly_approx recovers polynomial R-functions") {
  const std::vector<std::pair<double, double>> box = {{-2.0, 2.0}, {-2.0, 2.0}};
  const Polynomial V = x1 * x1 + x2 * x2;
  const PolyApprox a = poly_approx(*r_leaf(V), box, 2, 21);
  CHECK(a.sign_agreement == doctest::Approx(1.0));
  CHECK((a.p - (C(2, 1.0) - V)).max_abs_coeff() <= 1e-8);
  // Or of identical leaves is 2 (1 - V).
  const PolyApprox b = poly_approx(*r_or(r_leaf(V), r_leaf(V)), box, 2, 21);
  CHECK((b.p - 2.0 * (C(2, 1.0) - V)).max_abs_coeff() <= 1e-8);
  CHECK_THROWS(poly_approx(*r_leaf(V), box, 3, 21));
}
