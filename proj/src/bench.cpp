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

#include "roa/bench.hpp"

#include <stdexcept>

namespace roa::bench {

namespace {

Polynomial x(int n, int i) { return Polynomial::variable(n, i); }
Polynomial c(int n, double v) { return Polynomial::constant(n, v); }

ShiftEntry at(std::vector<double> center, Eigen::MatrixXd N = {}, int parent = -1) {
  ShiftEntry e;
  e.center = Eigen::Map<Eigen::VectorXd>(center.data(), center.size());
  e.N = std::move(N);
  e.parent = parent;
  return e;
}

ShiftEntry along(std::vector<double> dir, double sigma, Eigen::MatrixXd N = {}, int parent = -1) {
  ShiftEntry e;
  e.direction = Eigen::Map<Eigen::VectorXd>(dir.data(), dir.size()).normalized();
  e.sigma = sigma;
  e.N = std::move(N);
  e.parent = parent;
  return e;
}

Eigen::MatrixXd diag2(double a, double b) { return Eigen::Vector2d(a, b).asDiagonal(); }

BenchmarkCase vdp() {
  BenchmarkCase b;
  b.name = "vdp";
  b.description = "Van der Pol oscillator in reversed time; the true region is bounded by an unstable limit cycle";
  const Polynomial x1 = x(2, 0), x2 = x(2, 1);
  b.sys = DynSystem::make("vdp", {-1.0 * x2, x1 + 5.0 * x2 * (x1 * x1 - c(2, 1.0))},
                          {{-3.0, 3.0}, {-7.0, 7.0}});
  b.V0 = init_lf(b.sys);
  b.p0 = ShapeFn::at_origin(quadratic_matrix(b.V0));
  b.deg_V = 6;
  b.plan.rounds = {{{at({1, 1}), at({-1, -1})}}};
  return b;
}

BenchmarkCase bistable() {
  BenchmarkCase b;
  b.name = "bistable";
  b.description = "two stable nodes (0,0), (1,0) and a saddle at (0.5,0); the origin's region is x1 < 0.5";
  const Polynomial x1 = x(2, 0), x2 = x(2, 1);
  b.sys = DynSystem::make("bistable",
                          {-4.0 * x1 * x1 * x1 + 6.0 * x1 * x1 - 2.0 * x1, -2.0 * x2},
                          {{-3.0, 1.0}, {-8.0, 8.0}});
  b.V0 = init_lf(b.sys);
  b.p0 = ShapeFn::at_origin(0.8 * quadratic_matrix(b.V0));
  b.deg_V = 4;
  b.base = Algorithm::A2;
  b.branch_N_I = 60;
  b.plan.rounds = {{{at({-0.8, 0.0}, diag2(1.0, 1.0 / 16.0))}}};
  b.exact_roa = [](const Eigen::VectorXd& p) { return p(0) < 0.5; };
  return b;
}

BenchmarkCase saddle() {
  BenchmarkCase b;
  b.name = "saddle";
  b.description = "stable node at the origin and a saddle near (1.45, 18.17)";
  const Polynomial x1 = x(2, 0), x2 = x(2, 1);
  b.sys = DynSystem::make("saddle",
                          {-50.0 * x1 - 16.0 * x2 + 13.8 * x1 * x2,
                           13.0 * x1 - 9.0 * x2 + 5.5 * x1 * x2},
                          {{-30.0, 10.0}, {-20.0, 20.0}});
  b.V0 = init_lf(b.sys);
  b.p0 = ShapeFn::at_origin(quadratic_matrix(b.V0));
  b.deg_V = 4;
  const Eigen::MatrixXd N1 = diag2(0.25, 1.0);
  b.plan.rounds = {{{at({0, -4}, N1), at({-7.5, 0})}},
                   {{along({0, -1}, 0.85, N1, 0), along({-9, 1}, 0.85, {}, 1),
                     along({-3, 8}, 0.85, {}, 1)}}};
  return b;
}

BenchmarkCase hahn() {
  BenchmarkCase b;
  b.name = "hahn";
  b.description = "Hahn's example; the exact region is x1 x2 < 1";
  const Polynomial x1 = x(2, 0), x2 = x(2, 1);
  b.sys = DynSystem::make("hahn", {-1.0 * x1 + 2.0 * x1 * x1 * x2, -1.0 * x2},
                          {{-10.0, 10.0}, {-10.0, 10.0}});
  b.V0 = init_lf(b.sys);
  Eigen::Matrix2d P;
  P << 14.47, 18.55, 18.55, 26.53;
  b.p0 = ShapeFn::at_origin(P);
  b.deg_V = 6;
  b.plan.rounds = {{{along({-4, 3}, 0.8), along({4, -3}, 0.8)}},
                   {{along({-1, 1}, 0.8, {}, 0), along({-3, 1}, 0.8, {}, 0),
                     along({1, -1}, 0.8, {}, 1), along({3, -1}, 0.8, {}, 1)}}};
  b.exact_roa = [](const Eigen::VectorXd& p) { return p(0) * p(1) < 1.0; };
  return b;
}

BenchmarkCase taylor3d() {
  BenchmarkCase b;
  b.name = "taylor3d";
  b.description = "cubic Taylor model in three states";
  const Polynomial x1 = x(3, 0), x2 = x(3, 1), x3 = x(3, 2);
  b.sys = DynSystem::make(
      "taylor3d",
      {x2 + x3 * x3, x3 - x1 * x1 - x1 * (x1 - (1.0 / 6.0) * x1 * x1 * x1),
       -1.0 * x1 - 2.0 * x2 - x3 + x2 * x2 * x2 +
           0.1 * ((2.0 / 3.0) * x3 * x3 * x3 + 0.4 * x3 * x3 * x3 * x3 * x3)},
      {{-2.0, 2.0}, {-2.0, 2.0}, {-2.0, 2.0}});
  b.V0 = init_lf(b.sys);
  b.p0 = ShapeFn::at_origin(quadratic_matrix(b.V0));
  b.deg_V = 4;
  b.N_I = 60;  // two planned centers sit just outside the 30-iteration set
  b.plan.rounds = {{{at({0.8, 0, 0}), at({-0.8, 0, 0.6}), at({0.2, 0, -0.8}), at({0, 0, 1.2})}}};
  return b;
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::A1: return "a1";
    case Algorithm::A2: return "a2";
    case Algorithm::Rcomssf: return "rcomssf";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "a1") return Algorithm::A1;
  if (s == "a2") return Algorithm::A2;
  if (s == "rcomssf") return Algorithm::Rcomssf;
  throw std::invalid_argument("unknown algorithm '" + s + "'");
}

std::vector<std::string> names() { return {"vdp", "bistable", "saddle", "hahn", "taylor3d"}; }

BenchmarkCase load(const std::string& name) {
  if (name == "vdp") return vdp();
  if (name == "bistable") return bistable();
  if (name == "saddle") return saddle();
  if (name == "hahn") return hahn();
  if (name == "taylor3d") return taylor3d();
  throw std::invalid_argument("unknown benchmark '" + name + "'");
}

}  // namespace roa::bench
