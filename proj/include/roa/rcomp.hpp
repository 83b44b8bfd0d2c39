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

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "roa/poly.hpp"
#include "roa/vsiter.hpp"

namespace roa {

struct RNode;
using RPtr = std::shared_ptr<const RNode>;

/// R-function expression tree. A leaf holds V with set {V < 1} and
/// evaluates to 1 - V; Or/And use
///   R1 + R2 +/- sqrt(R1^2 + R2^2 - tau R1 R2).
struct RNode {
  enum class Kind { Leaf, Not, And, Or };
  Kind kind = Kind::Leaf;
  Polynomial V;
  CompiledPolynomial compiled;
  std::string label;  // leaf name used by to_string
  RPtr a, b;
  double tau = 2.0;
};

RPtr r_leaf(const Polynomial& V, std::string label = "V");
RPtr r_not(RPtr child);
/// tau must lie in (0, 2].
RPtr r_and(RPtr a, RPtr b, double tau = 2.0);
RPtr r_or(RPtr a, RPtr b, double tau = 2.0);

double r_eval(const RNode& node, const Eigen::VectorXd& x);
inline double r_eval(const RPtr& node, const Eigen::VectorXd& x) { return r_eval(*node, x); }

/// R_or(a, b) and R_and(a, b) on plain numbers.
double r_union(double r1, double r2, double tau = 2.0);
double r_intersection(double r1, double r2, double tau = 2.0);

/// Left fold Or(Or(leaf0, leaf1), leaf2) ... over 1 - V_i. Labels default
/// to V0, V1, ...; throws on an empty list.
RPtr compose_union(const std::vector<Polynomial>& Vs, double tau = 2.0,
                   const std::vector<std::string>& labels = {});
RPtr compose_union(const std::vector<Certificate>& certs, double tau = 2.0);

/// Nested text form, e.g. "R_or(R_or(1 - V0, 1 - V1), 1 - V2)".
std::string to_string(const RNode& node);

/// Leaves in evaluation order.
std::vector<const RNode*> leaves(const RNode& node);

struct PolyApprox {
  Polynomial p;
  double sign_agreement = 0.0;  // fraction of grid points with sign(p) == sign(R)
  bool ridge = false;           // regularized fallback was needed
  int grid_points = 0;
};

/// Least-squares fit of r_eval over a uniform grid (grid points per axis)
/// with all monomials of degree <= degree. Not a certificate: the fitted
/// set is only an approximation of {R > 0}. Throws for odd or small degree,
/// grid < 20, or a degenerate box.
PolyApprox poly_approx(const RNode& node, const std::vector<std::pair<double, double>>& box,
                       int degree, int grid);

}  // namespace roa
