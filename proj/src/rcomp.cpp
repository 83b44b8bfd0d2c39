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

#include "roa/rcomp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace roa {

namespace {

void check_tau(double tau) {
  if (!(tau > 0.0 && tau <= 2.0)) throw std::invalid_argument("R-function: tau must lie in (0, 2]");
}

RPtr binary(RNode::Kind kind, RPtr a, RPtr b, double tau) {
  check_tau(tau);
  if (!a || !b) throw std::invalid_argument("R-function: null operand");
  auto n = std::make_shared<RNode>();
  n->kind = kind;
  n->a = std::move(a);
  n->b = std::move(b);
  n->tau = tau;
  return n;
}

// sqrt of r1^2 + r2^2 - tau r1 r2, written as (r1 - r2)^2 + (2 - tau) r1 r2
// so tau = 2 gives |r1 - r2| without cancellation.
double root(double r1, double r2, double tau) {
  const double d = r1 - r2;
  return std::sqrt(std::max(0.0, d * d + (2.0 - tau) * r1 * r2));
}

void collect(const RNode& n, std::vector<const RNode*>& out) {
  if (n.kind == RNode::Kind::Leaf) {
    out.push_back(&n);
    return;
  }
  if (n.a) collect(*n.a, out);
  if (n.b) collect(*n.b, out);
}

}  // namespace

RPtr r_leaf(const Polynomial& V, std::string label) {
  auto n = std::make_shared<RNode>();
  n->kind = RNode::Kind::Leaf;
  n->V = V;
  n->compiled = CompiledPolynomial(V);
  n->label = std::move(label);
  return n;
}

RPtr r_not(RPtr child) {
  if (!child) throw std::invalid_argument("R-function: null operand");
  auto n = std::make_shared<RNode>();
  n->kind = RNode::Kind::Not;
  n->a = std::move(child);
  return n;
}

RPtr r_and(RPtr a, RPtr b, double tau) { return binary(RNode::Kind::And, std::move(a), std::move(b), tau); }
RPtr r_or(RPtr a, RPtr b, double tau) { return binary(RNode::Kind::Or, std::move(a), std::move(b), tau); }

double r_union(double r1, double r2, double tau) { return r1 + r2 + root(r1, r2, tau); }
double r_intersection(double r1, double r2, double tau) { return r1 + r2 - root(r1, r2, tau); }

double r_eval(const RNode& node, const Eigen::VectorXd& x) {
  switch (node.kind) {
    case RNode::Kind::Leaf: return 1.0 - node.compiled.eval(x);
    case RNode::Kind::Not: return -r_eval(*node.a, x);
    case RNode::Kind::And: return r_intersection(r_eval(*node.a, x), r_eval(*node.b, x), node.tau);
    case RNode::Kind::Or: return r_union(r_eval(*node.a, x), r_eval(*node.b, x), node.tau);
  }
  return 0.0;
}

RPtr compose_union(const std::vector<Polynomial>& Vs, double tau,
                   const std::vector<std::string>& labels) {
  if (Vs.empty()) throw std::invalid_argument("compose_union: no sets");
  if (!labels.empty() && labels.size() != Vs.size())
    throw std::invalid_argument("compose_union: label count mismatch");
  auto label = [&](size_t i) { return labels.empty() ? "V" + std::to_string(i) : labels[i]; };
  RPtr acc = r_leaf(Vs[0], label(0));
  for (size_t i = 1; i < Vs.size(); ++i) acc = r_or(acc, r_leaf(Vs[i], label(i)), tau);
  return acc;
}

RPtr compose_union(const std::vector<Certificate>& certs, double tau) {
  std::vector<Polynomial> Vs;
  for (const Certificate& c : certs) Vs.push_back(c.V);
  return compose_union(Vs, tau);
}

std::string to_string(const RNode& node) {
  switch (node.kind) {
    case RNode::Kind::Leaf: return "1 - " + node.label;
    case RNode::Kind::Not: return "R_not(" + to_string(*node.a) + ")";
    case RNode::Kind::And:
    case RNode::Kind::Or: {
      std::string s = node.kind == RNode::Kind::Or ? "R_or(" : "R_and(";
      s += to_string(*node.a) + ", " + to_string(*node.b);
      if (node.tau != 2.0) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "; tau=%g", node.tau);
        s += buf;
      }
      return s + ")";
    }
  }
  return "";
}

std::vector<const RNode*> leaves(const RNode& node) {
  std::vector<const RNode*> out;
  collect(node, out);
  return out;
}

PolyApprox poly_approx(const RNode& node, const std::vector<std::pair<double, double>>& box,
                       int degree, int grid) {
  if (degree < 2 || degree % 2 != 0) throw std::invalid_argument("poly_approx: degree must be even >= 2");
  if (grid < 20) throw std::invalid_argument("poly_approx: grid must be >= 20");
  const int n = static_cast<int>(box.size());
  if (n == 0) throw std::invalid_argument("poly_approx: empty box");
  for (const auto& [lo, hi] : box)
    if (!(hi > lo)) throw std::invalid_argument("poly_approx: degenerate box");

  const MonomialBasis basis = monomial_basis(n, 0, degree);
  const int m = basis.size();
  long points = 1;
  for (int i = 0; i < n; ++i) points *= grid;

  // Fit in box-normalized coordinates z in [-1, 1]^n, then map back.
  Eigen::VectorXd center(n), half(n);
  for (int i = 0; i < n; ++i) {
    center(i) = 0.5 * (box[i].first + box[i].second);
    half(i) = 0.5 * (box[i].second - box[i].first);
  }
  Eigen::MatrixXd Phi(points, m);
  Eigen::VectorXd r(points);
  std::vector<int> idx(n, 0);
  for (long k = 0; k < points; ++k) {
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = -1.0 + 2.0 * idx[i] / (grid - 1);
    const Eigen::VectorXd x = center + half.cwiseProduct(z);
    for (int j = 0; j < m; ++j) Phi(k, j) = basis[j].eval(z);
    r(k) = r_eval(node, x);
    for (int i = 0; i < n && ++idx[i] == grid; ++i) idx[i] = 0;
  }
  const Eigen::VectorXd colnorm = Phi.colwise().norm().transpose();
  const Eigen::MatrixXd A = Phi * colnorm.cwiseInverse().asDiagonal();
  Eigen::MatrixXd G = A.transpose() * A;
  const Eigen::VectorXd rhs = A.transpose() * r;
  PolyApprox out;
  out.grid_points = static_cast<int>(points);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
  const Eigen::VectorXd D = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || D.minCoeff() <= 1e-14 * D.cwiseAbs().maxCoeff()) {
    G.diagonal().array() += 1e-10;
    ldlt.compute(G);
    out.ridge = true;
  }
  const Eigen::VectorXd c = ldlt.solve(rhs).cwiseQuotient(colnorm);

  // p(x) = sum c_j z^a_j with z = (x - center) / half.
  VectorField zmap(n);
  for (int i = 0; i < n; ++i)
    zmap[i] = (Polynomial::variable(n, i) - Polynomial::constant(n, center(i))) * (1.0 / half(i));
  Polynomial p(n);
  for (int j = 0; j < m; ++j) {
    Polynomial term = Polynomial::constant(n, c(j));
    for (int i = 0; i < n; ++i)
      for (int e = 0; e < basis[j][i]; ++e) term = term * zmap[i];
    p += term;
  }
  out.p = p;

  const Eigen::VectorXd fit = Phi * c;
  // Grid points on the boundary itself have no sign to disagree with.
  const double on_boundary = 1e-9 * r.cwiseAbs().maxCoeff();
  long agree = 0;
  for (long k = 0; k < points; ++k)
    if (std::abs(r(k)) <= on_boundary || (fit(k) > 0.0) == (r(k) > 0.0)) ++agree;
  out.sign_agreement = static_cast<double>(agree) / points;
  return out;
}

}  // namespace roa
