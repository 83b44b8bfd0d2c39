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

#include <random>

#include "roa/poly.hpp"

namespace roa::testing {

inline Polynomial X(int dim, int i) { return Polynomial::variable(dim, i); }
inline Polynomial C(int dim, double c) { return Polynomial::constant(dim, c); }

/// Random polynomial with `terms` terms of degree <= max_deg, coefficients in [-1, 1].
inline Polynomial random_poly(std::mt19937& rng, int dim, int max_deg, int terms) {
  std::uniform_int_distribution<int> deg(0, max_deg);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Polynomial p(dim);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> e(dim, 0);
    int budget = deg(rng);
    for (int i = 0; i < dim && budget > 0; ++i) {
      std::uniform_int_distribution<int> take(0, budget);
      e[i] = i + 1 == dim ? budget : take(rng);
      budget -= e[i];
    }
    p.add_term(Monomial(e), coef(rng));
  }
  return p;
}

inline Eigen::VectorXd random_point(std::mt19937& rng, int dim, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd x(dim);
  for (int i = 0; i < dim; ++i) x(i) = u(rng);
  return x;
}

}  // namespace roa::testing
