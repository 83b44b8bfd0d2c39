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
#include <compare>
#include <map>
#include <string>
#include <vector>

namespace roa {

/// Coefficients with magnitude below this are dropped after arithmetic.
inline constexpr double kCoeffPrune = 1e-14;

/// Exponent vector of a monomial in a fixed number of state variables.
///
/// Ordering is graded lexicographic: lower total degree first, and within a
/// degree the larger exponent of x1 (then x2, ...) first, so the degree-2
/// monomials in two variables sort as x1^2, x1*x2, x2^2.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> exponents);

  static Monomial one(int dim);
  static Monomial var(int dim, int i, int power = 1);

  int dim() const { return static_cast<int>(exps_.size()); }
  int degree() const { return degree_; }
  int operator[](int i) const { return exps_[i]; }
  const std::vector<int>& exponents() const { return exps_; }

  Monomial operator*(const Monomial& other) const;
  double eval(const Eigen::VectorXd& x) const;

  std::strong_ordering operator<=>(const Monomial& other) const;
  bool operator==(const Monomial& other) const { return exps_ == other.exps_; }

  /// "1", "x1", "x1^2*x2", ...
  std::string to_string() const;

 private:
  std::vector<int> exps_;
  int degree_ = 0;
};

/// Sorted, duplicate-free list of monomials of one dimension.
class MonomialBasis {
 public:
  MonomialBasis() = default;
  MonomialBasis(int dim, std::vector<Monomial> entries);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(entries_.size()); }
  bool empty() const { return entries_.empty(); }
  const Monomial& operator[](int i) const { return entries_[i]; }
  const std::vector<Monomial>& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

 private:
  int dim_ = 0;
  std::vector<Monomial> entries_;
};

/// All monomials in `n` variables with total degree in [dmin, dmax].
MonomialBasis monomial_basis(int n, int dmin, int dmax);

/// Sparse real polynomial in a fixed number of variables.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, double>;

  explicit Polynomial(int dim = 0) : dim_(dim) {}

  static Polynomial constant(int dim, double c);
  static Polynomial variable(int dim, int i);
  static Polynomial from_monomial(const Monomial& m, double c = 1.0);
  /// x^T N x for a square N (the symmetric part is what matters).
  static Polynomial quadratic_form(const Eigen::MatrixXd& N);

  int dim() const { return dim_; }
  /// Max total degree of stored terms; -1 for the zero polynomial.
  int degree() const;
  /// Min total degree of stored terms; -1 for the zero polynomial.
  int min_degree() const;
  bool is_zero() const { return terms_.empty(); }
  int num_terms() const { return static_cast<int>(terms_.size()); }
  const TermMap& terms() const { return terms_; }

  double coeff(const Monomial& m) const;
  /// Accumulates c into the coefficient of m, pruning if it cancels.
  void add_term(const Monomial& m, double c);

  double eval(const Eigen::VectorXd& x) const;
  double max_abs_coeff() const;

  Polynomial& operator+=(const Polynomial& q);
  Polynomial& operator-=(const Polynomial& q);
  Polynomial& operator*=(double s);

  friend Polynomial operator+(Polynomial p, const Polynomial& q) { return p += q; }
  friend Polynomial operator-(Polynomial p, const Polynomial& q) { return p -= q; }
  friend Polynomial operator*(Polynomial p, double s) { return p *= s; }
  friend Polynomial operator*(double s, Polynomial p) { return p *= s; }
  friend Polynomial operator*(const Polynomial& p, const Polynomial& q);
  Polynomial operator-() const { return *this * -1.0; }

  Polynomial partial(int i) const;
  std::vector<Polynomial> grad() const;
  Polynomial homogeneous_part(int d) const;
  Polynomial quadratic_part() const { return homogeneous_part(2); }
  /// Terms with total degree in [dmin, dmax].
  Polynomial degree_window(int dmin, int dmax) const;
  /// q(xi) = p(s .* xi), i.e. each coefficient c_a becomes c_a * prod s_i^a_i.
  Polynomial scale_vars(const Eigen::VectorXd& s) const;

  /// Terms in graded-lex order, six significant digits per coefficient.
  std::string to_string() const;

 private:
  int dim_;
  TermMap terms_;
};

using VectorField = std::vector<Polynomial>;

/// (dV/dx) f.
Polynomial lie_derivative(const Polynomial& V, const VectorField& f);

/// (x - xstar)^T N (x - xstar) with constant, linear and quadratic terms
/// expanded. Throws unless N is symmetric positive definite.
Polynomial affine_shift_expand(const Eigen::MatrixXd& N, const Eigen::VectorXd& xstar);

/// Symmetric matrix of the degree-2 part of p (p2 = x^T M x).
Eigen::MatrixXd quadratic_matrix(const Polynomial& p);

/// Jacobian of f at x.
Eigen::MatrixXd jacobian(const VectorField& f, const Eigen::VectorXd& x);

Eigen::VectorXd eval_field(const VectorField& f, const Eigen::VectorXd& x);

/// Flattened polynomial for tight evaluation loops (simulation, sampling).
class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;
  explicit CompiledPolynomial(const Polynomial& p);

  int dim() const { return dim_; }
  double eval(const double* x) const;
  double eval(const Eigen::VectorXd& x) const { return eval(x.data()); }

 private:
  int dim_ = 0;
  int max_exp_ = 0;
  std::vector<double> coeffs_;
  std::vector<int> exps_;  // row-major, dim_ entries per term
};

class CompiledField {
 public:
  CompiledField() = default;
  explicit CompiledField(const VectorField& f);

  int dim() const { return static_cast<int>(comps_.size()); }
  void eval(const double* x, double* out) const;
  Eigen::VectorXd eval(const Eigen::VectorXd& x) const;

 private:
  std::vector<CompiledPolynomial> comps_;
};

}  // namespace roa
