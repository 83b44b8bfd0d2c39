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

#include "roa/poly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace roa {

namespace {

void require_dim(int a, int b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

std::string format_coeff(double c) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%#.6g", c);
  return buf;
}

// Recursively enumerates exponent vectors of total degree `deg`, emitting in
// descending lexicographic order so the result is already graded-lex sorted.
void enumerate_degree(int n, int deg, int pos, std::vector<int>& cur,
                      std::vector<Monomial>& out) {
  if (pos == n - 1) {
    cur[pos] = deg;
    out.emplace_back(cur);
    return;
  }
  for (int e = deg; e >= 0; --e) {
    cur[pos] = e;
    enumerate_degree(n, deg - e, pos + 1, cur, out);
  }
  cur[pos] = 0;
}

}  // namespace

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(std::vector<int> exponents) : exps_(std::move(exponents)) {
  for (int e : exps_) {
    if (e < 0) throw std::invalid_argument("Monomial: negative exponent");
    degree_ += e;
  }
}

Monomial Monomial::one(int dim) { return Monomial(std::vector<int>(dim, 0)); }

Monomial Monomial::var(int dim, int i, int power) {
  std::vector<int> e(dim, 0);
  e.at(i) = power;
  return Monomial(std::move(e));
}

Monomial Monomial::operator*(const Monomial& other) const {
  require_dim(dim(), other.dim(), "Monomial::operator*");
  std::vector<int> e(exps_);
  for (int i = 0; i < dim(); ++i) e[i] += other.exps_[i];
  return Monomial(std::move(e));
}

double Monomial::eval(const Eigen::VectorXd& x) const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) {
    for (int k = 0; k < exps_[i]; ++k) v *= x[i];
  }
  return v;
}

std::strong_ordering Monomial::operator<=>(const Monomial& other) const {
  if (degree_ != other.degree_) return degree_ <=> other.degree_;
  // Larger leading exponent sorts first within a degree.
  return other.exps_ <=> exps_;
}

std::string Monomial::to_string() const {
  std::string s;
  for (int i = 0; i < dim(); ++i) {
    if (exps_[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += "x" + std::to_string(i + 1);
    if (exps_[i] > 1) s += "^" + std::to_string(exps_[i]);
  }
  return s.empty() ? "1" : s;
}

// ----------------------------------------------------------- MonomialBasis

MonomialBasis::MonomialBasis(int dim, std::vector<Monomial> entries)
    : dim_(dim), entries_(std::move(entries)) {
  for (const auto& m : entries_) require_dim(m.dim(), dim_, "MonomialBasis");
  std::sort(entries_.begin(), entries_.end());
  entries_.erase(std::unique(entries_.begin(), entries_.end()), entries_.end());
}

MonomialBasis monomial_basis(int n, int dmin, int dmax) {
  if (n <= 0 || dmin < 0 || dmin > dmax) {
    throw std::invalid_argument("monomial_basis: need n > 0 and 0 <= dmin <= dmax");
  }
  std::vector<Monomial> out;
  std::vector<int> cur(n, 0);
  for (int d = dmin; d <= dmax; ++d) enumerate_degree(n, d, 0, cur, out);
  return MonomialBasis(n, std::move(out));
}

// -------------------------------------------------------------- Polynomial

Polynomial Polynomial::constant(int dim, double c) {
  Polynomial p(dim);
  p.add_term(Monomial::one(dim), c);
  return p;
}

Polynomial Polynomial::variable(int dim, int i) {
  Polynomial p(dim);
  p.add_term(Monomial::var(dim, i), 1.0);
  return p;
}

Polynomial Polynomial::from_monomial(const Monomial& m, double c) {
  Polynomial p(m.dim());
  p.add_term(m, c);
  return p;
}

Polynomial Polynomial::quadratic_form(const Eigen::MatrixXd& N) {
  if (N.rows() != N.cols()) throw std::invalid_argument("quadratic_form: N not square");
  const int n = static_cast<int>(N.rows());
  Polynomial p(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double c = i == j ? N(i, i) : N(i, j) + N(j, i);
      std::vector<int> e(n, 0);
      e[i] += 1;
      e[j] += 1;
      p.add_term(Monomial(std::move(e)), c);
    }
  }
  return p;
}

int Polynomial::degree() const {
  return terms_.empty() ? -1 : terms_.rbegin()->first.degree();
}

int Polynomial::min_degree() const {
  return terms_.empty() ? -1 : terms_.begin()->first.degree();
}

double Polynomial::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const Monomial& m, double c) {
  require_dim(m.dim(), dim_, "Polynomial::add_term");
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) it->second += c;
  if (std::abs(it->second) < kCoeffPrune) terms_.erase(it);
}

double Polynomial::eval(const Eigen::VectorXd& x) const {
  require_dim(static_cast<int>(x.size()), dim_, "Polynomial::eval");
  double v = 0.0;
  for (const auto& [m, c] : terms_) v += c * m.eval(x);
  return v;
}

double Polynomial::max_abs_coeff() const {
  double v = 0.0;
  for (const auto& [m, c] : terms_) v = std::max(v, std::abs(c));
  return v;
}

Polynomial& Polynomial::operator+=(const Polynomial& q) {
  require_dim(dim_, q.dim_, "Polynomial::operator+");
  for (const auto& [m, c] : q.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& q) {
  require_dim(dim_, q.dim_, "Polynomial::operator-");
  for (const auto& [m, c] : q.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= s;
    if (std::abs(it->second) < kCoeffPrune) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
  return *this;
}

Polynomial operator*(const Polynomial& p, const Polynomial& q) {
  require_dim(p.dim_, q.dim_, "Polynomial::operator*");
  // Accumulate unpruned so intermediate cancellations are exact.
  std::map<Monomial, double> acc;
  for (const auto& [mp, cp] : p.terms_) {
    for (const auto& [mq, cq] : q.terms_) acc[mp * mq] += cp * cq;
  }
  Polynomial r(p.dim_);
  for (auto& [m, c] : acc) {
    if (std::abs(c) >= kCoeffPrune) r.terms_.emplace_hint(r.terms_.end(), m, c);
  }
  return r;
}

Polynomial Polynomial::partial(int i) const {
  if (i < 0 || i >= dim_) throw std::out_of_range("Polynomial::partial");
  Polynomial r(dim_);
  for (const auto& [m, c] : terms_) {
    if (m[i] == 0) continue;
    std::vector<int> e = m.exponents();
    const int k = e[i];
    e[i] -= 1;
    r.add_term(Monomial(std::move(e)), c * k);
  }
  return r;
}

std::vector<Polynomial> Polynomial::grad() const {
  std::vector<Polynomial> g;
  g.reserve(dim_);
  for (int i = 0; i < dim_; ++i) g.push_back(partial(i));
  return g;
}

Polynomial Polynomial::homogeneous_part(int d) const { return degree_window(d, d); }

Polynomial Polynomial::degree_window(int dmin, int dmax) const {
  Polynomial r(dim_);
  for (const auto& [m, c] : terms_) {
    if (m.degree() >= dmin && m.degree() <= dmax) r.terms_.emplace_hint(r.terms_.end(), m, c);
  }
  return r;
}

Polynomial Polynomial::scale_vars(const Eigen::VectorXd& s) const {
  require_dim(static_cast<int>(s.size()), dim_, "Polynomial::scale_vars");
  Polynomial r(dim_);
  for (const auto& [m, c] : terms_) r.add_term(m, c * m.eval(s));
  return r;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    const double mag = std::abs(c);
    if (first) {
      s += c < 0 ? "-" : "";
    } else {
      s += c < 0 ? " - " : " + ";
    }
    s += format_coeff(mag);
    if (m.degree() > 0) s += "*" + m.to_string();
    first = false;
  }
  return s;
}

// -------------------------------------------------------------- free funcs

Polynomial lie_derivative(const Polynomial& V, const VectorField& f) {
  require_dim(static_cast<int>(f.size()), V.dim(), "lie_derivative");
  Polynomial r(V.dim());
  for (int i = 0; i < V.dim(); ++i) {
    require_dim(f[i].dim(), V.dim(), "lie_derivative");
    r += V.partial(i) * f[i];
  }
  return r;
}

Polynomial affine_shift_expand(const Eigen::MatrixXd& N, const Eigen::VectorXd& xstar) {
  if (N.rows() != N.cols()) throw std::invalid_argument("affine_shift_expand: N not square");
  require_dim(static_cast<int>(xstar.size()), static_cast<int>(N.rows()), "affine_shift_expand");
  if ((N - N.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, N.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("affine_shift_expand: N not symmetric");
  }
  if (Eigen::LLT<Eigen::MatrixXd>(N).info() != Eigen::Success) {
    throw std::invalid_argument("affine_shift_expand: N not positive definite");
  }
  const int n = static_cast<int>(N.rows());
  Polynomial p = Polynomial::quadratic_form(N);
  const Eigen::VectorXd Nx = N * xstar;
  for (int i = 0; i < n; ++i) p.add_term(Monomial::var(n, i), -2.0 * Nx[i]);
  p.add_term(Monomial::one(n), xstar.dot(Nx));
  return p;
}

Eigen::MatrixXd quadratic_matrix(const Polynomial& p) {
  const int n = p.dim();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [m, c] : p.terms()) {
    if (m.degree() != 2) continue;
    int i = -1, j = -1;
    for (int k = 0; k < n; ++k) {
      for (int r = 0; r < m[k]; ++r) (i < 0 ? i : j) = k;
    }
    if (i == j) {
      M(i, i) += c;
    } else {
      M(i, j) += 0.5 * c;
      M(j, i) += 0.5 * c;
    }
  }
  return M;
}

Eigen::MatrixXd jacobian(const VectorField& f, const Eigen::VectorXd& x) {
  const int n = static_cast<int>(f.size());
  Eigen::MatrixXd J(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) J(i, j) = f[i].partial(j).eval(x);
  }
  return J;
}

Eigen::VectorXd eval_field(const VectorField& f, const Eigen::VectorXd& x) {
  Eigen::VectorXd v(f.size());
  for (size_t i = 0; i < f.size(); ++i) v[static_cast<int>(i)] = f[i].eval(x);
  return v;
}

// ------------------------------------------------------ CompiledPolynomial

CompiledPolynomial::CompiledPolynomial(const Polynomial& p) : dim_(p.dim()) {
  for (const auto& [m, c] : p.terms()) {
    coeffs_.push_back(c);
    for (int i = 0; i < dim_; ++i) {
      exps_.push_back(m[i]);
      max_exp_ = std::max(max_exp_, m[i]);
    }
  }
}

double CompiledPolynomial::eval(const double* x) const {
  // Power table on the stack; dims and degrees here are small.
  constexpr int kMaxPow = 24;
  constexpr int kMaxDim = 8;
  if (dim_ > kMaxDim || max_exp_ >= kMaxPow) {
    double v = 0.0;
    for (size_t t = 0; t < coeffs_.size(); ++t) {
      double term = coeffs_[t];
      for (int i = 0; i < dim_; ++i) term *= std::pow(x[i], exps_[t * dim_ + i]);
      v += term;
    }
    return v;
  }
  double pw[kMaxDim][kMaxPow];
  for (int i = 0; i < dim_; ++i) {
    pw[i][0] = 1.0;
    for (int k = 1; k <= max_exp_; ++k) pw[i][k] = pw[i][k - 1] * x[i];
  }
  double v = 0.0;
  const int* e = exps_.data();
  for (size_t t = 0; t < coeffs_.size(); ++t, e += dim_) {
    double term = coeffs_[t];
    for (int i = 0; i < dim_; ++i) term *= pw[i][e[i]];
    v += term;
  }
  return v;
}

CompiledField::CompiledField(const VectorField& f) {
  comps_.reserve(f.size());
  for (const auto& p : f) comps_.emplace_back(p);
}

void CompiledField::eval(const double* x, double* out) const {
  for (size_t i = 0; i < comps_.size(); ++i) out[i] = comps_[i].eval(x);
}

Eigen::VectorXd CompiledField::eval(const Eigen::VectorXd& x) const {
  Eigen::VectorXd v(dim());
  eval(x.data(), v.data());
  return v;
}

}  // namespace roa
