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

#include "roa/sos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace roa::sos {

namespace {

const double kSqrt2 = std::sqrt(2.0);

void require_dim(int a, int b) {
  if (a != b) throw std::invalid_argument("sos: dimension mismatch");
}

}  // namespace

// ---------------------------------------------------------------- LinPoly

LinPoly LinPoly::var(int id, const Polynomial& p) {
  LinPoly r(p.dim());
  if (!p.is_zero()) r.vars_.emplace(id, p);
  return r;
}

int LinPoly::degree() const {
  int d = constant_.degree();
  for (const auto& [id, p] : vars_) d = std::max(d, p.degree());
  return d;
}

int LinPoly::min_degree() const {
  int d = -1;
  auto take = [&d](const Polynomial& p) {
    if (p.is_zero()) return;
    d = d < 0 ? p.min_degree() : std::min(d, p.min_degree());
  };
  take(constant_);
  for (const auto& [id, p] : vars_) take(p);
  return d;
}

LinPoly& LinPoly::operator+=(const LinPoly& q) {
  if (dim() == 0 && constant_.is_zero() && vars_.empty()) constant_ = Polynomial(q.dim());
  require_dim(dim(), q.dim());
  constant_ += q.constant_;
  for (const auto& [id, p] : q.vars_) {
    auto it = vars_.find(id);
    if (it == vars_.end()) {
      vars_.emplace(id, p);
    } else {
      it->second += p;
      if (it->second.is_zero()) vars_.erase(it);
    }
  }
  return *this;
}

LinPoly& LinPoly::operator-=(const LinPoly& q) { return *this += -q; }

LinPoly& LinPoly::operator*=(double s) {
  if (s == 0.0) {
    constant_ = Polynomial(dim());
    vars_.clear();
    return *this;
  }
  constant_ *= s;
  for (auto& [id, p] : vars_) p *= s;
  return *this;
}

LinPoly operator*(const LinPoly& p, const Polynomial& q) {
  require_dim(p.dim(), q.dim());
  LinPoly r(p.dim());
  r.constant_ = p.constant_ * q;
  for (const auto& [id, c] : p.vars_) {
    Polynomial prod = c * q;
    if (!prod.is_zero()) r.vars_.emplace(id, std::move(prod));
  }
  return r;
}

Polynomial LinPoly::evaluate(const std::vector<double>& values) const {
  Polynomial r = constant_;
  for (const auto& [id, p] : vars_) {
    if (id < 0 || id >= static_cast<int>(values.size()))
      throw std::invalid_argument("LinPoly::evaluate: missing variable value");
    r += p * values[id];
  }
  return r;
}

LinPoly lie_derivative(const LinPoly& V, const VectorField& f) {
  LinPoly r(roa::lie_derivative(V.constant(), f));
  for (const auto& [id, p] : V.vars()) r += LinPoly::var(id, roa::lie_derivative(p, f));
  return r;
}

// ---------------------------------------------------------------- SosProgram

int SosProgram::new_block(const MonomialBasis& basis) {
  if (basis.empty()) throw std::invalid_argument("sos: empty Gram basis");
  require_dim(basis.dim(), dim_);
  const int b = static_cast<int>(blocks_.size());
  blocks_.push_back(basis);
  std::vector<int> ids;
  const int n = basis.size();
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      ids.push_back(static_cast<int>(vars_.size()));
      vars_.push_back({b, i, j});
    }
  }
  block_ids_.push_back(std::move(ids));
  return b;
}

LinPoly SosProgram::gram_poly(int block) const {
  const MonomialBasis& Z = blocks_[block];
  const auto& ids = block_ids_[block];
  LinPoly r(dim_);
  const int n = Z.size();
  int k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j, ++k) {
      const double w = i == j ? 1.0 : kSqrt2;
      r += LinPoly::var(ids[k], Polynomial::from_monomial(Z[i] * Z[j], w));
    }
  }
  return r;
}

int SosProgram::new_free_poly(const MonomialBasis& basis) {
  require_dim(basis.dim(), dim_);
  PolyVar pv;
  pv.kind = PolyVar::Kind::Free;
  pv.basis = basis;
  pv.poly = LinPoly(dim_);
  for (const Monomial& m : basis) {
    const int id = static_cast<int>(vars_.size());
    vars_.push_back({-1, num_free_++, 0});
    pv.var_ids.push_back(id);
    pv.poly += LinPoly::var(id, Polynomial::from_monomial(m));
  }
  polyvars_.push_back(std::move(pv));
  return num_polyvars() - 1;
}

int SosProgram::new_sos_poly(const MonomialBasis& gram_basis) {
  PolyVar pv;
  pv.kind = PolyVar::Kind::Sos;
  pv.basis = gram_basis;
  pv.no_constant = std::none_of(gram_basis.begin(), gram_basis.end(),
                                [](const Monomial& m) { return m.degree() == 0; });
  pv.block = new_block(gram_basis);
  pv.poly = gram_poly(pv.block);
  polyvars_.push_back(std::move(pv));
  return num_polyvars() - 1;
}

int SosProgram::new_sos_poly(int degree, bool no_constant) {
  if (degree < 0 || degree % 2 != 0)
    throw std::invalid_argument("sos: multiplier degree must be even and non-negative");
  const int lo = no_constant ? 1 : 0;
  if (degree / 2 < lo) throw std::invalid_argument("sos: empty Gram basis");
  return new_sos_poly(monomial_basis(dim_, lo, degree / 2));
}

int SosProgram::add_sos_constraint(const LinPoly& expr, std::string label) {
  require_dim(expr.dim(), dim_);
  const int dmax = expr.degree();
  const int dmin = expr.min_degree();
  if (dmax < 0) throw std::invalid_argument("sos: empty Gram basis (zero expression)");
  if (dmax % 2 != 0) throw std::invalid_argument("sos: odd-degree expression");
  const int lo = (dmin + 1) / 2;
  const int hi = dmax / 2;
  MonomialBasis Z = monomial_basis(dim_, lo, hi);
  SosConstraint c;
  c.expression = expr;
  c.gram_basis = Z;
  c.block = new_block(Z);
  c.label = std::move(label);
  constraints_.push_back(std::move(c));
  return num_constraints() - 1;
}

sdp::SdpProblem SosProgram::compile() const {
  sdp::SdpProblem prob;
  for (const auto& Z : blocks_) prob.add_block(Z.size());
  if (num_free_ > 0) prob.add_free(num_free_);

  auto sdp_var = [&](int id) {
    const VarInfo& v = vars_[id];
    return v.block < 0 ? prob.free_var(v.i) : prob.block_var(v.block, v.i, v.j);
  };

  for (const SosConstraint& c : constraints_) {
    // expression - Z^T Q Z == 0, coefficient by coefficient
    const LinPoly identity = c.expression - gram_poly(c.block);
    std::set<Monomial> monos;
    for (const auto& [m, v] : identity.constant().terms()) monos.insert(m);
    for (const auto& [id, p] : identity.vars())
      for (const auto& [m, v] : p.terms()) monos.insert(m);
    for (const Monomial& m : monos) {
      sdp::Equality row;
      row.rhs = -identity.constant().coeff(m);
      for (const auto& [id, p] : identity.vars()) {
        const double a = p.coeff(m);
        if (a != 0.0) row.terms.push_back({sdp_var(id), a});
      }
      prob.add_equality(std::move(row));
    }
  }

  std::vector<sdp::Term> obj;
  for (const auto& [id, w] : objective_) {
    if (id < 0 || id >= static_cast<int>(vars_.size()))
      throw std::invalid_argument("sos: objective references unknown variable");
    if (w != 0.0) obj.push_back({sdp_var(id), w});
  }
  prob.set_objective(std::move(obj));
  return prob;
}

std::vector<double> SosProgram::variable_values(const SosCertificate& cert) const {
  if (static_cast<int>(cert.blocks.size()) != static_cast<int>(blocks_.size()) ||
      cert.free_values.size() != num_free_)
    throw std::invalid_argument("sos: certificate shape mismatch");
  std::vector<double> vals(vars_.size());
  for (size_t id = 0; id < vars_.size(); ++id) {
    const VarInfo& v = vars_[id];
    if (v.block < 0) {
      vals[id] = cert.free_values(v.i);
    } else {
      const auto& Q = cert.blocks[v.block];
      vals[id] = v.i == v.j ? Q(v.i, v.i) : kSqrt2 * 0.5 * (Q(v.i, v.j) + Q(v.j, v.i));
    }
  }
  return vals;
}

Polynomial SosProgram::value(int polyvar, const SosCertificate& cert) const {
  return polyvars_.at(polyvar).poly.evaluate(variable_values(cert));
}

SosResult SosProgram::solve(const sdp::SdpOptions& opts) const {
  SosResult res;
  res.raw = sdp::solve(compile(), opts);
  res.status = res.raw.status;
  if (res.status != sdp::Status::Feasible) return res;
  SosCertificate cert;
  cert.blocks = res.raw.blocks;
  cert.free_values = res.raw.free_values;
  for (const auto& c : constraints_) cert.constraint_gram.push_back(cert.blocks[c.block]);
  for (const auto& pv : polyvars_) {
    if (pv.kind == PolyVar::Kind::Sos) {
      cert.polyvar_gram.push_back(cert.blocks[pv.block]);
      cert.polyvar_coeffs.emplace_back();
    } else {
      cert.polyvar_gram.emplace_back();
      Eigen::VectorXd c(pv.var_ids.size());
      for (size_t k = 0; k < pv.var_ids.size(); ++k)
        c(k) = cert.free_values(vars_[pv.var_ids[k]].i);
      cert.polyvar_coeffs.push_back(c);
    }
  }
  cert.identity_residual = validate(cert, *this).identity_residual;
  res.certificate = std::move(cert);
  return res;
}

// ---------------------------------------------------------------- validation

Polynomial gram_polynomial(const MonomialBasis& Z, const Eigen::MatrixXd& Q) {
  if (Q.rows() != Z.size() || Q.cols() != Z.size())
    throw std::invalid_argument("gram_polynomial: shape mismatch");
  Polynomial r(Z.dim());
  for (int i = 0; i < Z.size(); ++i) {
    for (int j = 0; j < Z.size(); ++j) {
      const double q = Q(i, j);
      if (q != 0.0) r += Polynomial::from_monomial(Z[i]) * Polynomial::from_monomial(Z[j], q);
    }
  }
  return r;
}

namespace {

double relative_mismatch(const Polynomial& expr, const Polynomial& gram) {
  const Polynomial diff = expr - gram;
  return diff.max_abs_coeff() / std::max(1.0, expr.max_abs_coeff());
}

double safe_min_eig(const Eigen::MatrixXd& Q) {
  if (Q.size() == 0) return std::numeric_limits<double>::infinity();
  const Eigen::MatrixXd S = 0.5 * (Q + Q.transpose());
  return sdp::min_eigenvalue(S);
}

}  // namespace

Validation validate_identity(const Polynomial& expr, const MonomialBasis& Z,
                             const Eigen::MatrixXd& Q) {
  Validation v;
  v.identity_residual = relative_mismatch(expr, gram_polynomial(Z, Q));
  v.min_eig = safe_min_eig(Q);
  v.worst_constraint = 0;
  v.ok = v.identity_residual <= kCertRelTol && v.min_eig >= -kGramEigTol;
  return v;
}

Validation validate(const SosCertificate& cert, const SosProgram& prog) {
  if (static_cast<int>(cert.constraint_gram.size()) != prog.num_constraints())
    throw std::invalid_argument("validate: certificate shape mismatch");
  const std::vector<double> vals = prog.variable_values(cert);
  Validation out;
  out.min_eig = std::numeric_limits<double>::infinity();
  for (int k = 0; k < prog.num_constraints(); ++k) {
    const SosConstraint& c = prog.constraint(k);
    const Eigen::MatrixXd& Q = cert.constraint_gram[k];
    const Polynomial expr = c.expression.evaluate(vals);
    const double r = relative_mismatch(expr, gram_polynomial(c.gram_basis, Q));
    if (r >= out.identity_residual) {
      out.identity_residual = r;
      out.worst_constraint = k;
    }
    out.min_eig = std::min(out.min_eig, safe_min_eig(Q));
  }
  for (int k = 0; k < prog.num_polyvars(); ++k) {
    const PolyVar& pv = prog.polyvar(k);
    if (pv.kind == PolyVar::Kind::Sos)
      out.min_eig = std::min(out.min_eig, safe_min_eig(cert.blocks.at(pv.block)));
  }
  out.ok = out.identity_residual <= kCertRelTol && out.min_eig >= -kGramEigTol;
  return out;
}

// ---------------------------------------------------------------- S-procedure

int s_procedure(SosProgram& prog, const LinPoly& g0, const std::vector<Polynomial>& gs,
                const std::vector<int>& s_degrees, std::vector<int>* multipliers,
                const SProcedureOptions& opts) {
  if (gs.size() != s_degrees.size())
    throw std::invalid_argument("s_procedure: one multiplier degree per g_i required");
  LinPoly expr = g0;
  for (size_t i = 0; i < gs.size(); ++i) {
    if (opts.max_degree >= 0 && s_degrees[i] + gs[i].degree() > opts.max_degree)
      throw std::invalid_argument("s_procedure: degree budget violated");
    const bool nc = i < opts.no_constant.size() && opts.no_constant[i];
    const int s = prog.new_sos_poly(s_degrees[i], nc);
    if (multipliers) multipliers->push_back(s);
    expr -= prog.poly(s) * gs[i];
  }
  return prog.add_sos_constraint(expr, opts.label);
}

}  // namespace roa::sos
