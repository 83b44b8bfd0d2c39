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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "roa/poly.hpp"
#include "roa/sdp.hpp"

namespace roa::sos {

/// Polynomial that is affine in scalar decision variables:
/// constant(x) + sum_k v_k * coeff_k(x).
class LinPoly {
 public:
  explicit LinPoly(int dim = 0) : constant_(dim) {}
  LinPoly(const Polynomial& p) : constant_(p) {}  // NOLINT(runtime/explicit)

  static LinPoly var(int id, const Polynomial& p);

  int dim() const { return constant_.dim(); }
  const Polynomial& constant() const { return constant_; }
  const std::map<int, Polynomial>& vars() const { return vars_; }

  int degree() const;
  int min_degree() const;

  LinPoly& operator+=(const LinPoly& q);
  LinPoly& operator-=(const LinPoly& q);
  LinPoly& operator*=(double s);
  friend LinPoly operator+(LinPoly p, const LinPoly& q) { return p += q; }
  friend LinPoly operator-(LinPoly p, const LinPoly& q) { return p -= q; }
  friend LinPoly operator*(LinPoly p, double s) { return p *= s; }
  friend LinPoly operator*(const LinPoly& p, const Polynomial& q);
  friend LinPoly operator*(const Polynomial& q, const LinPoly& p) { return p * q; }
  LinPoly operator-() const { return *this * -1.0; }

  /// Substitutes numeric values for the decision variables (indexed by id).
  Polynomial evaluate(const std::vector<double>& values) const;

 private:
  Polynomial constant_;
  std::map<int, Polynomial> vars_;
};

LinPoly lie_derivative(const LinPoly& V, const VectorField& f);

/// Unknown polynomial inside an SOS program.
struct PolyVar {
  enum class Kind { Free, Sos };
  Kind kind = Kind::Free;
  /// Free: the monomials carrying unknown coefficients. Sos: the Gram basis Z.
  MonomialBasis basis;
  bool no_constant = false;
  int block = -1;              // Sos: index into SosProgram blocks
  std::vector<int> var_ids;    // Free: one id per basis entry
  LinPoly poly;                // the polynomial as an affine expression
};

/// Requirement that an affine expression is a sum of squares.
struct SosConstraint {
  LinPoly expression;
  MonomialBasis gram_basis;
  int block = -1;
  std::string label;
};

/// Numeric solution of a program: one Gram matrix per constraint and values
/// for every PolyVar.
struct SosCertificate {
  std::vector<Eigen::MatrixXd> constraint_gram;
  std::vector<Eigen::MatrixXd> polyvar_gram;    // Sos PolyVars (empty for Free)
  std::vector<Eigen::VectorXd> polyvar_coeffs;  // Free PolyVars (empty for Sos)
  double identity_residual = 0.0;
  /// Raw solver values the matrices above were read from.
  std::vector<Eigen::MatrixXd> blocks;
  Eigen::VectorXd free_values;
};

struct Validation {
  bool ok = false;
  double identity_residual = 0.0;  // max over constraints
  double min_eig = 0.0;            // over every Gram matrix involved
  int worst_constraint = -1;
};

inline constexpr double kGramEigTol = 1e-8;
inline constexpr double kCertRelTol = 1e-6;

struct SosResult {
  sdp::Status status = sdp::Status::Unknown;
  std::optional<SosCertificate> certificate;
  sdp::SdpSolution raw;
};

class SosProgram {
 public:
  explicit SosProgram(int dim) : dim_(dim) {}

  int dim() const { return dim_; }

  /// Unknown polynomial with free coefficients on `basis`.
  int new_free_poly(const MonomialBasis& basis);
  /// Unknown SOS polynomial Z^T Q Z, Q PSD, over the given Gram basis.
  int new_sos_poly(const MonomialBasis& gram_basis);
  /// SOS polynomial of even degree `degree`; the constant monomial is left
  /// out of Z when `no_constant` is set, so the polynomial vanishes at 0.
  int new_sos_poly(int degree, bool no_constant);

  const PolyVar& polyvar(int i) const { return polyvars_.at(i); }
  const LinPoly& poly(int i) const { return polyvars_.at(i).poly; }
  int num_polyvars() const { return static_cast<int>(polyvars_.size()); }

  /// Adds "expr is SOS" with the full Gram basis over the degree window
  /// [ceil(dmin/2), floor(dmax/2)] of the expression. Throws on odd top
  /// degree or empty basis.
  int add_sos_constraint(const LinPoly& expr, std::string label = {});
  const SosConstraint& constraint(int i) const { return constraints_.at(i); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }

  /// Linear objective (minimized) over free coefficients; empty means
  /// feasibility.
  void set_objective(std::map<int, double> var_weights) { objective_ = std::move(var_weights); }

  /// One PSD block per Sos PolyVar and per constraint, one equality per
  /// monomial of each identity, in graded-lex order.
  sdp::SdpProblem compile() const;

  /// compile + sdp::solve; on Feasible the certificate is extracted.
  SosResult solve(const sdp::SdpOptions& opts = {}) const;

  /// Maps numeric PolyVar values to the per-id value vector.
  std::vector<double> variable_values(const SosCertificate& cert) const;

  /// Numeric value of PolyVar i under a certificate.
  Polynomial value(int polyvar, const SosCertificate& cert) const;

 private:
  friend Validation validate(const SosCertificate&, const SosProgram&);

  struct VarInfo {
    int block;  // -1 for free
    int i, j;   // Gram entry or free index in i
  };
  int new_block(const MonomialBasis& basis);
  LinPoly gram_poly(int block) const;

  int dim_;
  std::vector<MonomialBasis> blocks_;
  std::vector<std::vector<int>> block_ids_;  // svec-ordered var ids per block
  std::vector<VarInfo> vars_;
  int num_free_ = 0;
  std::vector<PolyVar> polyvars_;
  std::vector<SosConstraint> constraints_;
  std::map<int, double> objective_;
};

/// Z^T Q Z expanded symbolically.
Polynomial gram_polynomial(const MonomialBasis& Z, const Eigen::MatrixXd& Q);

/// Re-expands every Gram identity with exact polynomial products and checks
/// coefficient mismatch <= 1e-6 * max(1, max |coefficient of expression|)
/// and every Gram matrix's smallest eigenvalue >= -1e-8.
Validation validate(const SosCertificate& cert, const SosProgram& prog);

/// Check of a single identity "expr == Z^T Q Z, Q PSD".
Validation validate_identity(const Polynomial& expr, const MonomialBasis& Z,
                             const Eigen::MatrixXd& Q);

struct SProcedureOptions {
  /// Multipliers whose flag is set vanish at the origin.
  std::vector<bool> no_constant;
  /// When non-negative, every product s_i g_i must have degree <= this.
  int max_degree = -1;
  std::string label;
};

/// Generalized S-procedure: adds sos multipliers s_i of the given even
/// degrees and the constraint g0 - sum s_i g_i in SOS. Returns the constraint
/// index; multiplier PolyVar indices are appended to `multipliers`.
/// Throws std::invalid_argument when the degree budget is exceeded.
int s_procedure(SosProgram& prog, const LinPoly& g0, const std::vector<Polynomial>& gs,
                const std::vector<int>& s_degrees, std::vector<int>* multipliers = nullptr,
                const SProcedureOptions& opts = {});

}  // namespace roa::sos
