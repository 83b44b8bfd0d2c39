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

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "roa/poly.hpp"
#include "roa/sdp.hpp"
#include "roa/sos.hpp"

namespace roa {

/// Polynomial vector field with an equilibrium at the origin whose
/// linearization is Hurwitz.
struct DynSystem {
  std::string name;
  int dim = 0;
  VectorField f;
  /// Per-axis [lo, hi] used for sampling and plots.
  std::vector<std::pair<double, double>> domain_box;
  Eigen::MatrixXd A;  // Jacobian at the origin

  /// Validates f(0) = 0 and that A is Hurwitz (real parts < -1e-9).
  /// Throws std::invalid_argument otherwise.
  static DynSystem make(std::string name, VectorField f,
                        std::vector<std::pair<double, double>> domain_box = {});

  int degree() const;
};

inline constexpr double kHurwitzTol = 1e-9;

/// P with A^T P + P A = -Q, via the Kronecker-vectorized linear system.
/// Throws unless P comes out symmetric positive definite.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q);

/// V0 = x^T P x with A^T P + P A = -Q (Q = I when empty).
Polynomial init_lf(const DynSystem& sys, const Eigen::MatrixXd& Q = {});

/// Ellipsoidal shape (x - center)^T N (x - center).
struct ShapeFn {
  Eigen::MatrixXd N;
  Eigen::VectorXd center;

  static ShapeFn at_origin(const Eigen::MatrixXd& N);
  static ShapeFn shifted(const Eigen::MatrixXd& N, const Eigen::VectorXd& center);
  int dim() const { return static_cast<int>(N.rows()); }
  Polynomial poly() const { return affine_shift_expand(N, center); }
};

struct BisectOptions {
  double lo_probe = 1e-4;  // failure here means the step is infeasible from the start
  double cap = 1e3;        // stop doubling here and flag
  double rel_tol = 1e-3;
};

struct VsOptions {
  int deg_V = 4;
  int deg_s1 = -1;  // -1: max(deg V - deg p, 0) rounded up to even
  int deg_s2 = -1;  // -1: deg Vdot - deg V rounded up to even, at least 2
  double eps_l = 1e-6;  // l1 = l2 = eps_l * x^T x
  double eps_tol = 1e-3;
  int max_iter = 30;
  bool adaptive_shape = false;  // Algorithm with p <- quadratic part of V
  BisectOptions gamma{1e-4, 1e3, 1e-3};
  BisectOptions beta{1e-6, 1e4, 1e-3};
  sdp::SdpOptions sdp;
  /// State scaling x = scale .* xi for the optimization. The returned V is
  /// always expressed in x. When empty and `auto_scale` is set, scale_i is the
  /// half-width of the box around {V0 <= 1}.
  Eigen::VectorXd scale;
  bool auto_scale = true;
  /// V-step witness selection, see v_step. 0 uses the analytic center.
  double v_gap = 0.1;
};

/// sqrt(diag(P^-1)) for the quadratic part P of V; empty unless P is PD.
Eigen::VectorXd level_set_scale(const Polynomial& V);

int default_deg_s1(int deg_V, int deg_p);
int default_deg_s2(int deg_V, int deg_f);

enum class StopReason { Converged, Infeasible, MaxIter, InitialInfeasible, CertificationFailed };
std::string to_string(StopReason r);

/// Gram matrix Q of a polynomial Z^T Q Z.
struct GramWitness {
  MonomialBasis basis;
  Eigen::MatrixXd Q;
};

struct GammaResult {
  bool ok = false;
  double gamma = 0.0;
  bool capped = false;  // feasible at the cap: globally stable as far as probed
  int probes = 0;
  Polynomial s2;
  GramWitness s2_gram;
  sos::SosCertificate cert;
  sos::Validation validation;
};

struct BetaResult {
  bool ok = false;
  double beta = 0.0;
  bool capped = false;  // shape exhausted
  int probes = 0;
  Polynomial s1;
  GramWitness s1_gram;
  sos::SosCertificate cert;
  sos::Validation validation;
};

/// Which feasible point a V-step returned.
enum class VStepWitness {
  MinMean,   // central-path point of min mean(V) over the domain box
  Center,    // analytic center of the feasible set
  PhaseOne,  // phase-I optimum
};

struct VStepResult {
  Polynomial V;
  VStepWitness witness = VStepWitness::Center;
  double l2_weight = 1.0;
  GramWitness derivative, containment;
  sos::SosCertificate cert;
  sos::Validation validation;
};

/// Largest gamma with -(Vdot + l2) - (gamma - V) s2 SOS, s2 SOS without a
/// constant term. `start` is probed first when given.
GammaResult gamma_step(const DynSystem& sys, const Polynomial& V, int deg_s2, double eps_l,
                       const BisectOptions& bopts, const sdp::SdpOptions& sopts,
                       std::optional<double> start = std::nullopt);

/// Largest beta with (gamma - V) - (beta - p) s1 SOS, s1 SOS.
BetaResult beta_step(const Polynomial& V, double gamma, const Polynomial& p, int deg_s1,
                     const BisectOptions& bopts, const sdp::SdpOptions& sopts,
                     std::optional<double> start = std::nullopt);

/// New V over monomials of degree 2..deg_V with the multipliers fixed.
/// `l2_weight` multiplies l2 in the derivative constraint. With gap > 0 the
/// first attempt minimizes the mean of V over sys.domain_box and stops at
/// that relative duality gap; the analytic center and then phase-I are the
/// fallbacks.
std::optional<VStepResult> v_step(const DynSystem& sys, const Polynomial& s1,
                                  const Polynomial& s2, double beta, double gamma,
                                  const Polynomial& p, int deg_V, double eps_l,
                                  const sdp::SdpOptions& sopts, double l2_weight = 1.0,
                                  double gap = 0.0);

/// Single program certifying V - l1 SOS and the derivative condition on
/// {V <= gamma}; returns the certificate when both validate.
/// Gram bases of a level certificate: V - l1, the derivative condition and
/// the multiplier s2.
struct LevelBases {
  MonomialBasis v, derivative, s2;
};

struct LevelCertificate {
  bool ok = false;
  LevelBases bases;
  Polynomial s2;
  sos::SosCertificate cert;
  sos::Validation validation;
};
LevelCertificate certify_level(const DynSystem& sys, const Polynomial& V, double gamma,
                               int deg_s2, double eps_l, const sdp::SdpOptions& sopts);

struct IterationRecord {
  int iter = 0;
  double gamma = 0.0;
  double beta = 0.0;
  int gamma_probes = 0;
  int beta_probes = 0;
  bool v_feasible = false;
  double max_residual = 0.0;  // over the certificates of this iteration
  double min_eig = 0.0;
  std::string note;

  /// "iter=3 gamma=1.02 beta=0.53 ..." one line, no newline.
  std::string to_line() const;
};

/// Optimized Lyapunov function with certified set {V < 1}.
struct Certificate {
  Polynomial V;   // in the original coordinates
  Polynomial p;   // final shape function
  std::vector<double> beta_history;
  std::vector<IterationRecord> log;
  int iterations_used = 0;
  StopReason stop_reason = StopReason::MaxIter;
  bool globally_stable = false;
  bool shape_exhausted = false;
  bool shape_not_pd = false;  // adaptive update skipped at least once

  /// Witness for V - l1 SOS and the derivative condition at level 1, in the
  /// optimization coordinates (xi = x ./ scale).
  Polynomial V_scaled;
  Eigen::VectorXd scale;
  Polynomial final_s2;
  sos::SosCertificate final_witness;
  sos::Validation final_validation;
  LevelBases final_bases;
  int final_deg_s2 = 0;
  double eps_l = 0.0;

  bool certified() const { return final_validation.ok; }
};

using IterationCallback = std::function<void(const IterationRecord&)>;

/// V-s iteration from V0 with shape p0.
Certificate run_vs(const DynSystem& sys, const Polynomial& V0, const ShapeFn& p0,
                   const VsOptions& opts, const IterationCallback& on_iter = {});

/// Fixed shape.
Certificate run_a1(const DynSystem& sys, const Polynomial& V0, const ShapeFn& p0,
                   VsOptions opts, const IterationCallback& on_iter = {});
/// Shape replaced by the quadratic part of each new V.
Certificate run_a2(const DynSystem& sys, const Polynomial& V0, const ShapeFn& p0,
                   VsOptions opts, const IterationCallback& on_iter = {});

/// Change of coordinates x = scale .* xi applied to a field.
DynSystem scale_system(const DynSystem& sys, const Eigen::VectorXd& scale);

}  // namespace roa
