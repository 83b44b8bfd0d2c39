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

#include "roa/vsiter.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace roa {

using sos::LinPoly;
using sos::SosProgram;

namespace {

Polynomial sq_norm(int n, double eps) {
  return Polynomial::quadratic_form(eps * Eigen::MatrixXd::Identity(n, n));
}

int round_up_even(int d) { return d <= 0 ? 0 : d + (d % 2); }

struct BisectOutcome {
  bool ok = false;
  double value = 0.0;
  bool capped = false;
  int probes = 0;
};

// Largest probed-feasible value. probe(t) must be monotone in the sense that
// feasibility at t implies feasibility below t (up to solver noise).
BisectOutcome bisect_max(const std::function<bool(double)>& probe, const BisectOptions& o,
                         std::optional<double> start) {
  BisectOutcome out;
  auto test = [&](double t) {
    ++out.probes;
    return probe(t);
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();
  double lo = nan, hi = nan;
  if (start && *start > 0.0 && *start <= o.cap) {
    if (test(*start)) {
      lo = *start;
    } else {
      hi = *start;
    }
  }
  if (std::isnan(lo)) {
    const double p0 = std::isnan(hi) ? o.lo_probe : std::min(o.lo_probe, 0.5 * hi);
    if (!test(p0)) return out;
    lo = p0;
  }
  if (std::isnan(hi)) {
    double t = lo < 1.0 ? 1.0 : 2.0 * lo;
    while (true) {
      if (t >= o.cap) {
        if (lo >= o.cap || test(o.cap)) {
          out.ok = true;
          out.value = o.cap;
          out.capped = true;
          return out;
        }
        hi = o.cap;
        break;
      }
      if (test(t)) {
        lo = t;
        t *= 2.0;
      } else {
        hi = t;
        break;
      }
    }
  }
  while (hi - lo > o.rel_tol * lo) {
    const double mid = hi > 4.0 * lo ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    if (test(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.ok = true;
  out.value = lo;
  return out;
}

Eigen::VectorXd inverse(const Eigen::VectorXd& s) { return s.cwiseInverse(); }

// Multipliers handed to the V-step are re-solved at the accepted level with
// an analytic-center witness, which leaves the V-step room to move.
sdp::SdpOptions centered(sdp::SdpOptions o) {
  o.center = true;
  return o;
}

// The previous V-step's certificates divided by its gamma. In exact
// arithmetic they keep gamma = 1 and, for a fixed shape, the previous beta
// feasible for the normalized V; they stand in when a fresh probe fails
// numerically.
struct Carry {
  bool gamma_ok = false;  // l2 weight >= gamma, so the derivative part carries
  bool beta_ok = false;
  double gamma = 1.0;
  double l2_weight = 1.0;
  double beta = 0.0;
  Polynomial s1, s2;
  GramWitness s1_gram, s2_gram, derivative, containment;
};

void add_note(IterationRecord& rec, const std::string& note) {
  rec.note += (rec.note.empty() ? "" : ",") + note;
}

// Q + c e_m e_m^T for each monomial m; false when one is not in the basis.
bool add_to_diagonal(GramWitness& w, const std::vector<Monomial>& ms, double c) {
  for (const Monomial& m : ms) {
    const auto it = std::find(w.basis.begin(), w.basis.end(), m);
    if (it == w.basis.end()) return false;
    const auto k = it - w.basis.begin();
    w.Q(k, k) += c;
  }
  return true;
}

sos::Validation worst_of(const sos::Validation& a, const sos::Validation& b) {
  sos::Validation v;
  v.ok = a.ok && b.ok;
  v.identity_residual = std::max(a.identity_residual, b.identity_residual);
  v.min_eig = std::min(a.min_eig, b.min_eig);
  return v;
}

std::optional<GammaResult> carried_gamma(const DynSystem& sys, const Polynomial& V, double eps_l,
                                         const Carry& c) {
  if (!c.gamma_ok) return std::nullopt;
  const int n = sys.dim;
  GramWitness d{c.derivative.basis, c.derivative.Q / c.gamma};
  std::vector<Monomial> linear;
  for (int i = 0; i < n; ++i) linear.push_back(Polynomial::variable(n, i).terms().begin()->first);
  if (!add_to_diagonal(d, linear, (c.l2_weight / c.gamma - 1.0) * eps_l)) return std::nullopt;
  const Polynomial expr = -(lie_derivative(V, sys.f) + sq_norm(n, eps_l)) -
                          (Polynomial::constant(n, 1.0) - V) * c.s2;
  const sos::Validation v = worst_of(sos::validate_identity(expr, d.basis, d.Q),
                                     sos::validate_identity(c.s2, c.s2_gram.basis, c.s2_gram.Q));
  if (!v.ok) return std::nullopt;
  GammaResult g;
  g.ok = true;
  g.gamma = 1.0;
  g.s2 = c.s2;
  g.s2_gram = c.s2_gram;
  g.validation = v;
  return g;
}

std::optional<BetaResult> carried_beta(const Polynomial& V, double gamma, const Polynomial& p, const Carry& c) {
  if (!c.beta_ok || gamma < 1.0) return std::nullopt;
  const int n = V.dim();
  GramWitness q{c.containment.basis, c.containment.Q / c.gamma};
  if (!add_to_diagonal(q, {Monomial(std::vector<int>(n, 0))}, gamma - 1.0)) return std::nullopt;
  const Polynomial expr = (Polynomial::constant(n, gamma) - V) - (Polynomial::constant(n, c.beta) - p) * c.s1;
  const sos::Validation v = worst_of(sos::validate_identity(expr, q.basis, q.Q),
                                     sos::validate_identity(c.s1, c.s1_gram.basis, c.s1_gram.Q));
  if (!v.ok) return std::nullopt;
  BetaResult b;
  b.ok = true;
  b.beta = c.beta;
  b.s1 = c.s1;
  b.s1_gram = c.s1_gram;
  b.validation = v;
  return b;
}

}  // namespace

// ---------------------------------------------------------------- systems

DynSystem DynSystem::make(std::string name, VectorField f,
                          std::vector<std::pair<double, double>> domain_box) {
  if (f.empty()) throw std::invalid_argument("DynSystem: empty vector field");
  const int n = static_cast<int>(f.size());
  for (const auto& fi : f) {
    if (fi.dim() != n) throw std::invalid_argument("DynSystem: field dimension mismatch");
    if (fi.coeff(Monomial::one(n)) != 0.0)
      throw std::invalid_argument("DynSystem: f(0) != 0, origin is not an equilibrium");
  }
  if (!domain_box.empty() && static_cast<int>(domain_box.size()) != n)
    throw std::invalid_argument("DynSystem: domain box dimension mismatch");
  DynSystem s;
  s.name = std::move(name);
  s.dim = n;
  s.f = std::move(f);
  s.domain_box = std::move(domain_box);
  s.A = jacobian(s.f, Eigen::VectorXd::Zero(n));
  const Eigen::VectorXcd ev = s.A.eigenvalues();
  for (int i = 0; i < ev.size(); ++i)
    if (!(ev(i).real() < -kHurwitzTol))
      throw std::invalid_argument("DynSystem: Jacobian at the origin is not Hurwitz");
  return s;
}

int DynSystem::degree() const {
  int d = 0;
  for (const auto& fi : f) d = std::max(d, fi.degree());
  return d;
}

DynSystem scale_system(const DynSystem& sys, const Eigen::VectorXd& scale) {
  if (scale.size() != sys.dim) throw std::invalid_argument("scale_system: dimension mismatch");
  DynSystem s = sys;
  for (int i = 0; i < sys.dim; ++i) {
    if (!(scale(i) > 0.0)) throw std::invalid_argument("scale_system: scale must be positive");
    s.f[i] = sys.f[i].scale_vars(scale) * (1.0 / scale(i));
  }
  for (int i = 0; i < static_cast<int>(s.domain_box.size()); ++i) {
    s.domain_box[i].first /= scale(i);
    s.domain_box[i].second /= scale(i);
  }
  s.A = jacobian(s.f, Eigen::VectorXd::Zero(sys.dim));
  return s;
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || Q.rows() != n || Q.cols() != n)
    throw std::invalid_argument("solve_lyapunov: dimension mismatch");
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd At = A.transpose();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n * n, n * n);
  // column-major vec: vec(At P) = (I kron At) vec(P), vec(P A) = (At kron I) vec(P)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      K.block(i * n, j * n, n, n) += I(i, j) * At;
      K.block(i * n, j * n, n, n) += At(i, j) * I;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  if (lu.rank() < n * n) throw std::invalid_argument("solve_lyapunov: singular Lyapunov operator");
  const Eigen::VectorXd q = -Eigen::Map<const Eigen::VectorXd>(Q.data(), n * n);
  Eigen::VectorXd p = lu.solve(q);
  Eigen::MatrixXd P = Eigen::Map<Eigen::MatrixXd>(p.data(), n, n);
  P = (0.5 * (P + P.transpose())).eval();
  Eigen::LLT<Eigen::MatrixXd> llt(P);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("solve_lyapunov: solution is not positive definite");
  return P;
}

Polynomial init_lf(const DynSystem& sys, const Eigen::MatrixXd& Q) {
  const Eigen::MatrixXd Qm = Q.size() == 0 ? Eigen::MatrixXd::Identity(sys.dim, sys.dim) : Q;
  return Polynomial::quadratic_form(solve_lyapunov(sys.A, Qm));
}

ShapeFn ShapeFn::at_origin(const Eigen::MatrixXd& N) {
  return shifted(N, Eigen::VectorXd::Zero(N.rows()));
}

ShapeFn ShapeFn::shifted(const Eigen::MatrixXd& N, const Eigen::VectorXd& center) {
  if (N.rows() != N.cols() || N.rows() != center.size())
    throw std::invalid_argument("ShapeFn: dimension mismatch");
  ShapeFn s{N, center};
  affine_shift_expand(N, center);  // validates symmetric PD
  return s;
}

int default_deg_s1(int deg_V, int deg_p) { return round_up_even(std::max(deg_V - deg_p, 0)); }

int default_deg_s2(int deg_V, int deg_f) {
  const int deg_vdot = deg_V + deg_f - 1;
  return std::max(2, round_up_even(deg_vdot - deg_V));
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::Converged: return "Converged";
    case StopReason::Infeasible: return "Infeasible";
    case StopReason::MaxIter: return "MaxIter";
    case StopReason::InitialInfeasible: return "InitialInfeasible";
    case StopReason::CertificationFailed: return "CertificationFailed";
  }
  return "?";
}

// ---------------------------------------------------------------- steps

GammaResult gamma_step(const DynSystem& sys, const Polynomial& V, int deg_s2, double eps_l,
                       const BisectOptions& bopts, const sdp::SdpOptions& sopts,
                       std::optional<double> start) {
  const int n = sys.dim;
  const Polynomial target = -(lie_derivative(V, sys.f) + sq_norm(n, eps_l));
  GammaResult res;
  double best = -1.0;
  auto probe_with = [&](double g, const sdp::SdpOptions& so_sdp) {
    SosProgram prog(n);
    std::vector<int> mult;
    sos::SProcedureOptions so;
    so.no_constant = {true};
    so.label = "gamma";
    sos::s_procedure(prog, target, {Polynomial::constant(n, g) - V}, {deg_s2}, &mult, so);
    const sos::SosResult r = prog.solve(so_sdp);
    if (r.status != sdp::Status::Feasible) return false;
    const sos::Validation v = sos::validate(*r.certificate, prog);
    if (!v.ok) return false;
    if (g >= best) {
      best = g;
      res.s2 = prog.value(mult[0], *r.certificate);
      res.s2_gram = {prog.polyvar(mult[0]).basis, r.certificate->polyvar_gram[mult[0]]};
      res.cert = *r.certificate;
      res.validation = v;
    }
    return true;
  };
  auto probe = [&](double g) { return probe_with(g, sopts); };
  const BisectOutcome b = bisect_max(probe, bopts, start);
  if (b.ok) probe_with(b.value, centered(sopts));
  res.ok = b.ok;
  res.gamma = b.value;
  res.capped = b.capped;
  res.probes = b.probes;
  return res;
}

BetaResult beta_step(const Polynomial& V, double gamma, const Polynomial& p, int deg_s1,
                     const BisectOptions& bopts, const sdp::SdpOptions& sopts,
                     std::optional<double> start) {
  const int n = V.dim();
  const Polynomial g0 = Polynomial::constant(n, gamma) - V;
  BetaResult res;
  double best = -1.0;
  auto probe_with = [&](double b, const sdp::SdpOptions& so_sdp) {
    SosProgram prog(n);
    std::vector<int> mult;
    sos::SProcedureOptions so;
    so.label = "beta";
    sos::s_procedure(prog, g0, {Polynomial::constant(n, b) - p}, {deg_s1}, &mult, so);
    const sos::SosResult r = prog.solve(so_sdp);
    if (r.status != sdp::Status::Feasible) return false;
    const sos::Validation v = sos::validate(*r.certificate, prog);
    if (!v.ok) return false;
    if (b >= best) {
      best = b;
      res.s1 = prog.value(mult[0], *r.certificate);
      res.s1_gram = {prog.polyvar(mult[0]).basis, r.certificate->polyvar_gram[mult[0]]};
      res.cert = *r.certificate;
      res.validation = v;
    }
    return true;
  };
  auto probe = [&](double b) { return probe_with(b, sopts); };
  const BisectOutcome o = bisect_max(probe, bopts, start);
  if (o.ok) probe_with(o.value, centered(sopts));
  res.ok = o.ok;
  res.beta = o.value;
  res.capped = o.capped;
  res.probes = o.probes;
  return res;
}

std::optional<VStepResult> v_step(const DynSystem& sys, const Polynomial& s1,
                                  const Polynomial& s2, double beta, double gamma,
                                  const Polynomial& p, int deg_V, double eps_l,
                                  const sdp::SdpOptions& sopts, double l2_weight, double gap) {
  const int n = sys.dim;
  SosProgram prog(n);
  const int v = prog.new_free_poly(monomial_basis(n, 2, deg_V));
  const LinPoly& V = prog.poly(v);
  const Polynomial l = sq_norm(n, eps_l);
  const Polynomial g = Polynomial::constant(n, gamma);
  prog.add_sos_constraint(V - l, "V - l1");
  prog.add_sos_constraint(-sos::lie_derivative(V, sys.f) - LinPoly(l * l2_weight) - (g - V) * s2,
                          "derivative");
  prog.add_sos_constraint((g - V) - LinPoly((Polynomial::constant(n, beta) - p) * s1),
                          "containment");

  auto attempt = [&](const sdp::SdpOptions& o, VStepWitness w) -> std::optional<VStepResult> {
    const sos::SosResult r = prog.solve(o);
    if (r.status != sdp::Status::Feasible) return std::nullopt;
    VStepResult out;
    out.validation = sos::validate(*r.certificate, prog);
    if (!out.validation.ok) return std::nullopt;
    out.V = prog.value(v, *r.certificate);
    out.l2_weight = l2_weight;
    out.derivative = {prog.constraint(1).gram_basis, r.certificate->constraint_gram[1]};
    out.containment = {prog.constraint(2).gram_basis, r.certificate->constraint_gram[2]};
    out.cert = *r.certificate;
    out.witness = w;
    return out;
  };

  if (gap > 0.0) {
    // Mean of V over the domain box (unit cube without one), normalized to
    // unit largest weight.
    const bool use_box = static_cast<int>(sys.domain_box.size()) == n;
    const sos::PolyVar& pv = prog.polyvar(v);
    std::vector<double> w(pv.basis.size(), 1.0);
    for (int j = 0; j < pv.basis.size(); ++j) {
      for (int i = 0; i < n; ++i) {
        const double lo = use_box ? sys.domain_box[i].first : -1.0;
        const double hi = use_box ? sys.domain_box[i].second : 1.0;
        const int a = pv.basis[j][i] + 1;
        w[j] *= (std::pow(hi, a) - std::pow(lo, a)) / (a * (hi - lo));
      }
    }
    const double wmax = *std::max_element(w.begin(), w.end(),
                                          [](double x, double y) { return std::abs(x) < std::abs(y); });
    std::map<int, double> obj;
    for (int j = 0; j < pv.basis.size(); ++j)
      if (w[j] != 0.0) obj[pv.var_ids[j]] = w[j] / std::abs(wmax);
    prog.set_objective(obj);
    sdp::SdpOptions o = sopts;
    o.stop_gap = gap;
    auto out = attempt(o, VStepWitness::MinMean);
    prog.set_objective({});
    if (out) return out;
  }
  sdp::SdpOptions o = sopts;
  o.center = true;
  if (auto out = attempt(o, VStepWitness::Center)) return out;
  o.center = false;
  o.early_exit = false;
  return attempt(o, VStepWitness::PhaseOne);
}

LevelCertificate certify_level(const DynSystem& sys, const Polynomial& V, double gamma,
                               int deg_s2, double eps_l, const sdp::SdpOptions& sopts) {
  const int n = sys.dim;
  const Polynomial l = sq_norm(n, eps_l);
  SosProgram prog(n);
  LevelCertificate out;
  if (V.degree() < 2 || V.degree() % 2 != 0) return out;
  prog.add_sos_constraint(V - l, "V - l1");
  std::vector<int> mult;
  sos::SProcedureOptions so;
  so.no_constant = {true};
  so.label = "derivative";
  sos::s_procedure(prog, -(lie_derivative(V, sys.f) + l), {Polynomial::constant(n, gamma) - V},
                   {deg_s2}, &mult, so);
  const sos::SosResult r = prog.solve(sopts);
  if (r.status != sdp::Status::Feasible) return out;
  out.validation = sos::validate(*r.certificate, prog);
  out.ok = out.validation.ok;
  out.cert = *r.certificate;
  out.s2 = prog.value(mult[0], *r.certificate);
  out.bases = {prog.constraint(0).gram_basis, prog.constraint(1).gram_basis,
               prog.polyvar(mult[0]).basis};
  return out;
}

std::string IterationRecord::to_line() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "iter=%d gamma=%.6g beta=%.6g gamma_probes=%d beta_probes=%d v_feasible=%d "
                "max_residual=%.3g min_eig=%.3g",
                iter, gamma, beta, gamma_probes, beta_probes, v_feasible ? 1 : 0, max_residual,
                min_eig);
  std::string s = buf;
  if (!note.empty()) s += " note=" + note;
  return s;
}

// ---------------------------------------------------------------- iteration

Eigen::VectorXd level_set_scale(const Polynomial& V) {
  const Eigen::MatrixXd P = quadratic_matrix(V);
  Eigen::LLT<Eigen::MatrixXd> llt(P);
  if (llt.info() != Eigen::Success) return {};
  const Eigen::MatrixXd Pinv = llt.solve(Eigen::MatrixXd::Identity(P.rows(), P.cols()));
  return Pinv.diagonal().cwiseSqrt();
}

Certificate run_vs(const DynSystem& sys_in, const Polynomial& V0_in, const ShapeFn& p0_in,
                   const VsOptions& opts, const IterationCallback& on_iter) {
  if (opts.deg_V < 2 || opts.deg_V % 2 != 0)
    throw std::invalid_argument("run_vs: deg_V must be even and >= 2");
  if (V0_in.dim() != sys_in.dim || p0_in.dim() != sys_in.dim)
    throw std::invalid_argument("run_vs: dimension mismatch");

  const int n = sys_in.dim;
  Eigen::VectorXd scale = opts.scale;
  if (scale.size() == 0 && opts.auto_scale) scale = level_set_scale(V0_in);
  const bool scaled = scale.size() > 0;
  if (!scaled) scale = Eigen::VectorXd::Ones(n);
  const DynSystem sys = scaled ? scale_system(sys_in, scale) : sys_in;
  Polynomial V = scaled ? V0_in.scale_vars(scale) : V0_in;
  ShapeFn shape = p0_in;
  if (scaled) {
    shape.N = scale.asDiagonal() * p0_in.N * scale.asDiagonal();
    shape.center = p0_in.center.cwiseQuotient(scale);
  }
  Polynomial p = shape.poly();

  const int ds2 = opts.deg_s2 >= 0 ? opts.deg_s2 : default_deg_s2(opts.deg_V, sys.degree());
  const int ds1 = opts.deg_s1 >= 0 ? opts.deg_s1 : default_deg_s1(opts.deg_V, 2);

  Certificate cert;
  cert.stop_reason = StopReason::MaxIter;
  cert.scale = scale;
  cert.eps_l = opts.eps_l;
  cert.final_deg_s2 = ds2;

  std::optional<double> beta_prev;
  std::optional<double> gamma_start;
  Carry carry;
  bool stopped = false;
  for (int it = 1; it <= opts.max_iter && !stopped; ++it) {
    IterationRecord rec;
    rec.iter = it;
    GammaResult g = gamma_step(sys, V, ds2, opts.eps_l, opts.gamma, opts.sdp, gamma_start);
    if (!g.ok || g.gamma < 1.0) {
      if (auto cg = carried_gamma(sys, V, opts.eps_l, carry)) {
        cg->probes = g.probes;
        g = std::move(*cg);
        add_note(rec, "gamma_carried");
      }
    }
    rec.gamma_probes = g.probes;
    if (!g.ok) {
      cert.stop_reason = it == 1 ? StopReason::InitialInfeasible : StopReason::Infeasible;
      add_note(rec, "gamma_infeasible");
      cert.log.push_back(rec);
      if (on_iter) on_iter(rec);
      break;
    }
    rec.gamma = g.gamma;
    if (g.capped) cert.globally_stable = true;

    BetaResult b = beta_step(V, g.gamma, p, ds1, opts.beta, opts.sdp, beta_prev);
    if (!b.ok || b.beta < carry.beta) {
      if (auto cb = carried_beta(V, g.gamma, p, carry)) {
        cb->probes = b.probes;
        b = std::move(*cb);
        add_note(rec, "beta_carried");
      }
    }
    rec.beta_probes = b.probes;
    if (!b.ok) {
      cert.stop_reason = it == 1 ? StopReason::InitialInfeasible : StopReason::Infeasible;
      add_note(rec, "beta_infeasible");
      V = V * (1.0 / g.gamma);
      cert.log.push_back(rec);
      if (on_iter) on_iter(rec);
      break;
    }
    rec.beta = b.beta;
    if (b.capped) cert.shape_exhausted = true;
    cert.beta_history.push_back(b.beta);
    rec.max_residual = std::max(g.validation.identity_residual, b.validation.identity_residual);
    rec.min_eig = std::min(g.validation.min_eig, b.validation.min_eig);

    // Weight gamma keeps V / gamma feasible at the next start gamma = 1; weight
    // one keeps the current V feasible, so it is the fallback.
    auto vs = v_step(sys, b.s1, g.s2, b.beta, g.gamma, p, opts.deg_V, opts.eps_l, opts.sdp,
                     std::max(1.0, g.gamma), opts.v_gap);
    if (!vs && g.gamma > 1.0)
      vs = v_step(sys, b.s1, g.s2, b.beta, g.gamma, p, opts.deg_V, opts.eps_l, opts.sdp, 1.0,
                  opts.v_gap);
    if (!vs) {
      V = V * (1.0 / g.gamma);
      cert.stop_reason = StopReason::Infeasible;
      add_note(rec, "v_infeasible");
      stopped = true;
    } else {
      rec.v_feasible = true;
      carry.gamma = g.gamma;
      carry.l2_weight = vs->l2_weight;
      carry.gamma_ok = vs->l2_weight >= g.gamma;
      carry.beta_ok = !opts.adaptive_shape;
      carry.beta = b.beta;
      carry.s1 = b.s1 * (1.0 / g.gamma);
      carry.s1_gram = {b.s1_gram.basis, b.s1_gram.Q / g.gamma};
      carry.s2 = g.s2;
      carry.s2_gram = g.s2_gram;
      carry.derivative = vs->derivative;
      carry.containment = vs->containment;
      if (vs->witness != (opts.v_gap > 0.0 ? VStepWitness::MinMean : VStepWitness::Center))
        add_note(rec, vs->witness == VStepWitness::Center ? "v_center" : "v_phase1");
      rec.max_residual = std::max(rec.max_residual, vs->validation.identity_residual);
      rec.min_eig = std::min(rec.min_eig, vs->validation.min_eig);
      V = vs->V * (1.0 / g.gamma);
      if (opts.adaptive_shape) {
        const Eigen::MatrixXd M = quadratic_matrix(V);
        Eigen::LLT<Eigen::MatrixXd> llt(M);
        if (llt.info() == Eigen::Success && sdp::min_eigenvalue(M) > 0.0) {
          shape = ShapeFn{M, Eigen::VectorXd::Zero(n)};
          p = V.quadratic_part();
        } else {
          cert.shape_not_pd = true;
          add_note(rec, "shape_not_pd");
        }
      }
      if (beta_prev && std::abs(*beta_prev - b.beta) / b.beta < opts.eps_tol) {
        cert.stop_reason = StopReason::Converged;
        stopped = true;
      }
    }
    beta_prev = b.beta;
    gamma_start = 1.0;
    cert.iterations_used = it;
    cert.log.push_back(rec);
    if (on_iter) on_iter(rec);
  }

  // Re-certify the normalized level set; rescale if level 1 is out of reach.
  if (cert.stop_reason != StopReason::InitialInfeasible) {
    LevelCertificate lc = certify_level(sys, V, 1.0, ds2, opts.eps_l, opts.sdp);
    if (!lc.ok) {
      const GammaResult g = gamma_step(sys, V, ds2, opts.eps_l, opts.gamma, opts.sdp);
      if (g.ok) {
        V = V * (1.0 / g.gamma);
        lc = certify_level(sys, V, 1.0, ds2, opts.eps_l, opts.sdp);
      }
    }
    if (lc.ok) {
      cert.final_s2 = lc.s2;
      cert.final_witness = lc.cert;
      cert.final_validation = lc.validation;
      cert.final_bases = lc.bases;
    } else {
      cert.final_validation = lc.validation;
      cert.final_validation.ok = false;
      cert.stop_reason = StopReason::CertificationFailed;
    }
  }

  cert.V_scaled = V;
  cert.V = scaled ? V.scale_vars(inverse(scale)) : V;
  if (scaled) {
    shape.N = inverse(scale).asDiagonal() * shape.N * inverse(scale).asDiagonal();
    shape.center = shape.center.cwiseProduct(scale);
  }
  cert.p = shape.poly();
  return cert;
}

Certificate run_a1(const DynSystem& sys, const Polynomial& V0, const ShapeFn& p0, VsOptions opts,
                   const IterationCallback& on_iter) {
  opts.adaptive_shape = false;
  return run_vs(sys, V0, p0, opts, on_iter);
}

Certificate run_a2(const DynSystem& sys, const Polynomial& V0, const ShapeFn& p0, VsOptions opts,
                   const IterationCallback& on_iter) {
  opts.adaptive_shape = true;
  return run_vs(sys, V0, p0, opts, on_iter);
}

}  // namespace roa
