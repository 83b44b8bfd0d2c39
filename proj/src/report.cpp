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

#include "roa/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace roa {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string vec_str(const Eigen::VectorXd& v) {
  std::string s = "(";
  for (int i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt6(v(i));
  return s + ")";
}

std::string mat_str(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return "identity";
  std::string s = "[";
  for (int i = 0; i < M.rows(); ++i) {
    s += i ? "; " : "";
    for (int k = 0; k < M.cols(); ++k) s += (k ? " " : "") + fmt6(M(i, k));
  }
  return s + "]";
}

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json basis_json(const MonomialBasis& Z) {
  json out = json::array();
  for (const Monomial& m : Z) out.push_back(m.exponents());
  return out;
}

MonomialBasis basis_from_json(const json& j, int dim) {
  std::vector<Monomial> ms;
  for (const json& e : j) ms.emplace_back(e.get<std::vector<int>>());
  return MonomialBasis(dim, ms);
}

Polynomial sq_norm(int n, double eps) {
  Polynomial l(n);
  for (int i = 0; i < n; ++i) l.add_term(Monomial::var(n, i, 2), eps);
  return l;
}

// Box around a set from the extents of its sublevel pieces.
oracle::Box extent_of(const std::vector<Polynomial>& Vs) {
  oracle::Box box;
  for (const Polynomial& V : Vs) {
    const oracle::Box b = oracle::ray_bounding_box(V, 400, 0.0);
    if (box.empty()) {
      box = b;
      continue;
    }
    for (size_t i = 0; i < b.size(); ++i) {
      box[i].first = std::min(box[i].first, b[i].first);
      box[i].second = std::max(box[i].second, b[i].second);
    }
  }
  return box;
}

double reach(const oracle::Box& box, const Eigen::VectorXd& from) {
  double r2 = 0.0;
  for (size_t i = 0; i < box.size(); ++i) {
    const double d = std::max(std::abs(box[i].first - from(i)), std::abs(box[i].second - from(i)));
    r2 += d * d;
  }
  return std::sqrt(r2);
}

}  // namespace

std::string SoundnessGate::to_line() const {
  std::ostringstream os;
  os << "gate " << label << " " << (passed() ? "PASS" : "FAIL") << " symbolic=" << (symbolic ? 1 : 0)
     << " residual=" << fmt6(identity_residual) << " min_eig=" << fmt6(min_eig)
     << " vdot=" << (vdot ? 1 : 0) << " worst_vdot=" << fmt6(worst_vdot) << " (" << vdot_samples
     << " samples) simulation=" << (simulation ? 1 : 0) << " converged=" << converged << "/"
     << simulated;
  return os.str();
}

SoundnessGate check_soundness(const DynSystem& sys, const Certificate& cert, std::string label,
                              const OracleSettings& o, std::uint64_t seed) {
  SoundnessGate g;
  g.label = std::move(label);
  g.identity_residual = cert.final_validation.identity_residual;
  g.min_eig = cert.final_validation.min_eig;
  g.symbolic = cert.certified() && g.min_eig >= -sos::kGramEigTol;
  if (cert.V.is_zero()) return g;
  const oracle::VdotCheck vc = oracle::vdot_sample_check(sys, cert.V, o.vdot_samples, seed);
  g.worst_vdot = vc.worst;
  g.vdot_samples = vc.accepted;
  g.vdot = vc.accepted > 0 && vc.worst < 0.0;
  const std::vector<Eigen::VectorXd> pts = oracle::sample_sublevel(cert.V, o.sim_samples, seed + 1, 0.99);
  const CompiledField f(sys.f);
  for (const Eigen::VectorXd& x : pts) {
    ++g.simulated;
    if (oracle::simulate(f, x, o.sim).outcome == oracle::SimOutcome::Converged) ++g.converged;
  }
  g.simulation = g.simulated > 0 && g.converged >= 0.99 * static_cast<double>(g.simulated);
  return g;
}

std::string RunResult::set_id(int node) const { return "omega" + tree.nodes.at(node).label(); }

RunResult run_pipeline(const RunConfig& cfg, const LogFn& log) {
  RunResult r;
  r.cfg = cfg;
  const bench::BenchmarkCase& b = cfg.problem;
  auto say = [&](const std::string& s) {
    if (log) log(s);
  };
  const bench::Algorithm base_alg =
      cfg.algorithm == bench::Algorithm::Rcomssf ? b.base : cfg.algorithm;
  say("base " + bench::to_string(base_alg) + " on " + b.name);
  auto on_iter = [&](const IterationRecord& rec) { say("  " + rec.to_line()); };
  const Certificate base = base_alg == bench::Algorithm::A2
                               ? run_a2(b.sys, b.V0, b.p0, cfg.vs, on_iter)
                               : run_a1(b.sys, b.V0, b.p0, cfg.vs, on_iter);
  say("base stop: " + to_string(base.stop_reason));

  if (cfg.algorithm == bench::Algorithm::Rcomssf && base.certified()) {
    RcomssfOptions ro;
    ro.vs = cfg.branch_vs;
    ro.eps_rho = cfg.eps_rho;
    ro.threads = cfg.threads;
    r.tree = run_rcomssf(b.sys, base, b.plan, ro, [&](const ShiftNode& n) {
      say("node " + n.label() + " center=" + vec_str(n.center) + (n.ok ? " ok" : " failed: " + n.diagnostic));
    });
  } else {
    r.tree.nodes.push_back(make_root(base));
  }

  std::vector<Polynomial> Vs;
  std::vector<std::string> labels;
  for (int i : r.tree.accepted()) {
    Vs.push_back(r.tree.nodes[i].cert.V);
    labels.push_back(r.set_id(i));
  }

  if (base.stop_reason == StopReason::InitialInfeasible) {
    r.exit_code = kExitInitialInfeasible;
    r.failure = "initial infeasibility: the first gamma or beta step has no certificate";
    return r;
  }
  if (!base.certified()) {
    r.exit_code = kExitSolver;
    r.failure = "base certificate: " + to_string(base.stop_reason);
    return r;
  }

  r.composed = compose_union(Vs, cfg.tau, labels);
  const oracle::Box& box = b.sys.domain_box;
  r.node_areas.resize(r.tree.nodes.size());
  for (int i : r.tree.accepted()) {
    const CompiledPolynomial cv(r.tree.nodes[i].cert.V);
    r.node_areas[i] = oracle::mc_measure([&](const Eigen::VectorXd& x) { return cv.eval(x) < 1.0; },
                                         box, cfg.oracle.mc_samples, cfg.seed);
  }
  r.base_area = r.node_areas[0];
  const RPtr R = r.composed;
  r.union_area = oracle::mc_measure([&](const Eigen::VectorXd& x) { return r_eval(R, x) > 0.0; }, box,
                                    cfg.oracle.mc_samples, cfg.seed);

  if (cfg.algorithm == bench::Algorithm::A2) {
    say("reference a1 on " + b.name);
    const Certificate ref = run_a1(b.sys, b.V0, b.p0, cfg.vs);
    if (ref.certified()) {
      const CompiledPolynomial cv(ref.V);
      r.a1_reference = oracle::mc_measure([&](const Eigen::VectorXd& x) { return cv.eval(x) < 1.0; }, box,
                                          cfg.oracle.mc_samples, cfg.seed);
    }
  }

  for (int i : r.tree.accepted()) {
    r.gates.push_back(check_soundness(b.sys, r.tree.nodes[i].cert, r.set_id(i), cfg.oracle, cfg.seed));
    say(r.gates.back().to_line());
    if (!r.gates.back().passed() && r.exit_code == kExitOk) {
      r.exit_code = kExitSoundness;
      r.failure = "soundness gate failed for " + r.gates.back().label;
    }
  }
  return r;
}

std::string render_report(const RunResult& r) {
  std::ostringstream os;
  const bench::BenchmarkCase& b = r.cfg.problem;
  os << "system " << b.name << " dim=" << b.sys.dim << "\n";
  for (int i = 0; i < b.sys.dim; ++i) os << "  f" << i + 1 << " = " << b.sys.f[i].to_string() << "\n";
  os << "algorithm " << bench::to_string(r.cfg.algorithm);
  if (r.cfg.algorithm == bench::Algorithm::Rcomssf) os << " base=" << bench::to_string(b.base);
  os << " deg_V=" << b.deg_V << " N_I=" << b.N_I << " branch_N_I=" << b.branch_N_I
     << " eps_tol=" << fmt6(r.cfg.vs.eps_tol) << " tau=" << fmt6(r.cfg.tau) << " seed=" << r.cfg.seed
     << "\n";
  os << "V0 = " << b.V0.to_string() << "\n";
  os << "p0 = " << b.p0.poly().to_string() << "\n\n";

  for (size_t i = 0; i < r.tree.nodes.size(); ++i) {
    const ShiftNode& n = r.tree.nodes[i];
    const Certificate& c = n.cert;
    os << "set " << r.set_id(static_cast<int>(i)) << (n.ok ? " certified" : " failed") << "\n";
    if (i > 0) {
      os << "  parent omega" << r.tree.nodes[n.parent].label() << " center=" << vec_str(n.center)
         << " N=" << mat_str(n.N) << "\n";
      os << "  rho_before=" << fmt6(n.rho_before) << " rho_after=" << fmt6(n.rho_after)
         << " further_shift=" << (n.further_shift ? 1 : 0) << "\n";
    }
    if (!n.diagnostic.empty()) os << "  diagnostic: " << n.diagnostic << "\n";
    if (c.log.empty() && i > 0) continue;
    os << "  stop=" << to_string(c.stop_reason) << " iterations=" << c.iterations_used
       << " globally_stable=" << c.globally_stable << " shape_exhausted=" << c.shape_exhausted << "\n";
    for (const IterationRecord& rec : c.log) os << "  " << rec.to_line() << "\n";
    os << "  beta_history";
    for (double v : c.beta_history) os << " " << fmt6(v);
    os << "\n  V = " << c.V.to_string() << "\n";
    os << "  p = " << c.p.to_string() << "\n";
    os << "  validation ok=" << c.final_validation.ok << " residual=" << fmt6(c.final_validation.identity_residual)
       << " min_eig=" << fmt6(c.final_validation.min_eig) << "\n\n";
  }

  if (r.composed) os << "R_e = " << to_string(*r.composed) << "\n\n";

  const long ns = r.cfg.oracle.mc_samples;
  auto area_line = [&](const std::string& id, const oracle::Measure& m) {
    os << "area " << id << " " << fmt6(m.measure) << " " << fmt6(m.stderr_) << " samples=" << ns
       << " seed=" << r.cfg.seed << "\n";
  };
  if (r.composed) {
    std::vector<Polynomial> all;
    for (int i : r.tree.accepted()) {
      area_line(r.set_id(i), r.node_areas[i]);
      all.push_back(r.tree.nodes[i].cert.V);
    }
    area_line("omega_e", r.union_area);
    if (r.a1_reference) {
      area_line("a1_reference", *r.a1_reference);
      const double d = r.base_area.measure - r.a1_reference->measure;
      const double s3 = 3.0 * std::hypot(r.base_area.stderr_, r.a1_reference->stderr_);
      os << "a2_vs_a1 " << (std::abs(d) <= s3 ? "tie" : d > 0.0 ? "larger" : "smaller") << " diff=" << fmt6(d)
         << " 3sigma=" << fmt6(s3) << "\n";
    }
    auto extent_lines = [&](const std::string& id, const oracle::Box& bx) {
      for (size_t k = 0; k < bx.size(); ++k)
        os << "extent " << id << " x" << k + 1 << " " << fmt6(bx[k].first) << " " << fmt6(bx[k].second) << "\n";
    };
    extent_lines("omega0", extent_of({r.tree.nodes[0].cert.V}));
    extent_lines("omega_e", extent_of(all));
    os << "\n";
  }

  for (const SoundnessGate& g : r.gates) os << g.to_line() << "\n";
  os << "exit " << r.exit_code;
  if (!r.failure.empty()) os << " " << r.failure;
  os << "\n";
  return os.str();
}

std::vector<ContourPoint> ray_contour(const std::function<bool(const Eigen::VectorXd&)>& inside,
                                      const Eigen::VectorXd& origin, int a, int b, int rays,
                                      double tmax) {
  constexpr int kScan = 1000;
  std::vector<ContourPoint> out;
  for (int k = 0; k < rays; ++k) {
    const double th = 2.0 * std::numbers::pi * k / rays;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(origin.size());
    u(a) = std::cos(th);
    u(b) = std::sin(th);
    bool prev = inside(origin);
    double tprev = 0.0;
    for (int s = 1; s <= kScan; ++s) {
      const double t = tmax * s / kScan;
      const bool cur = inside(origin + t * u);
      if (cur != prev) {
        double lo = tprev, hi = t;
        for (int it = 0; it < 50 && hi - lo > 1e-10 * tmax; ++it) {
          const double mid = 0.5 * (lo + hi);
          (inside(origin + mid * u) == prev ? lo : hi) = mid;
        }
        out.push_back({k, origin + 0.5 * (lo + hi) * u});
      }
      prev = cur;
      tprev = t;
    }
  }
  return out;
}

void write_contours(const RunResult& r, const std::string& dir) {
  fs::create_directories(dir);
  const int n = r.cfg.problem.sys.dim;
  const int rays = r.cfg.oracle.contour_rays;
  std::vector<std::pair<int, int>> planes;
  std::vector<std::string> suffix;
  if (n == 2) {
    planes = {{0, 1}};
    suffix = {""};
  } else {
    for (int fixed = 0; fixed < n; ++fixed) {
      std::vector<int> ax;
      for (int i = 0; i < n; ++i)
        if (i != fixed) ax.push_back(i);
      if (ax.size() != 2) break;
      planes.emplace_back(ax[0], ax[1]);
      suffix.push_back("_x" + std::to_string(fixed + 1) + "_0");
    }
  }
  std::string header = "dir_index";
  for (int i = 0; i < n; ++i) header += ",x" + std::to_string(i + 1);
  header += ",set_id\n";

  std::vector<Polynomial> all;
  for (int i : r.tree.accepted()) all.push_back(r.tree.nodes[i].cert.V);
  const double tmax = 1.05 * reach(extent_of(all), Eigen::VectorXd::Zero(n)) * 2.0;

  auto emit = [&](const std::string& id, const std::function<bool(const Eigen::VectorXd&)>& inside,
                  Eigen::VectorXd origin) {
    for (size_t p = 0; p < planes.size(); ++p) {
      const auto [a, b] = planes[p];
      Eigen::VectorXd o = origin;
      if (n > 2)
        for (int i = 0; i < n; ++i)
          if (i != a && i != b) o(i) = 0.0;
      std::ofstream out(dir + "/" + id + suffix[p] + ".csv");
      out << header;
      if (!inside(o)) continue;  // the section misses the set's center
      for (const ContourPoint& cp : ray_contour(inside, o, a, b, rays, tmax)) {
        out << cp.dir_index;
        for (int i = 0; i < n; ++i) out << "," << fmt6(cp.x(i));
        out << "," << id << "\n";
      }
    }
  };
  for (int i : r.tree.accepted()) {
    const ShiftNode& node = r.tree.nodes[i];
    const CompiledPolynomial cv(node.cert.V);
    emit(r.set_id(i), [&](const Eigen::VectorXd& x) { return cv.eval(x) < 1.0; },
         i == 0 ? Eigen::VectorXd::Zero(n) : node.center);
  }
  if (r.composed) {
    const RPtr R = r.composed;
    emit("omega_e", [&](const Eigen::VectorXd& x) { return r_eval(R, x) > 0.0; }, Eigen::VectorXd::Zero(n));
  }
}

json certs_to_json(const RunResult& r) {
  const DynSystem& sys = r.cfg.problem.sys;
  json f = json::array();
  for (const Polynomial& p : sys.f) f.push_back(poly_to_json(p));
  json certs = json::array();
  for (int i : r.tree.accepted()) {
    const Certificate& c = r.tree.nodes[i].cert;
    const sos::SosCertificate& w = c.final_witness;
    if (w.constraint_gram.size() < 2 || w.polyvar_gram.empty()) continue;
    certs.push_back({
        {"label", r.set_id(i)},
        {"V", poly_to_json(c.V)},
        {"scale", vec_json(c.scale)},
        {"eps_l", c.eps_l},
        {"V_scaled", poly_to_json(c.V_scaled)},
        {"s2", poly_to_json(c.final_s2)},
        {"gram_V", {{"basis", basis_json(c.final_bases.v)}, {"Q", matrix_to_json(w.constraint_gram[0])}}},
        {"gram_derivative",
         {{"basis", basis_json(c.final_bases.derivative)}, {"Q", matrix_to_json(w.constraint_gram[1])}}},
        {"gram_s2", {{"basis", basis_json(c.final_bases.s2)}, {"Q", matrix_to_json(w.polyvar_gram[0])}}},
    });
  }
  return {{"format", "roa-certs-1"},
          {"dim", sys.dim},
          {"f", f},
          {"level", 1.0},
          {"conditions",
           {"V_scaled - eps_l |xi|^2 = Z^T Q_V Z",
            "-(dV_scaled/dxi . f_scaled + eps_l |xi|^2) - s2 (level - V_scaled) = Z^T Q_derivative Z",
            "s2 = Z^T Q_s2 Z", "x = scale .* xi", "Q_* PSD"}},
          {"certificates", certs}};
}

std::vector<CertCheck> validate_certs(const json& doc) {
  std::vector<CertCheck> out;
  const int n = doc.at("dim").get<int>();
  VectorField f;
  for (const json& p : doc.at("f")) f.push_back(poly_from_json(p, n));
  const double level = doc.value("level", 1.0);
  for (const json& jc : doc.at("certificates")) {
    CertCheck chk;
    chk.label = jc.at("label").get<std::string>();
    std::ostringstream detail;
    try {
      const Eigen::VectorXd scale = [&] {
        const auto v = jc.at("scale").get<std::vector<double>>();
        return v.empty() ? Eigen::VectorXd(Eigen::VectorXd::Ones(n))
                         : Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), n));
      }();
      const double eps_l = jc.at("eps_l").get<double>();
      const Polynomial V = poly_from_json(jc.at("V"), n);
      const Polynomial Vs = poly_from_json(jc.at("V_scaled"), n);
      const Polynomial s2 = poly_from_json(jc.at("s2"), n);
      // The scaled and unscaled V must describe the same function.
      const Polynomial diff = V.scale_vars(scale) - Vs;
      const double rel = diff.max_abs_coeff() / std::max(1.0, Vs.max_abs_coeff());
      bool ok = rel <= sos::kCertRelTol;
      detail << "scale_consistency=" << fmt6(rel);
      VectorField fs(n);
      for (int i = 0; i < n; ++i) fs[i] = f[i].scale_vars(scale) * (1.0 / scale(i));
      const Polynomial l = sq_norm(n, eps_l);
      const std::vector<std::pair<std::string, Polynomial>> conds = {
          {"gram_V", Vs - l},
          {"gram_derivative", -(lie_derivative(Vs, fs) + l) - s2 * (Polynomial::constant(n, level) - Vs)},
          {"gram_s2", s2},
      };
      for (const auto& [key, expr] : conds) {
        const MonomialBasis Z = basis_from_json(jc.at(key).at("basis"), n);
        const Eigen::MatrixXd Q = matrix_from_json(jc.at(key).at("Q"));
        const sos::Validation v = sos::validate_identity(expr, Z, Q);
        detail << " " << key << ":residual=" << fmt6(v.identity_residual) << ",min_eig=" << fmt6(v.min_eig);
        ok = ok && v.ok;
      }
      chk.ok = ok;
    } catch (const std::exception& e) {
      detail << " error: " << e.what();
      chk.ok = false;
    }
    chk.detail = detail.str();
    out.push_back(chk);
  }
  return out;
}

void write_outputs(const RunResult& r, const std::string& dir) {
  fs::create_directories(dir);
  std::ofstream(dir + "/report.txt") << render_report(r);
  std::ofstream(dir + "/config.json") << config_to_json(r.cfg).dump(2) << "\n";
  if (r.composed) {
    std::ofstream(dir + "/certs.json") << certs_to_json(r).dump(1) << "\n";
    write_contours(r, dir + "/contours");
  }
}

std::string true_roa_csv(const bench::BenchmarkCase& b, int rays, const oracle::SimOptions& sim) {
  const int n = b.sys.dim;
  std::ostringstream os;
  os << "dir_index";
  for (int i = 0; i < n; ++i) os << ",x" << i + 1;
  os << ",set_id\n";
  auto row = [&](int k, const Eigen::VectorXd& x) {
    os << k;
    for (int i = 0; i < n; ++i) os << "," << fmt6(x(i));
    os << ",true_roa\n";
  };
  if (b.name == "vdp") {
    const auto cyc = oracle::limit_cycle_2d(b.sys, Eigen::Vector2d(0.5, 0.0));
    if (cyc) {
      for (size_t k = 0; k < cyc->size(); ++k) row(static_cast<int>(k), (*cyc)[k]);
      return os.str();
    }
  }
  std::function<bool(const Eigen::VectorXd&)> in = b.exact_roa;
  if (!in) in = [&](const Eigen::VectorXd& x) { return oracle::in_true_roa(b.sys, x, sim); };
  // Rays in the (x1, x_n) plane, so the three-state case gives the x2 = 0 section.
  const int a = 0, c = n - 1;
  for (int k = 0; k < rays; ++k) {
    const double th = 2.0 * std::numbers::pi * k / rays;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    u(a) = std::cos(th);
    u(c) = std::sin(th);
    double tbox = std::numeric_limits<double>::infinity();
    for (int i : {a, c}) {
      if (u(i) > 1e-12) tbox = std::min(tbox, b.sys.domain_box[i].second / u(i));
      if (u(i) < -1e-12) tbox = std::min(tbox, b.sys.domain_box[i].first / u(i));
    }
    if (in(tbox * u)) continue;  // no boundary inside the domain box
    double lo = 0.0, hi = tbox;
    for (int it = 0; it < 30; ++it) {
      const double mid = 0.5 * (lo + hi);
      (in(mid * u) ? lo : hi) = mid;
    }
    row(k, 0.5 * (lo + hi) * u);
  }
  return os.str();
}

std::string compare_reports(const std::string& report_a, const std::string& report_b) {
  auto parse = [](const std::string& text) {
    std::map<std::string, std::pair<double, double>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      std::string kind, id;
      ls >> kind >> id;
      if (kind == "area") {
        double m = 0, s = 0;
        ls >> m >> s;
        rows["area " + id] = {m, s};
      } else if (kind == "extent") {
        std::string axis;
        double lo = 0, hi = 0;
        ls >> axis >> lo >> hi;
        rows["extent " + id + " " + axis + " lo"] = {lo, 0.0};
        rows["extent " + id + " " + axis + " hi"] = {hi, 0.0};
      }
    }
    return rows;
  };
  const auto A = parse(report_a), B = parse(report_b);
  std::map<std::string, int> keys;
  for (const auto& [k, v] : A) keys[k] = 1;
  for (const auto& [k, v] : B) keys[k] = 1;
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-28s %12s %12s %12s %8s\n", "quantity", "A", "B", "B-A", "sigmas");
  os << buf;
  for (const auto& [k, unused] : keys) {
    const auto ia = A.find(k), ib = B.find(k);
    const std::string sa = ia == A.end() ? "-" : fmt6(ia->second.first);
    const std::string sb = ib == B.end() ? "-" : fmt6(ib->second.first);
    std::string sd = "-", ss = "-";
    if (ia != A.end() && ib != B.end()) {
      const double d = ib->second.first - ia->second.first;
      sd = fmt6(d);
      const double se = std::hypot(ia->second.second, ib->second.second);
      if (se > 0.0) ss = fmt6(d / se);
    }
    std::snprintf(buf, sizeof(buf), "%-28s %12s %12s %12s %8s\n", k.c_str(), sa.c_str(), sb.c_str(),
                  sd.c_str(), ss.c_str());
    os << buf;
  }
  return os.str();
}

}  // namespace roa
