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

#include "roa/config.hpp"

#include <fstream>
#include <set>

namespace roa {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

template <typename T>
T get(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
void maybe(const json& j, const std::string& key, T& out, const std::string& where) {
  if (j.contains(key)) out = get<T>(j, key, where);
}

Eigen::VectorXd vec_from_json(const json& j, int dim, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw ConfigError(where + ": expected an array of " + std::to_string(dim) + " numbers");
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) {
    if (!j[i].is_number()) throw ConfigError(where + ": expected numbers");
    v(i) = j[i].get<double>();
  }
  return v;
}

json vec_to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::MatrixXd N_from_json(const json& j, int dim, const std::string& where) {
  if (j.is_string()) {
    if (j.get<std::string>() != "identity") throw ConfigError(where + ": N must be 'identity' or a matrix");
    return {};
  }
  Eigen::MatrixXd N;
  try {
    N = matrix_from_json(j);
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
  if (N.rows() != dim || N.cols() != dim) throw ConfigError(where + ": N has the wrong size");
  return N;
}

ShiftPlan plan_from_json(const json& j, int dim) {
  check_keys(j, {"rounds"}, "shift_plan");
  ShiftPlan plan;
  const json& rounds = j.at("rounds");
  if (!rounds.is_array()) throw ConfigError("shift_plan.rounds: expected an array");
  for (size_t r = 0; r < rounds.size(); ++r) {
    const std::string where = "shift_plan.rounds[" + std::to_string(r) + "]";
    const json& jr = rounds[r];
    check_keys(jr, {"centers", "N", "parents", "entries"}, where);
    ShiftRound round;
    if (jr.contains("centers")) {
      const Eigen::MatrixXd N = jr.contains("N") ? N_from_json(jr["N"], dim, where + ".N") : Eigen::MatrixXd{};
      const json& cs = jr["centers"];
      if (!cs.is_array()) throw ConfigError(where + ".centers: expected an array");
      std::vector<int> parents;
      if (jr.contains("parents")) parents = get<std::vector<int>>(jr, "parents", where);
      if (!parents.empty() && parents.size() != cs.size())
        throw ConfigError(where + ".parents: one parent per center");
      for (size_t i = 0; i < cs.size(); ++i) {
        ShiftEntry e;
        e.center = vec_from_json(cs[i], dim, where + ".centers");
        e.N = N;
        e.parent = parents.empty() ? -1 : parents[i];
        round.entries.push_back(e);
      }
    }
    if (jr.contains("entries")) {
      for (const json& je : jr["entries"]) {
        check_keys(je, {"center", "direction", "sigma", "N", "parent"}, where + ".entries");
        ShiftEntry e;
        if (je.contains("center")) e.center = vec_from_json(je["center"], dim, where + ".center");
        else if (je.contains("direction")) e.direction = vec_from_json(je["direction"], dim, where + ".direction");
        else throw ConfigError(where + ".entries: need center or direction");
        if (e.direction.size() > 0 && e.direction.norm() > 0.0) e.direction.normalize();
        maybe(je, "sigma", e.sigma, where);
        maybe(je, "parent", e.parent, where);
        if (je.contains("N")) e.N = N_from_json(je["N"], dim, where + ".N");
        round.entries.push_back(e);
      }
    }
    plan.rounds.push_back(round);
  }
  try {
    plan.check(dim);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("shift_plan: ") + e.what());
  }
  return plan;
}

json plan_to_json(const ShiftPlan& plan) {
  json rounds = json::array();
  for (const ShiftRound& r : plan.rounds) {
    json entries = json::array();
    for (const ShiftEntry& e : r.entries) {
      json je;
      if (e.center) {
        je["center"] = vec_to_json(*e.center);
      } else {
        je["direction"] = vec_to_json(e.direction);
        je["sigma"] = e.sigma;
      }
      je["N"] = e.N.size() == 0 ? json("identity") : matrix_to_json(e.N);
      je["parent"] = e.parent;
      entries.push_back(je);
    }
    rounds.push_back({{"entries", entries}});
  }
  return {{"rounds", rounds}};
}

DynSystem system_from_json(const json& j) {
  check_keys(j, {"name", "dim", "f", "domain_box"}, "system");
  const int dim = get<int>(j, "dim", "system");
  if (dim < 1) throw ConfigError("system.dim must be positive");
  const json& jf = j.at("f");
  if (!jf.is_array() || static_cast<int>(jf.size()) != dim)
    throw ConfigError("system.f: expected one polynomial per state");
  VectorField f;
  for (const json& comp : jf) f.push_back(poly_from_json(comp, dim));
  std::vector<std::pair<double, double>> box;
  if (j.contains("domain_box")) {
    const auto b = get<std::vector<std::vector<double>>>(j, "domain_box", "system");
    if (static_cast<int>(b.size()) != dim) throw ConfigError("system.domain_box: one interval per state");
    for (const auto& iv : b) {
      if (iv.size() != 2 || !(iv[0] < iv[1])) throw ConfigError("system.domain_box: intervals are [lo, hi]");
      box.emplace_back(iv[0], iv[1]);
    }
  } else {
    box.assign(dim, {-1.0, 1.0});
  }
  std::string name = "inline";
  maybe(j, "name", name, "system");
  try {
    return DynSystem::make(name, f, box);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("system: ") + e.what());
  }
}

json system_to_json(const DynSystem& sys) {
  json f = json::array();
  for (const Polynomial& p : sys.f) f.push_back(poly_to_json(p));
  json box = json::array();
  for (const auto& [lo, hi] : sys.domain_box) box.push_back({lo, hi});
  return {{"name", sys.name}, {"dim", sys.dim}, {"f", f}, {"domain_box", box}};
}

}  // namespace

json poly_to_json(const Polynomial& p) {
  json out = json::array();
  for (const auto& [m, c] : p.terms()) out.push_back({{"e", m.exponents()}, {"c", c}});
  return out;
}

Polynomial poly_from_json(const json& j, int dim) {
  if (!j.is_array()) throw ConfigError("polynomial: expected an array of terms");
  Polynomial p(dim);
  for (const json& t : j) {
    check_keys(t, {"e", "c"}, "polynomial term");
    const auto e = get<std::vector<int>>(t, "e", "polynomial term");
    if (static_cast<int>(e.size()) != dim) throw ConfigError("polynomial term: exponent length != dim");
    for (int k : e)
      if (k < 0) throw ConfigError("polynomial term: negative exponent");
    p.add_term(Monomial(e), get<double>(t, "c", "polynomial term"));
  }
  return p;
}

json matrix_to_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    std::vector<double> r(M.cols());
    for (int k = 0; k < M.cols(); ++k) r[k] = M(i, k);
    rows.push_back(r);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  const int r = static_cast<int>(rows.size());
  const int c = r ? static_cast<int>(rows[0].size()) : 0;
  Eigen::MatrixXd M(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != c) throw std::invalid_argument("ragged matrix");
    for (int k = 0; k < c; ++k) M(i, k) = rows[i][k];
  }
  return M;
}

RunConfig parse_config(const json& j) {
  check_keys(j,
             {"system", "V0", "p0", "algorithm", "base", "deg_V", "N_I", "branch_N_I", "eps_tol",
              "eps_rho", "shift_plan", "tau", "tolerances", "oracle", "seed", "output_dir",
              "threads"},
             "config");
  if (!j.contains("system")) throw ConfigError("config: 'system' is required");
  RunConfig cfg;
  const json& js = j["system"];
  if (js.is_string()) {
    try {
      cfg.problem = bench::load(js.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else {
    bench::BenchmarkCase& b = cfg.problem;
    b.sys = system_from_json(js);
    b.name = b.sys.name;
    b.V0 = init_lf(b.sys);
    b.p0 = ShapeFn::at_origin(quadratic_matrix(b.V0));
  }
  bench::BenchmarkCase& b = cfg.problem;
  const int n = b.sys.dim;

  if (j.contains("V0")) {
    b.V0 = poly_from_json(j["V0"], n);
    if (!j.contains("p0")) b.p0 = ShapeFn::at_origin(quadratic_matrix(b.V0));
  }
  if (j.contains("p0")) {
    const json& jp = j["p0"];
    if (jp.is_string() && jp.get<std::string>() == "V0") {
      b.p0 = ShapeFn::at_origin(quadratic_matrix(b.V0));
    } else if (jp.is_object()) {
      check_keys(jp, {"N", "center", "V0_factor"}, "p0");
      if (jp.contains("V0_factor")) {
        b.p0 = ShapeFn::at_origin(get<double>(jp, "V0_factor", "p0") * quadratic_matrix(b.V0));
      } else {
        Eigen::MatrixXd N = N_from_json(jp.at("N"), n, "p0.N");
        if (N.size() == 0) N = Eigen::MatrixXd::Identity(n, n);
        const Eigen::VectorXd c =
            jp.contains("center") ? vec_from_json(jp["center"], n, "p0.center") : Eigen::VectorXd::Zero(n);
        b.p0 = ShapeFn::shifted(N, c);
      }
    } else {
      throw ConfigError("p0: expected \"V0\" or an object");
    }
  }

  try {
    if (j.contains("algorithm")) cfg.algorithm = bench::parse_algorithm(get<std::string>(j, "algorithm", "config"));
    if (j.contains("base")) {
      b.base = bench::parse_algorithm(get<std::string>(j, "base", "config"));
      if (b.base == bench::Algorithm::Rcomssf) throw ConfigError("base: must be a1 or a2");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  maybe(j, "deg_V", b.deg_V, "config");
  if (b.deg_V < 2 || b.deg_V % 2 != 0) throw ConfigError("deg_V must be even and >= 2");
  maybe(j, "N_I", b.N_I, "config");
  maybe(j, "branch_N_I", b.branch_N_I, "config");
  if (b.N_I < 1 || b.branch_N_I < 1) throw ConfigError("N_I and branch_N_I must be positive");
  if (j.contains("shift_plan")) b.plan = plan_from_json(j["shift_plan"], n);

  cfg.branch_vs = branch_vs_defaults();
  for (VsOptions* o : {&cfg.vs, &cfg.branch_vs}) o->deg_V = b.deg_V;
  cfg.vs.max_iter = b.N_I;
  cfg.branch_vs.max_iter = b.branch_N_I;
  double eps_tol = cfg.vs.eps_tol;
  maybe(j, "eps_tol", eps_tol, "config");
  if (!(eps_tol >= 0.0)) throw ConfigError("eps_tol must be non-negative");
  maybe(j, "eps_rho", cfg.eps_rho, "config");
  maybe(j, "tau", cfg.tau, "config");
  if (!(cfg.tau > 0.0)) throw ConfigError("tau must be positive");

  if (j.contains("tolerances")) {
    const json& jt = j["tolerances"];
    check_keys(jt, {"bisection_rel", "eps_l", "gamma_cap", "beta_cap", "v_gap"}, "tolerances");
    for (VsOptions* o : {&cfg.vs, &cfg.branch_vs}) {
      maybe(jt, "bisection_rel", o->gamma.rel_tol, "tolerances");
      maybe(jt, "bisection_rel", o->beta.rel_tol, "tolerances");
      maybe(jt, "eps_l", o->eps_l, "tolerances");
      maybe(jt, "gamma_cap", o->gamma.cap, "tolerances");
      maybe(jt, "beta_cap", o->beta.cap, "tolerances");
    }
    maybe(jt, "v_gap", cfg.vs.v_gap, "tolerances");
  }
  for (VsOptions* o : {&cfg.vs, &cfg.branch_vs}) o->eps_tol = eps_tol;

  if (j.contains("oracle")) {
    const json& jo = j["oracle"];
    check_keys(jo, {"dt", "T", "mc_samples", "vdot_samples", "sim_samples", "contour_rays"}, "oracle");
    maybe(jo, "dt", cfg.oracle.sim.dt, "oracle");
    maybe(jo, "T", cfg.oracle.sim.T, "oracle");
    maybe(jo, "mc_samples", cfg.oracle.mc_samples, "oracle");
    maybe(jo, "vdot_samples", cfg.oracle.vdot_samples, "oracle");
    maybe(jo, "sim_samples", cfg.oracle.sim_samples, "oracle");
    maybe(jo, "contour_rays", cfg.oracle.contour_rays, "oracle");
    if (cfg.oracle.mc_samples < 1000) throw ConfigError("oracle.mc_samples must be >= 1000");
    if (!(cfg.oracle.sim.dt > 0.0) || !(cfg.oracle.sim.T > 0.0)) throw ConfigError("oracle: dt and T must be positive");
  }
  maybe(j, "seed", cfg.seed, "config");
  maybe(j, "output_dir", cfg.output_dir, "config");
  maybe(j, "threads", cfg.threads, "config");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(j);
}

json config_to_json(const RunConfig& cfg) {
  const bench::BenchmarkCase& b = cfg.problem;
  json p0 = {{"N", matrix_to_json(b.p0.N)}, {"center", vec_to_json(b.p0.center)}};
  return {
      {"system", system_to_json(b.sys)},
      {"V0", poly_to_json(b.V0)},
      {"p0", p0},
      {"algorithm", bench::to_string(cfg.algorithm)},
      {"base", bench::to_string(b.base)},
      {"deg_V", b.deg_V},
      {"N_I", b.N_I},
      {"branch_N_I", b.branch_N_I},
      {"eps_tol", cfg.vs.eps_tol},
      {"eps_rho", cfg.eps_rho},
      {"shift_plan", plan_to_json(b.plan)},
      {"tau", cfg.tau},
      {"tolerances",
       {{"bisection_rel", cfg.vs.beta.rel_tol},
        {"eps_l", cfg.vs.eps_l},
        {"gamma_cap", cfg.vs.gamma.cap},
        {"beta_cap", cfg.vs.beta.cap},
        {"v_gap", cfg.vs.v_gap}}},
      {"oracle",
       {{"dt", cfg.oracle.sim.dt},
        {"T", cfg.oracle.sim.T},
        {"mc_samples", cfg.oracle.mc_samples},
        {"vdot_samples", cfg.oracle.vdot_samples},
        {"sim_samples", cfg.oracle.sim_samples},
        {"contour_rays", cfg.oracle.contour_rays}}},
      {"seed", cfg.seed},
      {"output_dir", cfg.output_dir},
      {"threads", cfg.threads},
  };
}

}  // namespace roa
