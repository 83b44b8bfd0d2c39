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

#include "roa/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "roa/rcomssf.hpp"

namespace roa::oracle {

namespace {

Eigen::VectorXd negate_eval(const CompiledField& f, const Eigen::VectorXd& x) { return -f.eval(x); }

Eigen::VectorXd random_unit(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd u(n);
  do {
    for (int i = 0; i < n; ++i) u(i) = g(rng);
  } while (u.norm() < 1e-12);
  return u / u.norm();
}

void check_box(const Box& box) {
  if (box.empty()) throw std::invalid_argument("empty box");
  for (const auto& [lo, hi] : box)
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
      throw std::invalid_argument("degenerate box");
}

Eigen::VectorXd draw(std::mt19937_64& rng, const Box& box) {
  Eigen::VectorXd x(box.size());
  for (size_t i = 0; i < box.size(); ++i)
    x(i) = std::uniform_real_distribution<double>(box[i].first, box[i].second)(rng);
  return x;
}

}  // namespace

std::string to_string(SimOutcome o) {
  switch (o) {
    case SimOutcome::Converged: return "Converged";
    case SimOutcome::Diverged: return "Diverged";
    case SimOutcome::Undecided: return "Undecided";
  }
  return "?";
}

Eigen::VectorXd rk4_step(const CompiledField& f, const Eigen::VectorXd& x, double dt) {
  const Eigen::VectorXd k1 = f.eval(x);
  const Eigen::VectorXd k2 = f.eval(x + 0.5 * dt * k1);
  const Eigen::VectorXd k3 = f.eval(x + 0.5 * dt * k2);
  const Eigen::VectorXd k4 = f.eval(x + dt * k3);
  return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

SimResult simulate(const CompiledField& f, const Eigen::VectorXd& x0, const SimOptions& opts) {
  if (!x0.allFinite()) throw std::invalid_argument("simulate: non-finite initial state");
  SimResult r;
  Eigen::VectorXd x = x0;
  const long steps = static_cast<long>(std::ceil(opts.T / opts.dt - 1e-9));
  for (long k = 0;; ++k) {
    if (!x.allFinite() || x.norm() > opts.escape_radius) {
      r.outcome = SimOutcome::Diverged;
      break;
    }
    if (x.norm() < opts.conv_radius) {
      r.outcome = SimOutcome::Converged;
      break;
    }
    if (k == steps) break;
    x = rk4_step(f, x, opts.dt);
    r.steps_used = k + 1;
  }
  r.final_state = x;
  return r;
}

SimResult simulate(const DynSystem& sys, const Eigen::VectorXd& x0, const SimOptions& opts) {
  return simulate(CompiledField(sys.f), x0, opts);
}

Eigen::VectorXd integrate(const CompiledField& f, const Eigen::VectorXd& x0, double dt, double T) {
  const long steps = std::lround(T / dt);
  Eigen::VectorXd x = x0;
  for (long k = 0; k < steps; ++k) x = rk4_step(f, x, dt);
  return x;
}

std::optional<Polyline> limit_cycle_2d(const DynSystem& sys, const Eigen::Vector2d& seed,
                                       double transient_T, double record_T, double dt) {
  if (sys.dim != 2) throw std::invalid_argument("limit_cycle_2d: planar systems only");
  const CompiledField f(sys.f);
  auto step = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd k1 = negate_eval(f, x);
    const Eigen::VectorXd k2 = negate_eval(f, x + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = negate_eval(f, x + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = negate_eval(f, x + dt * k3);
    return Eigen::VectorXd(x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  };
  constexpr double kEscape = 1e4;
  Eigen::VectorXd x = seed;
  const long transient = std::lround(transient_T / dt);
  for (long k = 0; k < transient; ++k) {
    x = step(x);
    if (!x.allFinite() || x.norm() > kEscape) return std::nullopt;
  }
  // Crossing of the half-line x2 = 0, x1 > 0 (a rotating orbit crosses it in
  // one direction only), located by linear interpolation.
  auto crossing = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) -> std::optional<Eigen::Vector2d> {
    if ((a(1) < 0.0) != (b(1) < 0.0)) {
      const double s = -a(1) / (b(1) - a(1));
      const Eigen::Vector2d c = a + s * (b - a);
      if (c(0) > 0.0) return c;
    }
    return std::nullopt;
  };
  // Record between consecutive crossings; a return near the previous
  // crossing closes the orbit.
  const long record = std::lround(record_T / dt);
  Polyline out;
  std::optional<Eigen::Vector2d> first;
  for (long k = 0; k < record; ++k) {
    const Eigen::VectorXd nx = step(x);
    if (!nx.allFinite() || nx.norm() > kEscape) return std::nullopt;
    const auto c = crossing(x, nx);
    x = nx;
    if (c) {
      if (first && (*c - *first).norm() < 1e-3 * std::max(1.0, first->norm())) return out;
      first = c;
      out.assign(1, *c);
    } else if (first) {
      out.push_back(x);
    }
  }
  return std::nullopt;
}

bool inside_polyline(const Polyline& poly, const Eigen::Vector2d& x) {
  int winding = 0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d& a = poly[i];
    const Eigen::Vector2d& b = poly[(i + 1) % n];
    const double cross = (b(0) - a(0)) * (x(1) - a(1)) - (x(0) - a(0)) * (b(1) - a(1));
    if (a(1) <= x(1)) {
      if (b(1) > x(1) && cross > 0.0) ++winding;
    } else if (b(1) <= x(1) && cross < 0.0) {
      --winding;
    }
  }
  return winding != 0;
}

double distance_to_polyline(const Polyline& poly, const Eigen::Vector2d& x) {
  double best = std::numeric_limits<double>::infinity();
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d& a = poly[i];
    const Eigen::Vector2d& b = poly[(i + 1) % n];
    const Eigen::Vector2d d = b - a;
    const double len2 = d.squaredNorm();
    const double s = len2 > 0.0 ? std::clamp((x - a).dot(d) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, (a + s * d - x).norm());
  }
  return best;
}

bool in_true_roa(const DynSystem& sys, const Eigen::VectorXd& x0, const SimOptions& opts) {
  return simulate(sys, x0, opts).outcome == SimOutcome::Converged;
}

double box_volume(const Box& box) {
  double v = 1.0;
  for (const auto& [lo, hi] : box) v *= hi - lo;
  return v;
}

Measure mc_measure(const Indicator& indicator, const Box& box, long samples, std::uint64_t seed) {
  check_box(box);
  if (samples < 1000) throw std::invalid_argument("mc_measure: at least 1000 samples");
  std::mt19937_64 rng(seed);
  Measure m;
  m.samples = samples;
  for (long k = 0; k < samples; ++k)
    if (indicator(draw(rng, box))) ++m.hits;
  const double vol = box_volume(box);
  const double frac = static_cast<double>(m.hits) / samples;
  m.measure = frac * vol;
  m.stderr_ = vol * std::sqrt(frac * (1.0 - frac) / samples);
  return m;
}

Box ray_bounding_box(const Polynomial& V, int rays, double pad, std::uint64_t seed, double level) {
  const int n = V.dim();
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(n), hi = Eigen::VectorXd::Zero(n);
  auto extend = [&](const Eigen::VectorXd& u) {
    const RhoResult r = rho(V, u, level);
    const double t = r.capped ? kRhoCap : r.t;
    const Eigen::VectorXd p = t * u;
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  };
  for (int i = 0; i < n; ++i) {
    extend(Eigen::VectorXd::Unit(n, i));
    extend(-Eigen::VectorXd::Unit(n, i));
  }
  std::mt19937_64 rng(seed);
  for (int k = 0; k < rays; ++k) extend(random_unit(rng, n));
  Box box(n);
  for (int i = 0; i < n; ++i) {
    const double w = std::max(hi(i) - lo(i), 1e-9);
    box[i] = {lo(i) - pad * w, hi(i) + pad * w};
  }
  return box;
}

VdotCheck vdot_sample_check(const DynSystem& sys, const Polynomial& V, long n_samples,
                            std::uint64_t seed, double level) {
  const CompiledPolynomial cv(V);
  const CompiledPolynomial cvdot(lie_derivative(V, sys.f));
  Box ray_box = ray_bounding_box(V, 400, 0.1, seed ^ 0x9e3779b97f4a7c15ULL, level);
  Box box = ray_box;
  if (static_cast<int>(sys.domain_box.size()) == sys.dim) {
    for (int i = 0; i < sys.dim; ++i) {
      box[i].first = std::min(box[i].first, sys.domain_box[i].first);
      box[i].second = std::max(box[i].second, sys.domain_box[i].second);
    }
  }
  VdotCheck out;
  out.worst = -std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  const long max_draws = 200 * n_samples + 100000;
  bool shrunk = false;
  while (out.accepted < n_samples && out.drawn < max_draws) {
    // Starvation: fall back to the tighter ray box once.
    if (!shrunk && out.drawn >= 20000 && out.accepted * 50 < out.drawn) {
      box = ray_box;
      shrunk = true;
    }
    const Eigen::VectorXd x = draw(rng, box);
    ++out.drawn;
    if (x.norm() < 1e-3 || cv.eval(x) > level) continue;
    ++out.accepted;
    const double d = cvdot.eval(x);
    if (d > out.worst) {
      out.worst = d;
      out.worst_point = x;
    }
  }
  out.box = box;
  return out;
}

std::vector<Eigen::VectorXd> sample_sublevel(const Polynomial& V, long count, std::uint64_t seed,
                                             double level) {
  const CompiledPolynomial cv(V);
  const Box box = ray_bounding_box(V, 400, 0.1, seed ^ 0x51ed27a3ULL, level);
  std::mt19937_64 rng(seed);
  std::vector<Eigen::VectorXd> out;
  long drawn = 0;
  const long max_draws = 1000 * count + 100000;
  while (static_cast<long>(out.size()) < count) {
    if (++drawn > max_draws) throw std::runtime_error("sample_sublevel: acceptance starved");
    Eigen::VectorXd x = draw(rng, box);
    if (cv.eval(x) < level) out.push_back(std::move(x));
  }
  return out;
}

}  // namespace roa::oracle
