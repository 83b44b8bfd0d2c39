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

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "roa/poly.hpp"
#include "roa/vsiter.hpp"

namespace roa::oracle {

struct SimOptions {
  double dt = 1e-3;
  double T = 50.0;
  double conv_radius = 1e-4;
  double escape_radius = 1e4;
};

enum class SimOutcome { Converged, Diverged, Undecided };
std::string to_string(SimOutcome o);

struct SimResult {
  SimOutcome outcome = SimOutcome::Undecided;
  Eigen::VectorXd final_state;
  long steps_used = 0;
};

/// One classical Runge-Kutta step of size dt.
Eigen::VectorXd rk4_step(const CompiledField& f, const Eigen::VectorXd& x, double dt);

/// Fixed-step RK4 from x0. Converged once |x| < conv_radius, Diverged once
/// |x| > escape_radius or the state turns non-finite.
SimResult simulate(const DynSystem& sys, const Eigen::VectorXd& x0, const SimOptions& opts = {});
SimResult simulate(const CompiledField& f, const Eigen::VectorXd& x0, const SimOptions& opts = {});

/// Final state after integrating exactly T (no early exits), for order checks.
Eigen::VectorXd integrate(const CompiledField& f, const Eigen::VectorXd& x0, double dt, double T);

using Polyline = std::vector<Eigen::Vector2d>;

/// Periodic orbit of the reversed field -f reached from `seed`. After the
/// transient, one period is recorded between consecutive upward crossings
/// of the section x2 = 0, x1 > 0. Empty when no return happens within
/// record_T (no cycle) or the reversed flow escapes.
std::optional<Polyline> limit_cycle_2d(const DynSystem& sys, const Eigen::Vector2d& seed,
                                       double transient_T = 60.0, double record_T = 30.0,
                                       double dt = 1e-3);

/// Winding-number point-in-polygon test against a closed polyline.
bool inside_polyline(const Polyline& poly, const Eigen::Vector2d& x);

/// Euclidean distance from x to the polyline's segments.
double distance_to_polyline(const Polyline& poly, const Eigen::Vector2d& x);

/// simulate(...) == Converged; Undecided counts as outside.
bool in_true_roa(const DynSystem& sys, const Eigen::VectorXd& x0, const SimOptions& opts = {});

using Box = std::vector<std::pair<double, double>>;
using Indicator = std::function<bool(const Eigen::VectorXd&)>;

double box_volume(const Box& box);

struct Measure {
  double measure = 0.0;
  double stderr_ = 0.0;  // binomial standard error times box volume
  long hits = 0;
  long samples = 0;
};

/// Uniform Monte Carlo estimate of the indicator's volume inside box.
/// Throws if samples < 1000 or the box is degenerate.
Measure mc_measure(const Indicator& indicator, const Box& box, long samples, std::uint64_t seed);

struct VdotCheck {
  double worst = 0.0;  // max Vdot over the accepted samples
  Eigen::VectorXd worst_point;
  long accepted = 0;
  long drawn = 0;
  Box box;  // box actually sampled
};

/// Rejection-samples {V <= level} minus the ball |x| < 1e-3 and returns the
/// largest Vdot seen. The sampling box is the union of sys.domain_box and
/// the ray-traced bounding box of the set; it shrinks toward the ray box if
/// acceptance starves.
VdotCheck vdot_sample_check(const DynSystem& sys, const Polynomial& V, long n_samples,
                            std::uint64_t seed, double level = 1.0);

/// Bounding box of {V < level} traced along rays from the origin (2n axis
/// rays plus `rays` random directions), padded by `pad` relative.
Box ray_bounding_box(const Polynomial& V, int rays = 400, double pad = 0.05,
                     std::uint64_t seed = 7, double level = 1.0);

/// `count` points drawn uniformly from {V < level} (rejection sampling in
/// the ray bounding box). Throws if acceptance starves.
std::vector<Eigen::VectorXd> sample_sublevel(const Polynomial& V, long count, std::uint64_t seed,
                                             double level = 1.0);

}  // namespace roa::oracle
