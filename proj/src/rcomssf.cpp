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

#include "roa/rcomssf.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace roa {

namespace {

// Coefficients c_k of t -> V(t u) - level.
std::vector<double> ray_poly(const Polynomial& V, const Eigen::VectorXd& u, double level) {
  if (u.size() != V.dim()) throw std::invalid_argument("rho: direction dimension mismatch");
  std::vector<double> c(std::max(V.degree(), 0) + 1, 0.0);
  for (const auto& [m, a] : V.terms()) c[m.degree()] += a * m.eval(u);
  c[0] -= level;
  return c;
}

double horner(const std::vector<double>& c, double t) {
  double r = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * t + *it;
  return r;
}

Eigen::VectorXd unit(const Eigen::VectorXd& u) {
  const double n = u.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("direction must be nonzero");
  return u / n;
}

Eigen::MatrixXd identity_if_empty(const Eigen::MatrixXd& N, int n) {
  return N.size() == 0 ? Eigen::MatrixXd::Identity(n, n) : N;
}

}  // namespace

RhoResult rho(const Polynomial& V, const Eigen::VectorXd& u_in, double level) {
  const Eigen::VectorXd u = unit(u_in);
  const std::vector<double> c = ray_poly(V, u, level);
  RhoResult r;
  if (horner(c, 0.0) >= 0.0) return r;  // origin not inside
  double prev = 0.0, t = 1e-3;
  while (horner(c, t) < 0.0) {
    prev = t;
    if (t >= kRhoCap) {
      r.t = std::numeric_limits<double>::infinity();
      r.capped = true;
      return r;
    }
    t = std::min(2.0 * t, kRhoCap);
  }
  // The first crossing may hide inside (prev, t); scan before bisecting.
  constexpr int kScan = 64;
  double lo = prev, hi = t;
  for (int k = 1; k <= kScan; ++k) {
    const double s = prev + (t - prev) * k / kScan;
    if (horner(c, s) >= 0.0) {
      hi = s;
      break;
    }
    lo = s;
  }
  while (hi - lo > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    (horner(c, mid) < 0.0 ? lo : hi) = mid;
  }
  r.t = 0.5 * (lo + hi);
  return r;
}

int ray_crossings(const Polynomial& V, const Eigen::VectorXd& u_in, double tmax, int samples,
                  double level) {
  const std::vector<double> c = ray_poly(V, unit(u_in), level);
  int changes = 0;
  bool below = horner(c, 0.0) < 0.0;
  for (int k = 1; k <= samples; ++k) {
    const bool b = horner(c, tmax * k / samples) < 0.0;
    if (b != below) ++changes;
    below = b;
  }
  return changes;
}

Eigen::VectorXd select_center(const Polynomial& V, const Eigen::VectorXd& u_in, double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw std::invalid_argument("select_center: sigma in (0, 1)");
  const Eigen::VectorXd u = unit(u_in);
  const RhoResult r = rho(V, u);
  if (r.capped || !(r.t > 0.0)) throw SelectionFailed("select_center: boundary not found along ray");
  double s = sigma;
  for (int attempt = 0; attempt <= 5; ++attempt) {
    const Eigen::VectorXd x = s * r.t * u;
    if (V.eval(x) < 1.0) return x;
    s *= 0.9;
  }
  throw SelectionFailed("select_center: V(x*) >= 1 after shrinking sigma");
}

void ShiftPlan::check(int dim) const {
  for (const ShiftRound& round : rounds) {
    for (const ShiftEntry& e : round.entries) {
      if (e.center) {
        if (e.center->size() != dim) throw std::invalid_argument("shift plan: center dimension");
      } else {
        if (e.direction.size() != dim) throw std::invalid_argument("shift plan: direction dimension");
        if (!(e.direction.norm() > 0.0)) throw std::invalid_argument("shift plan: zero direction");
        if (!(e.sigma > 0.0 && e.sigma < 1.0))
          throw std::invalid_argument("shift plan: sigma must lie in (0, 1)");
      }
      if (e.N.size() != 0) {
        if (e.N.rows() != dim || e.N.cols() != dim)
          throw std::invalid_argument("shift plan: N dimension");
        if ((e.N - e.N.transpose()).cwiseAbs().maxCoeff() > 1e-12 ||
            Eigen::LLT<Eigen::MatrixXd>(e.N).info() != Eigen::Success)
          throw std::invalid_argument("shift plan: N must be symmetric positive definite");
      }
    }
  }
}

std::string ShiftNode::label() const {
  if (id.empty()) return "0";
  std::string s;
  for (size_t i = 0; i < id.size(); ++i) s += (i ? "." : "") + std::to_string(id[i]);
  return s;
}

ShiftNode make_root(const Certificate& base) {
  ShiftNode root;
  root.cert = base;
  root.ok = base.certified();
  root.further_shift = true;
  if (!root.ok) root.diagnostic = "base certificate failed validation";
  return root;
}

ShiftNode shift_branch(const DynSystem& sys, const ShiftNode& parent, const Eigen::VectorXd& center,
                       const Eigen::MatrixXd& N_in, const VsOptions& opts_in) {
  ShiftNode node;
  node.center = center;
  node.N = identity_if_empty(N_in, sys.dim);
  const Polynomial& Vp = parent.cert.V;
  const double c_norm = center.norm();
  node.direction = c_norm > 0.0 ? Eigen::VectorXd(center / c_norm)
                                : Eigen::VectorXd::Unit(sys.dim, 0);
  if (!(Vp.eval(center) < 1.0)) {
    node.diagnostic = "center outside parent set";
    return node;
  }
  VsOptions opts = opts_in;
  opts.adaptive_shape = false;
  node.cert = run_a1(sys, Vp, ShapeFn::shifted(node.N, center), opts);
  node.ok = node.cert.certified();
  if (!node.ok) {
    node.diagnostic = "v-s iteration: " + to_string(node.cert.stop_reason);
    if (!node.cert.log.empty() && !node.cert.log.back().note.empty())
      node.diagnostic += " (" + node.cert.log.back().note + ")";
    return node;
  }
  const RhoResult before = rho(Vp, node.direction);
  const RhoResult after = rho(node.cert.V, node.direction);
  node.rho_before = before.t;
  node.rho_after = after.t;
  return node;
}

bool further_shift_check(const ShiftNode& node, double eps_rho) {
  if (!(node.rho_before > 0.0)) return false;
  if (std::isinf(node.rho_after)) return !std::isinf(node.rho_before);
  return std::abs((node.rho_after - node.rho_before) / node.rho_before) > eps_rho;
}

std::vector<int> ShiftTree::accepted() const {
  std::vector<int> out;
  for (size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].ok) out.push_back(static_cast<int>(i));
  return out;
}

ShiftTree run_rcomssf(const DynSystem& sys, const Certificate& base, const ShiftPlan& plan,
                      const RcomssfOptions& opts,
                      const std::function<void(const ShiftNode&)>& on_node) {
  plan.check(sys.dim);
  ShiftTree tree;
  tree.nodes.push_back(make_root(base));
  if (!tree.nodes[0].ok) return tree;

  std::vector<int> previous = {0};  // node indices of the last round
  std::vector<int> child_count(1, 0);
  for (size_t r = 0; r < plan.rounds.size(); ++r) {
    struct Job {
      ShiftNode node;
      bool run = false;
    };
    std::vector<Job> jobs;
    for (const ShiftEntry& e : plan.rounds[r].entries) {
      Job job;
      ShiftNode& node = job.node;
      node.round = static_cast<int>(r) + 1;
      node.N = identity_if_empty(e.N, sys.dim);
      // Parent choice.
      int parent = -1;
      if (r == 0) {
        parent = 0;
      } else if (e.parent >= 0) {
        if (e.parent >= static_cast<int>(previous.size()))
          throw std::invalid_argument("shift plan: parent index out of range");
        parent = previous[e.parent];
      } else if (e.center) {
        double best = 1.0;
        for (int idx : previous) {
          if (!tree.nodes[idx].ok) continue;
          const double v = tree.nodes[idx].cert.V.eval(*e.center);
          if (v < best) {
            best = v;
            parent = idx;
          }
        }
      }
      if (parent < 0) {
        node.diagnostic = "no previous-round set contains the center";
        node.center = e.center ? *e.center : Eigen::VectorXd::Zero(sys.dim);
        jobs.push_back(std::move(job));
        continue;
      }
      node.parent = parent;
      const ShiftNode& pn = tree.nodes[parent];
      if (!pn.ok) {
        node.diagnostic = "parent " + pn.label() + " has no certificate";
      } else if (opts.respect_further_shift && parent != 0 && !pn.further_shift) {
        node.diagnostic = "parent " + pn.label() + " failed the further-shift check";
      } else {
        try {
          node.center = e.center ? *e.center : select_center(pn.cert.V, e.direction, e.sigma);
          job.run = true;
        } catch (const SelectionFailed& ex) {
          node.diagnostic = ex.what();
        }
      }
      if (node.center.size() == 0) node.center = e.center ? *e.center : Eigen::VectorXd::Zero(sys.dim);
      jobs.push_back(std::move(job));
    }

    auto work = [&](Job& job) {
      if (!job.run) return;
      ShiftNode& node = job.node;
      ShiftNode done = shift_branch(sys, tree.nodes[node.parent], node.center, node.N, opts.vs);
      done.round = node.round;
      done.parent = node.parent;
      node = std::move(done);
    };
    if (opts.threads > 1) {
      for (size_t start = 0; start < jobs.size(); start += opts.threads) {
        std::vector<std::future<void>> fs;
        const size_t stop = std::min(jobs.size(), start + opts.threads);
        for (size_t k = start; k < stop; ++k)
          fs.push_back(std::async(std::launch::async, work, std::ref(jobs[k])));
        for (auto& f : fs) f.get();
      }
    } else {
      for (Job& job : jobs) work(job);
    }

    std::vector<int> current;
    for (size_t k = 0; k < jobs.size(); ++k) {
      ShiftNode node = std::move(jobs[k].node);
      if (node.parent >= 0) {
        node.id = tree.nodes[node.parent].id;
        node.id.push_back(++child_count[node.parent]);
      } else {
        node.id = {0, static_cast<int>(k) + 1};
      }
      if (node.ok) node.further_shift = further_shift_check(node, opts.eps_rho);
      current.push_back(static_cast<int>(tree.nodes.size()));
      tree.nodes.push_back(std::move(node));
      child_count.push_back(0);
      if (on_node) on_node(tree.nodes.back());
    }
    previous = std::move(current);
  }
  return tree;
}

}  // namespace roa
