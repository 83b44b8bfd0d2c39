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

#include "roa/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace roa::sdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrt2 = std::sqrt(2.0);

int svec_size(int n) { return n * (n + 1) / 2; }

// Position of (i, j), i <= j, in the row-major upper-triangular vectorization.
int svec_index(int n, int i, int j) { return i * n - i * (i - 1) / 2 + (j - i); }

}  // namespace

// -------------------------------------------------------------- SdpProblem

int SdpProblem::add_block(int dim) {
  if (dim <= 0) throw std::invalid_argument("SdpProblem::add_block: dim must be positive");
  if (free_ > 0) throw std::logic_error("SdpProblem: add all blocks before free scalars");
  const int off = block_offset_.empty() ? 0 : block_offset_.back() + svec_size(blocks_.back());
  blocks_.push_back(dim);
  block_offset_.push_back(off);
  return num_blocks() - 1;
}

int SdpProblem::add_free(int count) {
  const int first = num_vars();
  free_ += count;
  return first;
}

int SdpProblem::num_vars() const {
  int n = free_;
  for (int d : blocks_) n += svec_size(d);
  return n;
}

int SdpProblem::block_var(int b, int i, int j) const {
  const int n = blocks_.at(b);
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= n) throw std::out_of_range("SdpProblem::block_var");
  return block_offset_[b] + svec_index(n, i, j);
}

int SdpProblem::free_var(int k) const {
  if (k < 0 || k >= free_) throw std::out_of_range("SdpProblem::free_var");
  return num_vars() - free_ + k;
}

void SdpProblem::check() const {
  const int nv = num_vars();
  auto check_terms = [nv](const std::vector<Term>& terms) {
    for (const auto& t : terms) {
      if (t.var < 0 || t.var >= nv) throw std::invalid_argument("SdpProblem: variable out of range");
      if (!std::isfinite(t.value)) throw std::invalid_argument("SdpProblem: non-finite coefficient");
    }
  };
  for (const auto& row : equalities_) {
    check_terms(row.terms);
    if (!std::isfinite(row.rhs)) throw std::invalid_argument("SdpProblem: non-finite rhs");
  }
  check_terms(objective_);
}

void SdpProblem::dump(std::ostream& os) const {
  os << "# blocks";
  for (int d : blocks_) os << ' ' << d;
  os << "\n# free " << free_ << "\n";
  for (size_t r = 0; r < equalities_.size(); ++r) {
    for (const auto& t : equalities_[r].terms) os << r << ' ' << t.var << ' ' << t.value << "\n";
  }
  for (size_t r = 0; r < equalities_.size(); ++r) {
    os << "rhs " << r << ' ' << equalities_[r].rhs << "\n";
  }
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Feasible: return "Feasible";
    case Status::Infeasible: return "Infeasible";
    case Status::Unknown: return "Unknown";
  }
  return "?";
}

double min_eigenvalue(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) throw std::invalid_argument("min_eigenvalue: not square");
  if (M.size() == 0) return kInf;
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("min_eigenvalue: matrix not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

Residuals evaluate(const SdpProblem& prob, const std::vector<Eigen::MatrixXd>& blocks,
                   const Eigen::VectorXd& free_values) {
  if (static_cast<int>(blocks.size()) != prob.num_blocks() ||
      free_values.size() != prob.free_vars()) {
    throw std::invalid_argument("sdp::evaluate: shape mismatch");
  }
  Eigen::VectorXd v(prob.num_vars());
  for (int b = 0; b < prob.num_blocks(); ++b) {
    const int n = prob.block_dim(b);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        v[prob.block_var(b, i, j)] = i == j ? blocks[b](i, i) : kSqrt2 * blocks[b](i, j);
      }
    }
  }
  for (int k = 0; k < prob.free_vars(); ++k) v[prob.free_var(k)] = free_values[k];
  Residuals r;
  for (const auto& row : prob.equalities()) {
    double s = -row.rhs;
    for (const auto& t : row.terms) s += t.value * v[t.var];
    r.primal_eq = std::max(r.primal_eq, std::abs(s));
  }
  r.min_block_eigenvalue = kInf;
  for (const auto& B : blocks) r.min_block_eigenvalue = std::min(r.min_block_eigenvalue, min_eigenvalue(B));
  return r;
}

// ------------------------------------------------------------------ solver

namespace {

// Entry of the symmetric data matrix A_i restricted to one block; stored for
// every ordered pair (a, b) so inner products are plain sums.
struct BEntry {
  int a;
  int b;
  double v;
};

struct RowSlice {
  int row;
  std::vector<BEntry> entries;
};

struct IpmBlock {
  int dim = 0;
  std::vector<RowSlice> rows;  // rows touching this block, ascending
  Eigen::MatrixXd C;           // objective matrix
};

// min <C,X> + c_u.u  s.t.  A(X) + B u = b, X PSD, u free.
struct IpmProblem {
  int m = 0;
  std::vector<IpmBlock> blocks;
  Eigen::MatrixXd B;  // m x f
  Eigen::VectorXd b;
  Eigen::VectorXd cu;
};

struct IpmState {
  std::vector<Eigen::MatrixXd> X, S;
  Eigen::VectorXd y, u;
};

struct IpmDirection {
  std::vector<Eigen::MatrixXd> dX, dS;
  Eigen::VectorXd dy, du;
};

Eigen::VectorXd apply_A(const IpmProblem& P, const std::vector<Eigen::MatrixXd>& K) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(P.m);
  for (size_t j = 0; j < P.blocks.size(); ++j) {
    for (const auto& rs : P.blocks[j].rows) {
      double s = 0.0;
      for (const auto& e : rs.entries) s += e.v * K[j](e.a, e.b);
      r[rs.row] += s;
    }
  }
  return r;
}

Eigen::MatrixXd apply_At(const IpmBlock& blk, const Eigen::VectorXd& y) {
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(blk.dim, blk.dim);
  for (const auto& rs : blk.rows) {
    const double yi = y[rs.row];
    if (yi == 0.0) continue;
    for (const auto& e : rs.entries) R(e.a, e.b) += yi * e.v;
  }
  return R;
}

double inner(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  return (A.array() * B.array()).sum();
}

// Largest alpha with X + alpha dX PSD (capped at kInf).
double max_step(const Eigen::MatrixXd& X, const Eigen::MatrixXd& dX) {
  Eigen::LLT<Eigen::MatrixXd> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  const Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd W = L.triangularView<Eigen::Lower>().solve(dX);
  W = L.triangularView<Eigen::Lower>().solve(W.transpose()).transpose();
  W = 0.5 * (W + W.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  return lmin >= 0.0 ? kInf : -1.0 / lmin;
}

class Ipm {
 public:
  Ipm(const IpmProblem& P, int max_iter, double sigma_min = 0.0)
      : P_(P), max_iter_(max_iter), sigma_min_(sigma_min) {
    for (const auto& blk : P_.blocks) N_ += blk.dim;
    bnorm_ = P_.b.norm();
    cnorm_ = P_.cu.norm();
    for (const auto& blk : P_.blocks) cnorm_ = std::hypot(cnorm_, blk.C.norm());
  }

  void init() {
    const int f = static_cast<int>(P_.B.cols());
    st_.X.clear();
    st_.S.clear();
    const double bmax = P_.b.size() ? P_.b.cwiseAbs().maxCoeff() : 0.0;
    for (const auto& blk : P_.blocks) {
      const double n = blk.dim;
      const double xi = std::max({10.0, std::sqrt(n), n * (1.0 + bmax)});
      double eta = std::max({10.0, std::sqrt(n), blk.C.norm()});
      st_.X.push_back(xi * Eigen::MatrixXd::Identity(blk.dim, blk.dim));
      st_.S.push_back(eta * Eigen::MatrixXd::Identity(blk.dim, blk.dim));
    }
    st_.y = Eigen::VectorXd::Zero(P_.m);
    st_.u = Eigen::VectorXd::Zero(f);
  }

  // Metrics of the current iterate.
  struct Metrics {
    double pinf, dinf, pobj, dobj, gap, mu;
    Eigen::VectorXd rp;
  };

  Metrics metrics() const {
    Metrics mt;
    mt.rp = P_.b - apply_A(P_, st_.X) - P_.B * st_.u;
    double d2 = (P_.cu - P_.B.transpose() * st_.y).squaredNorm();
    mt.pobj = P_.cu.dot(st_.u);
    mt.gap = 0.0;
    for (size_t j = 0; j < P_.blocks.size(); ++j) {
      const auto& blk = P_.blocks[j];
      Eigen::MatrixXd Rd = blk.C - apply_At(blk, st_.y) - st_.S[j];
      d2 += Rd.squaredNorm();
      mt.pobj += inner(blk.C, st_.X[j]);
      mt.gap += inner(st_.X[j], st_.S[j]);
    }
    mt.dobj = P_.b.dot(st_.y);
    mt.pinf = mt.rp.norm() / (1.0 + bnorm_);
    mt.dinf = std::sqrt(d2) / (1.0 + cnorm_);
    mt.mu = N_ > 0 ? mt.gap / N_ : 0.0;
    return mt;
  }

  // One predictor-corrector step. Returns false when the Newton system or a
  // factorization breaks down.
  bool step(const Metrics& mt) {
    const size_t K = P_.blocks.size();
    Sinv_.resize(K);
    for (size_t j = 0; j < K; ++j) {
      Eigen::LLT<Eigen::MatrixXd> llt(st_.S[j]);
      if (llt.info() != Eigen::Success) return false;
      Sinv_[j] = llt.solve(Eigen::MatrixXd::Identity(P_.blocks[j].dim, P_.blocks[j].dim));
      Sinv_[j] = 0.5 * (Sinv_[j] + Sinv_[j].transpose());
    }
    Rd_.resize(K);
    for (size_t j = 0; j < K; ++j) {
      Rd_[j] = P_.blocks[j].C - apply_At(P_.blocks[j], st_.y) - st_.S[j];
    }
    ru_ = P_.cu - P_.B.transpose() * st_.y;
    if (!factor_schur()) return false;

    IpmDirection pred;
    if (!direction(mt, 0.0, nullptr, pred)) return false;
    double ap = 1.0, ad = 1.0;
    for (size_t j = 0; j < K; ++j) {
      ap = std::min(ap, max_step(st_.X[j], pred.dX[j]));
      ad = std::min(ad, max_step(st_.S[j], pred.dS[j]));
    }
    double gap_aff = 0.0;
    for (size_t j = 0; j < K; ++j) {
      gap_aff += inner(st_.X[j] + ap * pred.dX[j], st_.S[j] + ad * pred.dS[j]);
    }
    const double mu_aff = N_ > 0 ? gap_aff / N_ : 0.0;
    double sigma = mt.mu > 0 ? std::pow(std::max(0.0, mu_aff) / mt.mu, 3) : 0.0;
    sigma = std::clamp(sigma, sigma_min_, 1.0);

    IpmDirection corr;
    if (!direction(mt, sigma, &pred, corr)) return false;
    double ap2 = kInf, ad2 = kInf;
    for (size_t j = 0; j < K; ++j) {
      ap2 = std::min(ap2, max_step(st_.X[j], corr.dX[j]));
      ad2 = std::min(ad2, max_step(st_.S[j], corr.dS[j]));
    }
    const double tau = 0.9 + 0.09 * std::min(ap, ad);
    alpha_p_ = std::min(1.0, tau * ap2);
    alpha_d_ = std::min(1.0, tau * ad2);
    for (size_t j = 0; j < K; ++j) {
      st_.X[j] += alpha_p_ * corr.dX[j];
      st_.S[j] += alpha_d_ * corr.dS[j];
      st_.X[j] = 0.5 * (st_.X[j] + st_.X[j].transpose());
      st_.S[j] = 0.5 * (st_.S[j] + st_.S[j].transpose());
    }
    st_.u += alpha_p_ * corr.du;
    st_.y += alpha_d_ * corr.dy;
    return true;
  }

  // Least-norm correction of (X, u) onto the equality constraints, repeated a
  // few times. The interior-point iterate loses primal accuracy as the Newton
  // system degenerates; this restores it while the PSD margin absorbs the
  // (small) move.
  void polish(int rounds) {
    const int m = P_.m;
    const int f = static_cast<int>(P_.B.cols());
    if (Ad_.size() == 0) {
      int cols = 0;
      offs_.clear();
      for (const auto& blk : P_.blocks) {
        offs_.push_back(cols);
        cols += blk.dim * blk.dim;
      }
      Ad_ = Eigen::MatrixXd::Zero(m, cols);
      for (size_t j = 0; j < P_.blocks.size(); ++j) {
        const auto& blk = P_.blocks[j];
        for (const auto& rs : blk.rows)
          for (const auto& e : rs.entries) Ad_(rs.row, offs_[j] + e.a * blk.dim + e.b) += e.v;
      }
      Eigen::MatrixXd G = Ad_ * Ad_.transpose();
      if (f > 0) G += P_.B * P_.B.transpose();
      G.diagonal().array() += 1e-14 * std::max(1.0, G.diagonal().maxCoeff());
      gram_.compute(G);
    }
    if (gram_.info() != Eigen::Success) return;
    for (int r = 0; r < rounds; ++r) {
      const Eigen::VectorXd rp = P_.b - apply_A(P_, st_.X) - P_.B * st_.u;
      if (rp.lpNorm<Eigen::Infinity>() < 1e-15) break;
      const Eigen::VectorXd lam = gram_.solve(rp);
      const Eigen::VectorXd dx = Ad_.transpose() * lam;
      for (size_t j = 0; j < P_.blocks.size(); ++j) {
        const int d = P_.blocks[j].dim;
        Eigen::Map<const Eigen::MatrixXd> D(dx.data() + offs_[j], d, d);
        // vec layout is row-major (a * d + b); D is its transpose, and the
        // correction is symmetric anyway.
        st_.X[j] += 0.5 * (D + D.transpose());
      }
      if (f > 0) st_.u += P_.B.transpose() * lam;
    }
  }

  const IpmState& state() const { return st_; }
  double alpha_p() const { return alpha_p_; }
  double alpha_d() const { return alpha_d_; }
  int max_iter() const { return max_iter_; }

 private:
  // Builds M_ik = <A_i, X A_k S^-1> and factors the reduced system.
  bool factor_schur() {
    const int m = P_.m;
    M_ = Eigen::MatrixXd::Zero(m, m);
    for (size_t j = 0; j < P_.blocks.size(); ++j) {
      const auto& blk = P_.blocks[j];
      const Eigen::MatrixXd& X = st_.X[j];
      const Eigen::MatrixXd& Si = Sinv_[j];
      Eigen::MatrixXd T(blk.dim, blk.dim);
      for (size_t k = 0; k < blk.rows.size(); ++k) {
        const auto& rk = blk.rows[k];
        T.setZero();
        for (const auto& e : rk.entries) T.noalias() += e.v * X.col(e.a) * Si.row(e.b);
        for (size_t i = 0; i <= k; ++i) {
          const auto& ri = blk.rows[i];
          double s = 0.0;
          for (const auto& e : ri.entries) s += e.v * T(e.a, e.b);
          M_(ri.row, rk.row) += s;
        }
      }
    }
    M_ = M_.selfadjointView<Eigen::Upper>();
    // Tiny diagonal lift keeps the factorization alive near the boundary.
    const double lift = 1e-14 * std::max(1.0, M_.diagonal().cwiseAbs().maxCoeff());
    M_.diagonal().array() += lift;

    const int f = static_cast<int>(P_.B.cols());
    use_lu_ = false;
    llt_.compute(M_);
    if (llt_.info() != Eigen::Success) {
      use_lu_ = true;
    } else if (f > 0) {
      MinvB_ = llt_.solve(P_.B);
      Eigen::MatrixXd G = P_.B.transpose() * MinvB_;
      gllt_.compute(G);
      if (gllt_.info() != Eigen::Success) use_lu_ = true;
    }
    if (use_lu_) {
      Eigen::MatrixXd KKT = Eigen::MatrixXd::Zero(m + f, m + f);
      KKT.topLeftCorner(m, m) = M_;
      KKT.topRightCorner(m, f) = P_.B;
      KKT.bottomLeftCorner(f, m) = P_.B.transpose();
      lu_.compute(KKT);
      if (!std::isfinite(lu_.matrixLU().cwiseAbs().maxCoeff())) return false;
    }
    return true;
  }

  bool solve_reduced(const Eigen::VectorXd& h, Eigen::VectorXd& dy, Eigen::VectorXd& du) const {
    const int m = P_.m;
    const int f = static_cast<int>(P_.B.cols());
    if (use_lu_) {
      Eigen::VectorXd rhs(m + f);
      rhs << h, ru_;
      Eigen::VectorXd sol = lu_.solve(rhs);
      dy = sol.head(m);
      du = sol.tail(f);
    } else if (f > 0) {
      // M dy + B du = h, B^T dy = ru.
      const Eigen::VectorXd Mh = llt_.solve(h);
      du = gllt_.solve(P_.B.transpose() * Mh - ru_);
      dy = Mh - MinvB_ * du;
    } else {
      dy = llt_.solve(h);
      du.resize(0);
    }
    return dy.allFinite() && du.allFinite();
  }

  bool direction(const Metrics& mt, double sigma, const IpmDirection* pred, IpmDirection& d) {
    const size_t K = P_.blocks.size();
    std::vector<Eigen::MatrixXd> Kmat(K);
    for (size_t j = 0; j < K; ++j) {
      Kmat[j] = sigma * mt.mu * Sinv_[j] - st_.X[j] - st_.X[j] * Rd_[j] * Sinv_[j];
      if (pred) Kmat[j] -= pred->dX[j] * pred->dS[j] * Sinv_[j];
    }
    const Eigen::VectorXd h = mt.rp - apply_A(P_, Kmat);
    if (!solve_reduced(h, d.dy, d.du)) return false;
    d.dX.resize(K);
    d.dS.resize(K);
    for (size_t j = 0; j < K; ++j) {
      d.dS[j] = Rd_[j] - apply_At(P_.blocks[j], d.dy);
      Eigen::MatrixXd dX = Kmat[j] + st_.X[j] * (Rd_[j] - d.dS[j]) * Sinv_[j];
      d.dX[j] = 0.5 * (dX + dX.transpose());
    }
    return true;
  }

  const IpmProblem& P_;
  int max_iter_;
  double sigma_min_;
  int N_ = 0;
  double bnorm_ = 0.0, cnorm_ = 0.0;
  IpmState st_;
  std::vector<Eigen::MatrixXd> Sinv_, Rd_;
  Eigen::VectorXd ru_;
  Eigen::MatrixXd M_, MinvB_;
  Eigen::LLT<Eigen::MatrixXd> llt_, gllt_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  bool use_lu_ = false;
  Eigen::MatrixXd Ad_;
  std::vector<int> offs_;
  Eigen::LDLT<Eigen::MatrixXd> gram_;
  double alpha_p_ = 0.0, alpha_d_ = 0.0;
};

// Which original blocks / free scalars / rows survive into the IPM.
struct Reduction {
  std::vector<int> block_map;  // original block -> ipm block or -1
  std::vector<int> free_map;   // original free -> ipm column or -1
  std::vector<int> row_map;    // original row -> ipm row or -1
  std::vector<double> row_scale;
  bool trivially_infeasible = false;
};

}  // namespace

static SdpSolution solve_once(const SdpProblem& prob, const SdpOptions& opts) {
  const int nb = prob.num_blocks();
  const int nf = prob.free_vars();
  const bool phase1 = prob.is_feasibility() && !opts.center;

  // Decode variable indices.
  std::vector<int> var_block(prob.num_vars(), -1), var_i(prob.num_vars()), var_j(prob.num_vars());
  for (int b = 0; b < nb; ++b) {
    const int n = prob.block_dim(b);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const int v = prob.block_var(b, i, j);
        var_block[v] = b;
        var_i[v] = i;
        var_j[v] = j;
      }
    }
  }
  auto free_index = [&](int v) { return v - (prob.num_vars() - nf); };

  // Presolve: drop unreferenced blocks/free scalars and empty rows.
  Reduction red;
  red.block_map.assign(nb, -1);
  red.free_map.assign(nf, -1);
  red.row_map.assign(prob.num_equalities(), -1);
  std::vector<char> block_used(nb, 0), free_used(nf, 0);
  auto mark = [&](const std::vector<Term>& terms) {
    for (const auto& t : terms) {
      if (t.value == 0.0) continue;
      if (var_block[t.var] >= 0) {
        block_used[var_block[t.var]] = 1;
      } else {
        free_used[free_index(t.var)] = 1;
      }
    }
  };
  for (const auto& row : prob.equalities()) mark(row.terms);
  mark(prob.objective());

  IpmProblem P;
  for (int b = 0; b < nb; ++b) {
    if (!block_used[b]) continue;
    red.block_map[b] = static_cast<int>(P.blocks.size());
    IpmBlock blk;
    blk.dim = prob.block_dim(b);
    blk.C = Eigen::MatrixXd::Zero(blk.dim, blk.dim);
    P.blocks.push_back(std::move(blk));
  }
  int f = 0;
  for (int k = 0; k < nf; ++k) {
    if (free_used[k]) red.free_map[k] = f++;
  }
  const int w_block = phase1 ? static_cast<int>(P.blocks.size()) : -1;
  if (phase1) {
    IpmBlock blk;
    blk.dim = 1;
    blk.C = Eigen::MatrixXd::Ones(1, 1);
    P.blocks.push_back(std::move(blk));
  }

  std::vector<std::vector<BEntry>> scratch(P.blocks.size());
  std::vector<Eigen::VectorXd> Bcols;
  std::vector<double> rhs;
  std::vector<std::vector<std::pair<int, double>>> free_rows;
  for (int r = 0; r < prob.num_equalities(); ++r) {
    const auto& row = prob.equalities()[r];
    for (auto& s : scratch) s.clear();
    std::vector<std::pair<int, double>> fr;
    double trace = 0.0;  // sum of diagonal coefficients, for the phase-I shift
    for (const auto& t : row.terms) {
      if (t.value == 0.0) continue;
      const int b = var_block[t.var];
      if (b >= 0) {
        const int jb = red.block_map[b];
        const int i = var_i[t.var], j = var_j[t.var];
        if (i == j) {
          scratch[jb].push_back({i, i, t.value});
          trace += t.value;
        } else {
          const double v = t.value / kSqrt2;
          scratch[jb].push_back({i, j, v});
          scratch[jb].push_back({j, i, v});
        }
      } else {
        fr.emplace_back(red.free_map[free_index(t.var)], t.value);
      }
    }
    double b_i = row.rhs;
    if (phase1 && trace != 0.0) {
      scratch[w_block].push_back({0, 0, -trace});
      b_i -= trace;
    }
    bool empty = fr.empty();
    for (const auto& s : scratch) empty = empty && s.empty();
    if (empty) {
      if (std::abs(row.rhs) > opts.eq_tol) red.trivially_infeasible = true;
      continue;
    }
    // Row equilibration.
    double norm2 = 0.0;
    for (const auto& s : scratch) {
      for (const auto& e : s) norm2 += e.v * e.v;
    }
    for (const auto& [c, v] : fr) norm2 += v * v;
    const double scale = 1.0 / std::sqrt(norm2);
    const int ir = P.m++;
    red.row_map[r] = ir;
    red.row_scale.push_back(scale);
    for (size_t jb = 0; jb < scratch.size(); ++jb) {
      if (scratch[jb].empty()) continue;
      RowSlice rs{ir, scratch[jb]};
      // Merge duplicates (the same entry listed twice in one row).
      std::sort(rs.entries.begin(), rs.entries.end(), [](const BEntry& x, const BEntry& y) {
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
      });
      std::vector<BEntry> merged;
      for (const auto& e : rs.entries) {
        if (!merged.empty() && merged.back().a == e.a && merged.back().b == e.b) {
          merged.back().v += e.v * scale;
        } else {
          merged.push_back({e.a, e.b, e.v * scale});
        }
      }
      rs.entries = std::move(merged);
      P.blocks[jb].rows.push_back(std::move(rs));
    }
    for (auto& [c, v] : fr) v *= scale;
    free_rows.push_back(std::move(fr));
    rhs.push_back(b_i * scale);
  }
  P.b = Eigen::Map<Eigen::VectorXd>(rhs.data(), static_cast<int>(rhs.size()));
  P.B = Eigen::MatrixXd::Zero(P.m, f);
  for (int i = 0; i < P.m; ++i) {
    for (const auto& [c, v] : free_rows[i]) P.B(i, c) += v;
  }
  P.cu = Eigen::VectorXd::Zero(f);
  for (const auto& t : prob.objective()) {
    const int b = var_block[t.var];
    if (b >= 0) {
      auto& C = P.blocks[red.block_map[b]].C;
      const int i = var_i[t.var], j = var_j[t.var];
      if (i == j) {
        C(i, i) += t.value;
      } else {
        C(i, j) += t.value / kSqrt2;
        C(j, i) += t.value / kSqrt2;
      }
    } else {
      P.cu[red.free_map[free_index(t.var)]] += t.value;
    }
  }

  SdpSolution sol;
  sol.blocks.resize(nb);
  for (int b = 0; b < nb; ++b) sol.blocks[b] = Eigen::MatrixXd::Zero(prob.block_dim(b), prob.block_dim(b));
  sol.free_values = Eigen::VectorXd::Zero(nf);

  auto extract = [&](const IpmState& st) {
    const double shift = phase1 ? 1.0 - st.X[w_block](0, 0) : 0.0;
    for (int b = 0; b < nb; ++b) {
      const int jb = red.block_map[b];
      if (jb < 0) {
        sol.blocks[b].setZero();
        continue;
      }
      sol.blocks[b] = st.X[jb];
      sol.blocks[b].diagonal().array() += shift;
    }
    for (int k = 0; k < nf; ++k) {
      sol.free_values[k] = red.free_map[k] >= 0 ? st.u[red.free_map[k]] : 0.0;
    }
    sol.residuals = evaluate(prob, sol.blocks, sol.free_values);
    sol.phase1_t = phase1 ? -shift : 0.0;
    double obj = 0.0;
    if (!phase1) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(prob.num_vars());
      for (int b = 0; b < nb; ++b) {
        const int n = prob.block_dim(b);
        for (int i = 0; i < n; ++i) {
          for (int j = i; j < n; ++j) {
            v[prob.block_var(b, i, j)] = i == j ? sol.blocks[b](i, i) : kSqrt2 * sol.blocks[b](i, j);
          }
        }
      }
      for (int k = 0; k < nf; ++k) v[prob.free_var(k)] = sol.free_values[k];
      for (const auto& t : prob.objective()) obj += t.value * v[t.var];
    }
    sol.objective_value = phase1 ? 0.0 : obj;
  };

  if (red.trivially_infeasible) {
    sol.status = Status::Infeasible;
    sol.residuals = evaluate(prob, sol.blocks, sol.free_values);
    return sol;
  }
  if (P.m == 0) {
    // Nothing constrains the variables: zero is a witness.
    sol.status = Status::Feasible;
    sol.residuals = evaluate(prob, sol.blocks, sol.free_values);
    sol.phase1_t = 0.0;
    return sol;
  }

  const bool centering = prob.is_feasibility() && opts.center;
  Ipm ipm(P, opts.max_iter, centering ? 1.0 : 0.0);
  ipm.init();
  constexpr double kTol = 1e-9;
  const bool trace = std::getenv("ROA_SDP_TRACE") != nullptr;

  // Status of the (polished) iterate. For phase-I the shift t is read off
  // the returned blocks: every block + t I is PSD.
  auto finish = [&](bool converged, const Ipm::Metrics& mt) {
    ipm.polish(3);
    extract(ipm.state());
    const bool eq_ok = sol.residuals.primal_eq <= opts.eq_tol;
    if (phase1) {
      const double t = nb > 0 ? -sol.residuals.min_block_eigenvalue : sol.phase1_t;
      sol.phase1_t = std::isfinite(t) ? t : sol.phase1_t;
      if (eq_ok && sol.phase1_t < opts.psd_tol) {
        sol.status = Status::Feasible;
      } else if (mt.dinf < 1e-8 && mt.dobj - 1.0 > 10.0 * opts.psd_tol) {
        sol.status = Status::Infeasible;
        sol.phase1_t = mt.dobj - 1.0;
      } else if (converged && sol.phase1_t > 10.0 * opts.psd_tol) {
        sol.status = Status::Infeasible;
      } else {
        sol.status = Status::Unknown;
      }
    } else if (centering) {
      sol.status = eq_ok && sol.residuals.min_block_eigenvalue >= -opts.psd_tol ? Status::Feasible
                                                                                 : Status::Unknown;
    } else {
      sol.status = converged && eq_ok && sol.residuals.min_block_eigenvalue >= -opts.psd_tol
                       ? Status::Feasible
                       : Status::Unknown;
    }
    return sol;
  };

  int stalls = 0;
  // No-progress watch: best pinf and gap seen, and when either last halved.
  double best_pinf = kInf, best_gap = kInf;
  int last_progress = 0;
  Ipm::Metrics mt = ipm.metrics();
  for (int it = 0; it < opts.max_iter; ++it) {
    sol.iterations = it;
    mt = ipm.metrics();
    const double relgap = std::abs(mt.pobj - mt.dobj) / (1.0 + std::abs(mt.pobj) + std::abs(mt.dobj));
    if (mt.pinf < 0.5 * best_pinf || mt.gap < 0.5 * best_gap) last_progress = it;
    best_pinf = std::min(best_pinf, mt.pinf);
    best_gap = std::min(best_gap, mt.gap);
    if (it - last_progress >= 10) {
      // Stuck at the precision floor; an optimum is accepted at loose tolerances.
      if (!phase1 && !centering) return finish(mt.pinf < 1e-6 && mt.dinf < 1e-6 && relgap < 1e-4, mt);
      break;
    }
    if (trace)
      std::fprintf(stderr, "it=%d pinf=%.2e dinf=%.2e pobj=%.8e dobj=%.8e gap=%.2e\n", it, mt.pinf,
                   mt.dinf, mt.pobj, mt.dobj, mt.gap);
    if (phase1) {
      const double t = ipm.state().X[w_block](0, 0) - 1.0;
      if (opts.early_exit && t < -10.0 * opts.psd_tol && mt.pinf < kTol) {
        finish(false, mt);
        if (sol.status == Status::Feasible && sol.phase1_t < -10.0 * opts.psd_tol &&
            sol.residuals.primal_eq <= 0.1 * opts.eq_tol)
          return sol;
      }
      if (mt.dinf < 1e-8 && mt.dobj - 1.0 > 10.0 * opts.psd_tol) return finish(true, mt);
      if ((mt.pinf < kTol && mt.dinf < kTol && relgap < 1e-8) || mt.gap < 1e-13)
        return finish(true, mt);
    } else if (centering) {
      // Every central point of the zero-objective program is the analytic
      // center, and only the primal side matters for a witness.
      if (mt.pinf < 1e-8) return finish(true, mt);
    } else if (relgap < opts.stop_gap && std::max(mt.pinf, mt.dinf) < std::max(kTol, 1e-3 * opts.stop_gap)) {
      return finish(true, mt);
    }
    if (!ipm.step(mt)) break;
    if (std::max(ipm.alpha_p(), ipm.alpha_d()) < 1e-8) {
      if (++stalls >= 3) break;
    } else {
      stalls = 0;
    }
  }
  // Stalled or out of iterations: report what the last iterate supports.
  return finish(false, ipm.metrics());
}

namespace {

// Column scaling X_b = D_b Y_b D_b of every block. Congruence keeps the
// PSD cone, and the equality rows are unchanged, so a point of the scaled
// problem maps back to an equally good point of the original.
SdpProblem congruence_scaled(const SdpProblem& prob, const std::vector<Eigen::VectorXd>& d) {
  SdpProblem out;
  for (int b = 0; b < prob.num_blocks(); ++b) out.add_block(prob.block_dim(b));
  if (prob.free_vars() > 0) out.add_free(prob.free_vars());
  std::vector<double> factor(prob.num_vars(), 1.0);
  for (int b = 0; b < prob.num_blocks(); ++b)
    for (int i = 0; i < prob.block_dim(b); ++i)
      for (int j = i; j < prob.block_dim(b); ++j) factor[prob.block_var(b, i, j)] = d[b](i) * d[b](j);
  auto scale = [&](std::vector<Term> terms) {
    for (Term& t : terms) t.value *= factor[t.var];
    return terms;
  };
  for (const Equality& e : prob.equalities()) out.add_equality({scale(e.terms), e.rhs});
  out.set_objective(scale(prob.objective()));
  return out;
}

}  // namespace

SdpSolution solve(const SdpProblem& prob, const SdpOptions& opts) {
  prob.check();
  SdpSolution first = solve_once(prob, opts);
  if (first.status != Status::Unknown || prob.num_blocks() == 0) return first;

  // A stall usually means block entries spanning many orders of magnitude.
  // Retry once with the blocks balanced by the stalled iterate's diagonal.
  std::vector<Eigen::VectorXd> d(prob.num_blocks());
  for (int b = 0; b < prob.num_blocks(); ++b) {
    const Eigen::VectorXd diag = first.blocks[b].diagonal().cwiseAbs();
    const double floor = std::max(1e-8 * diag.maxCoeff(), 1e-12);
    d[b] = diag.cwiseMax(floor).cwiseSqrt();
  }
  SdpSolution sol = solve_once(congruence_scaled(prob, d), opts);
  if (sol.status == Status::Unknown) return first;
  for (int b = 0; b < prob.num_blocks(); ++b)
    sol.blocks[b] = d[b].asDiagonal() * sol.blocks[b] * d[b].asDiagonal();
  sol.residuals = evaluate(prob, sol.blocks, sol.free_values);
  if (prob.is_feasibility() && !opts.center && sol.status == Status::Feasible)
    sol.phase1_t = -sol.residuals.min_block_eigenvalue;
  sol.iterations += first.iterations;
  return sol;
}

}  // namespace roa::sdp
