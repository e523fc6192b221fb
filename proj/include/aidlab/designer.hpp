// Copyright 2026 The aid-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Incentive synthesis. Nash play: pick alpha so x^d is a first-order point of
// the estimated incentivized game with incentive value v^d, under a
// second-order margin (P1) or a joint stability margin (P2). Myopic play: pick
// alpha so the estimated next response is x^d.

#ifndef AIDLAB_DESIGNER_HPP_
#define AIDLAB_DESIGNER_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "aidlab/core.hpp"
#include "aidlab/game.hpp"
#include "aidlab/response.hpp"

namespace aidlab {

// Rows: first-order row, then (when pinned) the incentive-value row.
// zeta + Lambda alpha = 0 is the design equation; c0 + <c, alpha> is D_ii^2 f_i.
struct NashSystem {
  Vec zeta;
  Mat Lambda;
  double c0 = 0.0;
  Vec c;
  bool pinned = true;
};

inline NashSystem assemble_nash_system(const GameSpec& g, const Vec& theta_hat,
                                       const Vec& xd, std::optional<double> vd, int i) {
  if (i < 0 || i >= g.n) throw Error(ErrorCode::kIndexOutOfRange, "player");
  const PlayerSpec& p = g.players[i];
  check_dim(theta_hat, p.m(), "theta_hat");
  check_dim(xd, g.n, "x_desired");
  NashSystem sys;
  sys.pinned = vd.has_value();
  const int rows = sys.pinned ? 2 : 1;
  sys.zeta = Vec(rows);
  sys.Lambda = Mat(rows, p.s());
  sys.zeta(0) = p.nominal.grad(xd, i).dot(theta_hat);
  sys.Lambda.row(0) = p.incentive.grad(xd, i).transpose();
  if (sys.pinned) {
    sys.zeta(1) = -*vd;
    sys.Lambda.row(1) = p.incentive.eval(xd).transpose();
  }
  sys.c0 = p.nominal.hess_diag(xd, i).dot(theta_hat);
  sys.c = p.incentive.hess_diag(xd, i);
  return sys;
}

struct DesignOptions {
  double epsilon = 1e-3;
  double lambda = 0.0;
  double rank_tol = 1e-10;
  double residual_tol = 1e-8;
};

struct DesignResult {
  ParamSet alpha;
  Vec residual;     // |zeta_i + Lambda_i alpha_i| (myopic: |A alpha - rhs|)
  Vec slack;        // constraint slack; NaN when the design has no constraint
  Vec rank_sv_min;  // rank certificate per player
  std::vector<bool> constraint_active;
  bool feasible = true;
  bool regularized = false;
  bool verified = false;  // P2: x^d classified stable under the design
  double stationarity = 0.0;

  double max_residual() const { return residual.size() ? residual.maxCoeff() : 0.0; }
  double min_slack() const {
    double s = std::numeric_limits<double>::quiet_NaN();
    for (int j = 0; j < slack.size(); ++j) {
      if (!std::isnan(slack(j))) s = std::isnan(s) ? slack(j) : std::min(s, slack(j));
    }
    return s;
  }
};

namespace detail {

// argmin |A a - b|^2 + lambda |a|^2; minimum norm among minimizers when lambda = 0.
inline Vec min_norm_lsq(const Mat& A, const Vec& b, double lambda, double rank_tol) {
  if (A.cols() == 0) return Vec(0);
  if (lambda > 0.0) {
    Mat H = A.transpose() * A + lambda * Mat::Identity(A.cols(), A.cols());
    return H.ldlt().solve(A.transpose() * b);
  }
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(rank_tol);
  return svd.solve(b);
}

// Smallest of the first `rows` singular values; 0 when there are fewer columns.
inline double rank_certificate(const Mat& A) {
  const int r = static_cast<int>(A.rows());
  if (A.cols() < r) return 0.0;
  Eigen::JacobiSVD<Mat> svd(A);
  return svd.singularValues()(r - 1);
}

inline bool rank_deficient(const Mat& A, double rank_tol) {
  if (A.cols() < A.rows()) return true;
  Eigen::JacobiSVD<Mat> svd(A);
  const Vec& sv = svd.singularValues();
  return sv(0) == 0.0 || sv(A.rows() - 1) < rank_tol * sv(0);
}

// Orthonormal basis of {a : <c, a> = 0}.
inline Mat null_basis(const Vec& c) {
  Eigen::JacobiSVD<Mat> svd(c.transpose(), Eigen::ComputeFullV);
  return svd.matrixV().rightCols(c.size() - 1);
}

}  // namespace detail

struct PlayerDesign {
  Vec alpha;
  double residual = 0.0;
  double slack = 0.0;
  double rank_sv_min = 0.0;
  bool active = false;
  double multiplier = 0.0;
};

inline PlayerDesign solve_p1_player(const NashSystem& sys, const DesignOptions& opt, int i) {
  const Mat& A = sys.Lambda;
  const Vec b = -sys.zeta;
  const int s = static_cast<int>(A.cols());
  PlayerDesign d;
  d.rank_sv_min = detail::rank_certificate(A);
  if (detail::rank_deficient(A, opt.rank_tol)) {
    Vec a0 = detail::min_norm_lsq(A, b, 0.0, opt.rank_tol);
    double r0 = (A * a0 - b).norm();
    if (r0 > opt.residual_tol) {
      throw Error(ErrorCode::kRankDeficient,
                  "player " + std::to_string(i) + ": design rows rank deficient, residual " +
                      std::to_string(r0));
    }
  }
  d.alpha = detail::min_norm_lsq(A, b, opt.lambda, opt.rank_tol);
  d.slack = sys.c0 + sys.c.dot(d.alpha) - opt.epsilon;
  if (d.slack < 0.0) {
    double cn2 = sys.c.squaredNorm();
    if (cn2 <= 1e-28) {
      throw Error(ErrorCode::kInfeasibleMargin,
                  "player " + std::to_string(i) + ": incentive basis has no curvature at x^d");
    }
    Vec ap = sys.c * ((opt.epsilon - sys.c0) / cn2);
    Vec a = ap;
    if (s > 1) {
      Mat N = detail::null_basis(sys.c);
      Vec z = detail::min_norm_lsq(A * N, b - A * ap, opt.lambda, opt.rank_tol);
      a = ap + N * z;
    }
    d.slack = sys.c0 + sys.c.dot(a) - opt.epsilon;
    if (d.slack < 0.0) {
      a += sys.c * (-d.slack / cn2);
      d.slack = sys.c0 + sys.c.dot(a) - opt.epsilon;
    }
    if (d.slack < -1e-12) {
      throw Error(ErrorCode::kInfeasibleMargin,
                  "player " + std::to_string(i) + ": slack " + std::to_string(d.slack));
    }
    d.slack = std::max(d.slack, 0.0);
    Vec grad = 2.0 * A.transpose() * (A * a - b) + 2.0 * opt.lambda * a;
    d.multiplier = sys.c.dot(grad) / cn2;
    d.alpha = a;
    d.active = true;
  }
  d.residual = (sys.zeta + A * d.alpha).norm();
  return d;
}

inline DesignResult solve_p1(const std::vector<NashSystem>& systems, const DesignOptions& opt) {
  const int n = static_cast<int>(systems.size());
  DesignResult r;
  r.residual = Vec(n);
  r.slack = Vec(n);
  r.rank_sv_min = Vec(n);
  r.regularized = opt.lambda > 0.0;
  for (int i = 0; i < n; ++i) {
    PlayerDesign d = solve_p1_player(systems[i], opt, i);
    r.alpha.push_back(d.alpha);
    r.residual(i) = d.residual;
    r.slack(i) = d.slack;
    r.rank_sv_min(i) = d.rank_sv_min;
    r.constraint_active.push_back(d.active);
    if (d.active && d.multiplier < -1e-8) r.feasible = false;
    if (d.slack < 0.0 || (opt.lambda == 0.0 && d.residual > opt.residual_tol)) r.feasible = false;
  }
  return r;
}

// Joint design with min eig(sym(D omega(x^d))) >= epsilon, by an exterior
// quadratic penalty whose weight doubles until the margin holds.
inline DesignResult solve_p2(const GameSpec& g, const ParamSet& theta_hat, const Vec& xd,
                             const std::vector<NashSystem>& systems, const DesignOptions& opt,
                             const SolverOptions& classify_opt = {}) {
  const int n = g.n;
  std::vector<int> off(n + 1, 0);
  for (int i = 0; i < n; ++i) off[i + 1] = off[i] + g.players[i].s();
  const int S = off[n];
  int rows = 0;
  for (const auto& sys : systems) rows += static_cast<int>(sys.Lambda.rows());

  Mat A = Mat::Zero(rows, S);
  Vec b(rows);
  for (int i = 0, r0 = 0; i < n; ++i) {
    const NashSystem& sys = systems[i];
    A.block(r0, off[i], sys.Lambda.rows(), sys.Lambda.cols()) = sys.Lambda;
    b.segment(r0, sys.zeta.size()) = -sys.zeta;
    r0 += static_cast<int>(sys.zeta.size());
  }
  // D omega = J0 + sum_k alpha_k E_k; E_k only touches its player's row.
  Mat J0(n, n);
  std::vector<Mat> E(S, Mat::Zero(n, n));
  for (int i = 0; i < n; ++i) {
    const PlayerSpec& p = g.players[i];
    for (int j = 0; j < n; ++j) {
      J0(i, j) = p.nominal.hess_entry(xd, i, j).dot(theta_hat[i]);
      Vec e = p.incentive.hess_entry(xd, i, j);
      for (int k = 0; k < p.s(); ++k) E[off[i] + k](i, j) = e(k);
    }
  }
  auto jac = [&](const Vec& a) {
    Mat J = J0;
    for (int k = 0; k < S; ++k) J += a(k) * E[k];
    return J;
  };
  auto gfun = [&](const Vec& a) { return min_sym_eig(jac(a)); };
  auto ggrad = [&](const Vec& a) {
    Vec v = min_sym_eigvec(jac(a));
    Vec gr(S);
    for (int k = 0; k < S; ++k) gr(k) = v.dot(E[k] * v);
    return gr;
  };
  auto objective = [&](const Vec& a) {
    return (A * a - b).squaredNorm() + opt.lambda * a.squaredNorm();
  };

  for (int i = 0; i < n; ++i) {
    const Mat& L = systems[i].Lambda;
    if (detail::rank_deficient(L, opt.rank_tol)) {
      Vec a0 = detail::min_norm_lsq(L, -systems[i].zeta, 0.0, opt.rank_tol);
      if ((L * a0 + systems[i].zeta).norm() > opt.residual_tol) {
        throw Error(ErrorCode::kRankDeficient,
                    "player " + std::to_string(i) + ": design rows rank deficient");
      }
    }
  }

  Vec a(S);
  for (int i = 0; i < n; ++i) {
    a.segment(off[i], g.players[i].s()) =
        detail::min_norm_lsq(systems[i].Lambda, -systems[i].zeta, opt.lambda, opt.rank_tol);
  }

  DesignResult r;
  r.regularized = opt.lambda > 0.0;
  bool active = false;
  if (gfun(a) < opt.epsilon) {
    active = true;
    const double target = opt.epsilon + 1e-9 * std::max(1.0, std::abs(opt.epsilon));
    double rho = 10.0;
    bool ok = false;
    for (int outer = 0; outer < 90 && !ok; ++outer, rho *= 2.0) {
      auto penal = [&](const Vec& x) {
        double v = std::max(0.0, target - gfun(x));
        return objective(x) + rho * v * v;
      };
      for (int it = 0; it < 200; ++it) {
        double g0 = gfun(a);
        Vec gr = ggrad(a);
        bool pen = target - g0 > 0.0;
        int extra = (opt.lambda > 0.0 ? S : 0) + (pen ? 1 : 0);
        Mat M(rows + extra, S);
        Vec rhs(rows + extra);
        M.topRows(rows) = A;
        rhs.head(rows) = b;
        int at = rows;
        if (opt.lambda > 0.0) {
          M.block(at, 0, S, S) = std::sqrt(opt.lambda) * Mat::Identity(S, S);
          rhs.segment(at, S).setZero();
          at += S;
        }
        if (pen) {
          M.row(at) = std::sqrt(rho) * gr.transpose();
          rhs(at) = std::sqrt(rho) * (target - g0 + gr.dot(a));
        }
        Vec cand = detail::min_norm_lsq(M, rhs, 0.0, opt.rank_tol);
        Vec step = cand - a;
        double f0 = penal(a);
        double t = 1.0;
        while (t > 1e-12 && penal(a + t * step) > f0) t *= 0.5;
        if (t <= 1e-12) break;
        a += t * step;
        if (t * step.norm() <= 1e-14 * (1.0 + a.norm())) break;
      }
      double gv = gfun(a);
      double mu = 2.0 * rho * std::max(0.0, target - gv);
      Vec stat = 2.0 * A.transpose() * (A * a - b) + 2.0 * opt.lambda * a - mu * ggrad(a);
      r.stationarity = stat.norm();
      ok = gv >= opt.epsilon && r.stationarity <= 1e-7 * (1.0 + 2.0 * (A.transpose() * b).norm());
    }
    if (!ok) {
      throw Error(ErrorCode::kInfeasibleStability,
                  "stability margin " + std::to_string(opt.epsilon) +
                      " not reached; min eig " + std::to_string(gfun(a)));
    }
  }

  double gv = gfun(a);
  r.residual = Vec(n);
  r.slack = Vec::Constant(n, gv - opt.epsilon);
  r.rank_sv_min = Vec(n);
  for (int i = 0; i < n; ++i) {
    Vec ai = a.segment(off[i], g.players[i].s());
    r.alpha.push_back(ai);
    r.residual(i) = (systems[i].zeta + systems[i].Lambda * ai).norm();
    r.rank_sv_min(i) = detail::rank_certificate(systems[i].Lambda);
    r.constraint_active.push_back(active);
    if (opt.lambda == 0.0 && r.residual(i) > opt.residual_tol) r.feasible = false;
  }
  if (gv < opt.epsilon) r.feasible = false;
  SolverOptions co = classify_opt;
  co.tol = std::max(co.tol, 1e-6);
  EquilibriumReport rep = classify(g, theta_hat, r.alpha, xd, co);
  r.verified = rep.is_stable && (opt.lambda > 0.0 || rep.is_differential_nash);
  return r;
}

// [Psi_i(x)^T; Psi_i(x^d)^T] alpha_i = [(x^d_i - a x_i - b tau) / c - <Phi_i(x), theta_i>; v^d_i]
// The second row is dropped for players without a value target.
inline DesignResult solve_myopic(const GameSpec& g, const ParamSet& theta_hat, const Vec& x_curr,
                                 const Vec& xd, const std::vector<std::optional<double>>& vd,
                                 const std::vector<MyopicModel>& models, double tau_forecast,
                                 const DesignOptions& opt) {
  check_dim(x_curr, g.n, "x_curr");
  check_dim(xd, g.n, "x_desired");
  DesignResult r;
  r.regularized = opt.lambda > 0.0;
  r.residual = Vec(g.n);
  r.slack = Vec::Constant(g.n, std::numeric_limits<double>::quiet_NaN());
  r.rank_sv_min = Vec(g.n);
  for (int i = 0; i < g.n; ++i) {
    const PlayerSpec& p = g.players[i];
    MyopicModel md = models.empty() ? MyopicModel{} : models[i];
    bool pinned = i < static_cast<int>(vd.size()) && vd[i].has_value();
    Mat A(pinned ? 2 : 1, p.s());
    Vec rhs(A.rows());
    A.row(0) = p.incentive.eval(x_curr).transpose();
    rhs(0) = (xd(i) - md.self_weight * x_curr(i) - md.signal_weight * tau_forecast) / md.scale -
             p.nominal.eval(x_curr).dot(theta_hat[i]);
    if (pinned) {
      A.row(1) = p.incentive.eval(xd).transpose();
      rhs(1) = *vd[i];
    }
    Vec a = detail::min_norm_lsq(A, rhs, opt.lambda, opt.rank_tol);
    r.residual(i) = (A * a - rhs).norm();
    r.rank_sv_min(i) = detail::rank_certificate(A);
    if (opt.lambda == 0.0 && r.residual(i) > opt.residual_tol) {
      throw Error(ErrorCode::kRankDeficient,
                  "player " + std::to_string(i) + ": inconsistent design rows, residual " +
                      std::to_string(r.residual(i)));
    }
    r.alpha.push_back(a);
    r.constraint_active.push_back(false);
  }
  return r;
}

}  // namespace aidlab

#endif  // AIDLAB_DESIGNER_HPP_
