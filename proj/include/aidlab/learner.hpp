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

// Online estimation of the agents' cost parameters: observation records,
// admissible sets cut by second-order conditions, and the prox-mapping update.

#ifndef AIDLAB_LEARNER_HPP_
#define AIDLAB_LEARNER_HPP_

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aidlab/core.hpp"
#include "aidlab/game.hpp"
#include "aidlab/response.hpp"

namespace aidlab {

enum class PlayMode { kNash, kMyopic };

struct ObservationRecord {
  int k = 0;
  Vec x_next;
  Vec x_curr;
  ParamSet alpha_used;
  Vec y;                // one scalar observation per player
  std::vector<Vec> xi;  // regression vectors
  Vec w_true;           // injected noise; never read by the learner
  double tau = 0.0;
};

// Nash: xi_i = D_i Phi_i(x+), y_i = -<D_i Psi_i(x+), alpha_i>.
// Myopic: xi_i = Phi_i(x), y_i = (x+_i - a x_i - b tau) / c - <Psi_i(x), alpha_i>.
inline ObservationRecord build_observation(PlayMode mode, const GameSpec& g,
                                           const Vec& x_next, const Vec& x_curr,
                                           const ParamSet& alpha_used,
                                           const std::vector<MyopicModel>& models = {},
                                           double tau = 0.0, int k = 0) {
  check_dim(x_next, g.n, "x_next");
  if (static_cast<int>(alpha_used.size()) != g.n) {
    throw Error(ErrorCode::kDimensionMismatch, "alpha_used needs one entry per player");
  }
  ObservationRecord r;
  r.k = k;
  r.x_next = x_next;
  r.x_curr = x_curr;
  r.alpha_used = alpha_used;
  r.tau = tau;
  r.y = Vec(g.n);
  r.w_true = Vec::Zero(g.n);
  for (int i = 0; i < g.n; ++i) {
    const PlayerSpec& p = g.players[i];
    check_dim(alpha_used[i], p.s(), "alpha");
    if (mode == PlayMode::kNash) {
      r.xi.push_back(p.nominal.grad(x_next, i));
      r.y(i) = -p.incentive.grad(x_next, i).dot(alpha_used[i]);
    } else {
      check_dim(x_curr, g.n, "x_curr");
      MyopicModel md = models.empty() ? MyopicModel{} : models[i];
      r.xi.push_back(p.nominal.eval(x_curr));
      double lifted = (x_next(i) - md.self_weight * x_curr(i) - md.signal_weight * tau) / md.scale;
      r.y(i) = lifted - p.incentive.eval(x_curr).dot(alpha_used[i]);
    }
  }
  return r;
}

struct LossGrad {
  double loss = 0.0;
  Vec grad;
};

inline LossGrad loss_and_gradient(const Vec& xi, double y, const Vec& theta) {
  check_dim(theta, static_cast<int>(xi.size()), "theta");
  double r = y - xi.dot(theta);
  return {0.5 * r * r, -xi * r};
}

// <a, theta> >= b
struct Halfspace {
  Vec a;
  double b = 0.0;
};

enum class SetMode { kStatic, kAccumulating };

class AdmissibleSet {
 public:
  AdmissibleSet() = default;
  AdmissibleSet(Box box, SetMode mode) : box_(std::move(box)), mode_(mode) {}

  const Box& box() const { return box_; }
  const std::vector<Halfspace>& rows() const { return rows_; }
  int row_count() const { return static_cast<int>(rows_.size()); }
  SetMode mode() const { return mode_; }
  int dim() const { return box_.dim(); }

  // Returns false when the row was dropped as dominated (by the box or by an
  // existing parallel row); the feasible set is unchanged either way.
  bool append(const Vec& a, double b, bool dedup = true) {
    check_dim(a, dim(), "halfspace normal");
    if (mode_ == SetMode::kStatic) {
      throw Error(ErrorCode::kConfigError, "static admissible set cannot accumulate rows");
    }
    double an = a.norm();
    if (an <= 1e-14) {
      if (b <= 1e-12) return false;
      throw Error(ErrorCode::kInfeasibleSet, "zero-normal halfspace with b > 0");
    }
    if (dedup) {
      // Minimum of <a, theta> over the box.
      double lo = 0.0;
      for (int j = 0; j < dim(); ++j) lo += std::min(a(j) * box_.lo(j), a(j) * box_.hi(j));
      if (lo >= b + 1e-12 * (1.0 + std::abs(b))) return false;
      Vec ah = a / an;
      double bh = b / an;
      for (const auto& r : rows_) {
        double rn = r.a.norm();
        if ((r.a / rn - ah).lpNorm<Eigen::Infinity>() <= 1e-12 && bh <= r.b / rn + 1e-12) {
          return false;
        }
      }
    }
    rows_.push_back({a, b});
    return true;
  }

  // Largest constraint violation (<= 0 when feasible); first `limit` rows only
  // when limit >= 0.
  double max_violation(const Vec& theta, int limit = -1) const {
    double v = std::max((box_.lo - theta).maxCoeff(), (theta - box_.hi).maxCoeff());
    int nr = limit < 0 ? row_count() : std::min(limit, row_count());
    for (int r = 0; r < nr; ++r) {
      const Halfspace& h = rows_[r];
      v = std::max(v, (h.b - h.a.dot(theta)) / h.a.norm());
    }
    return v;
  }

  bool contains(const Vec& theta, double tol = 1e-12, int limit = -1) const {
    return max_violation(theta, limit) <= tol * (1.0 + theta.norm());
  }

  AdmissibleSet prefix(int rows) const {
    AdmissibleSet s(box_, mode_);
    s.rows_.assign(rows_.begin(), rows_.begin() + std::min(rows, row_count()));
    return s;
  }

 private:
  Box box_;
  std::vector<Halfspace> rows_;
  SetMode mode_ = SetMode::kStatic;
};

struct ProjectionResult {
  Vec point;
  int sweeps = 0;
  double max_violation = 0.0;
  bool polished = false;
};

namespace detail {

// Constraint <a, x> >= b, or = b when equality (pinned coordinates).
struct Cons {
  Vec a;
  double b;
  bool equality;
};

inline std::vector<Cons> make_constraints(const Box& box, const std::vector<Halfspace>& rows) {
  const int m = box.dim();
  std::vector<Cons> cs;
  for (int j = 0; j < m; ++j) {
    Vec e = Vec::Unit(m, j);
    if (box.pinned(j)) {
      cs.push_back({e, box.lo(j), true});
    } else {
      if (std::isfinite(box.lo(j))) cs.push_back({e, box.lo(j), false});
      if (std::isfinite(box.hi(j))) cs.push_back({-e, -box.hi(j), false});
    }
  }
  for (const auto& h : rows) cs.push_back({h.a, h.b, false});
  return cs;
}

inline double violation(const Cons& c, const Vec& x) {
  double s = (c.b - c.a.dot(x)) / c.a.norm();
  return c.equality ? std::abs(s) : s;
}

// Primal-dual active-set refinement of the projection of z, started from the
// active set guessed at x. Exact up to rounding when it succeeds.
inline std::optional<Vec> polish(const std::vector<Cons>& cs, const Vec& z, const Vec& x) {
  const int nc = static_cast<int>(cs.size());
  const double scale = 1.0 + z.norm();
  std::vector<bool> act(nc, false);
  for (int c = 0; c < nc; ++c) {
    act[c] = cs[c].equality || violation(cs[c], x) >= -1e-7 * scale;
  }
  for (int it = 0; it < 4 * nc + 10; ++it) {
    std::vector<int> idx;
    for (int c = 0; c < nc; ++c) {
      if (act[c]) idx.push_back(c);
    }
    Vec p = z;
    Vec mu;
    if (!idx.empty()) {
      Mat A(idx.size(), z.size());
      Vec rhs(idx.size());
      for (std::size_t r = 0; r < idx.size(); ++r) {
        A.row(r) = cs[idx[r]].a.transpose();
        rhs(r) = cs[idx[r]].b - cs[idx[r]].a.dot(z);
      }
      Eigen::JacobiSVD<Mat> svd(A * A.transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);
      svd.setThreshold(1e-12);
      mu = svd.solve(rhs);
      p = z + A.transpose() * mu;
    }
    // Most negative multiplier among inequalities.
    int drop = -1;
    double worst_mu = -1e-12 * scale;
    for (std::size_t r = 0; r < idx.size(); ++r) {
      if (!cs[idx[r]].equality && mu(r) < worst_mu) {
        worst_mu = mu(r);
        drop = idx[r];
      }
    }
    int add = -1;
    double worst_v = 1e-13 * scale;
    for (int c = 0; c < nc; ++c) {
      if (act[c]) continue;
      double v = violation(cs[c], p);
      if (v > worst_v) {
        worst_v = v;
        add = c;
      }
    }
    if (drop < 0 && add < 0) {
      // Active rows must also hold; the pseudoinverse can leave them unmet
      // when they are inconsistent.
      for (int c : idx) {
        if (std::abs(violation(cs[c], p)) > 1e-10 * scale) return std::nullopt;
      }
      return p;
    }
    if (add >= 0) act[add] = true;
    if (drop >= 0) act[drop] = false;
  }
  return std::nullopt;
}

// Lawson-Hanson: argmin |E u - f| subject to u >= 0.
inline std::optional<Vec> nnls(const Mat& E, const Vec& f) {
  const int n = static_cast<int>(E.cols());
  Vec u = Vec::Zero(n);
  std::vector<bool> in(n, false);
  const double tol = 1e-13 * (1.0 + E.norm()) * (1.0 + f.norm());
  const int max_inner = 3 * n + 30;
  int inner = 0;
  for (int outer = 0; outer < 3 * n + 30; ++outer) {
    Vec w = E.transpose() * (f - E * u);
    int t = -1;
    double wmax = tol;
    for (int j = 0; j < n; ++j) {
      if (!in[j] && w(j) > wmax) {
        wmax = w(j);
        t = j;
      }
    }
    if (t < 0) return u;
    in[t] = true;
    while (true) {
      std::vector<int> idx;
      for (int j = 0; j < n; ++j) {
        if (in[j]) idx.push_back(j);
      }
      Mat Ep(E.rows(), idx.size());
      for (std::size_t c = 0; c < idx.size(); ++c) Ep.col(c) = E.col(idx[c]);
      Vec zp = Ep.colPivHouseholderQr().solve(f);
      if (zp.minCoeff() > 0.0) {
        u.setZero();
        for (std::size_t c = 0; c < idx.size(); ++c) u(idx[c]) = zp(c);
        break;
      }
      double step = 1.0;
      for (std::size_t c = 0; c < idx.size(); ++c) {
        if (zp(c) <= 0.0) step = std::min(step, u(idx[c]) / (u(idx[c]) - zp(c)));
      }
      for (std::size_t c = 0; c < idx.size(); ++c) {
        u(idx[c]) += step * (zp(c) - u(idx[c]));
        if (u(idx[c]) <= 1e-15) {
          u(idx[c]) = 0.0;
          in[idx[c]] = false;
        }
      }
      if (++inner > max_inner) return std::nullopt;
    }
  }
  return std::nullopt;
}

// Exact projection of z as a least-distance program: min |y| s.t.
// <a, z + y> >= b, solved through NNLS. Pinned coordinates are substituted.
inline std::optional<Vec> least_distance(const std::vector<Cons>& cs, const Vec& z) {
  const int m = static_cast<int>(z.size());
  Vec fixed = Vec::Constant(m, std::numeric_limits<double>::quiet_NaN());
  for (const auto& c : cs) {
    if (!c.equality) continue;
    int j;
    c.a.cwiseAbs().maxCoeff(&j);
    fixed(j) = c.b / c.a(j);
  }
  std::vector<int> free;
  for (int j = 0; j < m; ++j) {
    if (std::isnan(fixed(j))) free.push_back(j);
  }
  Vec x = z;
  for (int j = 0; j < m; ++j) {
    if (!std::isnan(fixed(j))) x(j) = fixed(j);
  }
  std::vector<const Cons*> ineq;
  for (const auto& c : cs) {
    if (!c.equality) ineq.push_back(&c);
  }
  if (free.empty() || ineq.empty()) return x;
  const int mf = static_cast<int>(free.size());
  const int nc = static_cast<int>(ineq.size());
  Mat E(mf + 1, nc);
  for (int c = 0; c < nc; ++c) {
    const Cons& k = *ineq[c];
    double nrm = k.a.norm();
    for (int j = 0; j < mf; ++j) E(j, c) = k.a(free[j]) / nrm;
    E(mf, c) = (k.b - k.a.dot(x)) / nrm;
  }
  Vec f = Vec::Zero(mf + 1);
  f(mf) = 1.0;
  auto u = nnls(E, f);
  if (!u) return std::nullopt;
  Vec r = E * *u - f;
  if (r.norm() < 1e-12 || std::abs(r(mf)) < 1e-300) return std::nullopt;
  for (int j = 0; j < mf; ++j) x(free[j]) += -r(j) / r(mf);
  return x;
}

// Dykstra's alternating projections over the box and the given rows.
inline ProjectionResult dykstra(const Box& box, const std::vector<Halfspace>& rows,
                                const std::vector<int>& use, const Vec& z) {
  const int nsets = 1 + static_cast<int>(use.size());
  std::vector<Vec> incr(nsets, Vec::Zero(z.size()));
  Vec x = z;
  ProjectionResult res;
  const double scale = 1.0 + z.norm();
  for (int sweep = 1; sweep <= 500; ++sweep) {
    Vec before = x;
    Vec y = box.clamp(x + incr[0]);
    incr[0] = x + incr[0] - y;
    x = y;
    for (std::size_t r = 0; r < use.size(); ++r) {
      const Halfspace& h = rows[use[r]];
      Vec v = x + incr[r + 1];
      double gap = h.b - h.a.dot(v);
      y = gap > 0.0 ? Vec(v + (gap / h.a.squaredNorm()) * h.a) : v;
      incr[r + 1] = v - y;
      x = y;
    }
    res.sweeps = sweep;
    double viol = std::max((box.lo - x).maxCoeff(), (x - box.hi).maxCoeff());
    for (int r : use) viol = std::max(viol, (rows[r].b - rows[r].a.dot(x)) / rows[r].a.norm());
    res.max_violation = viol;
    if ((x - before).norm() <= 1e-10 * scale && viol <= 1e-10 * scale) break;
  }
  res.point = x;
  return res;
}

}  // namespace detail

// Euclidean projection of z onto box ∩ rows. Rows enter a working set only
// when violated, so long accumulated lists stay cheap.
inline ProjectionResult project_euclidean(const Box& box, const std::vector<Halfspace>& rows,
                                          const Vec& z) {
  check_dim(z, box.dim(), "projection point");
  const double scale = 1.0 + z.norm();
  ProjectionResult res;
  res.point = box.clamp(z);
  std::vector<int> work;
  auto violated = [&](const Vec& x, std::vector<int>& out) {
    out.clear();
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
      if (rows[r].b - rows[r].a.dot(x) > 1e-13 * scale * rows[r].a.norm()) out.push_back(r);
    }
  };
  std::vector<int> add;
  violated(res.point, add);
  if (add.empty()) return res;
  for (int round = 0; round <= static_cast<int>(rows.size()); ++round) {
    for (int r : add) {
      if (std::find(work.begin(), work.end(), r) == work.end()) work.push_back(r);
    }
    std::sort(work.begin(), work.end());
    std::vector<Halfspace> sub;
    for (int r : work) sub.push_back(rows[r]);
    std::vector<int> all(sub.size());
    for (std::size_t r = 0; r < sub.size(); ++r) all[r] = static_cast<int>(r);
    ProjectionResult d = detail::dykstra(box, sub, all, z);
    auto cs = detail::make_constraints(box, sub);
    if (auto p = detail::polish(cs, z, d.point)) {
      d.point = *p;
      d.polished = true;
      d.max_violation = 0.0;
      for (const auto& c : cs) d.max_violation = std::max(d.max_violation, detail::violation(c, d.point));
    } else if (auto q = detail::least_distance(cs, z)) {
      d.point = *q;
      d.polished = true;
      d.max_violation = 0.0;
      for (const auto& c : cs) d.max_violation = std::max(d.max_violation, detail::violation(c, d.point));
    }
    if (d.max_violation > 1e-8 * scale) {
      throw Error(ErrorCode::kInfeasibleSet,
                  "projection residual stalled at " + std::to_string(d.max_violation) +
                      " after " + std::to_string(d.sweeps) + " sweeps over " +
                      std::to_string(sub.size()) + " halfspaces");
    }
    res = d;
    violated(res.point, add);
    std::erase_if(add, [&](int r) {
      return std::find(work.begin(), work.end(), r) != work.end();
    });
    if (add.empty()) return res;
  }
  return res;
}

enum class ProxKind { kEuclidean, kDiagonal };

// beta(theta) = 0.5 theta^T D theta with D = diag(d); Euclidean is d = 1.
// Norm pair is the Euclidean norm, so the modulus is min(d).
class ProxOperator {
 public:
  ProxOperator() = default;
  static ProxOperator euclidean(int m) { return ProxOperator(ProxKind::kEuclidean, Vec::Ones(m)); }
  static ProxOperator diagonal(const Vec& d) {
    if (d.size() == 0 || d.minCoeff() <= 0.0) {
      throw Error(ErrorCode::kConfigError, "diagonal prox weights must be > 0");
    }
    return ProxOperator(ProxKind::kDiagonal, d);
  }

  ProxKind kind() const { return kind_; }
  const Vec& weights() const { return d_; }
  int dim() const { return static_cast<int>(d_.size()); }
  double modulus() const { return d_.minCoeff(); }

  double beta(const Vec& t) const { return 0.5 * t.dot(d_.cwiseProduct(t)); }
  Vec grad_beta(const Vec& t) const { return d_.cwiseProduct(t); }
  double bregman(const Vec& t1, const Vec& t2) const {
    Vec e = t2 - t1;
    return 0.5 * e.dot(d_.cwiseProduct(e));
  }
  double norm(const Vec& v) const { return v.norm(); }
  double dual_norm(const Vec& v) const { return v.norm(); }

  // Minimizer of <g, t'> + V(t, t') over the set: the D-weighted projection of
  // t - D^{-1} g.
  ProjectionResult prox(const AdmissibleSet& set, const Vec& t, const Vec& g) const {
    check_dim(t, dim(), "theta");
    check_dim(g, dim(), "prox gradient");
    Vec z = t - g.cwiseQuotient(d_);
    if (kind_ == ProxKind::kEuclidean) return project_euclidean(set.box(), set.rows(), z);
    Vec r = d_.cwiseSqrt();
    Box b{set.box().lo.cwiseProduct(r), set.box().hi.cwiseProduct(r)};
    std::vector<Halfspace> rows;
    rows.reserve(set.rows().size());
    for (const auto& h : set.rows()) rows.push_back({h.a.cwiseQuotient(r), h.b});
    ProjectionResult res = project_euclidean(b, rows, z.cwiseProduct(r));
    res.point = res.point.cwiseQuotient(r);
    return res;
  }

 private:
  ProxOperator(ProxKind k, Vec d) : kind_(k), d_(std::move(d)) {}
  ProxKind kind_ = ProxKind::kEuclidean;
  Vec d_;
};

inline Vec prox_update(const ProxOperator& prox, const AdmissibleSet& set, const Vec& theta,
                       const Vec& g) {
  return prox.prox(set, theta, g).point;
}

struct ProxCheck {
  bool holds = false;
  double slack = 0.0;  // rhs - lhs
  double lhs = 0.0;
  double rhs = 0.0;
  Vec point;
};

inline ProxCheck verify_prox_inequality(const ProxOperator& prox, const AdmissibleSet& set_k,
                                        const AdmissibleSet& set_k1, const Vec& theta_star,
                                        const Vec& theta_hat, const Vec& g) {
  (void)set_k;
  if (!set_k1.contains(theta_star)) {
    throw Error(ErrorCode::kHypothesisViolated, "theta* is outside the next admissible set");
  }
  ProxCheck c;
  c.point = prox_update(prox, set_k1, theta_hat, g);
  c.lhs = prox.bregman(c.point, theta_star);
  c.rhs = prox.bregman(theta_hat, theta_star) + g.dot(theta_star - theta_hat) +
          sq(prox.dual_norm(g)) / (2.0 * prox.modulus());
  c.slack = c.rhs - c.lhs;
  c.holds = c.slack >= -1e-12;
  return c;
}

inline void append_second_order_constraint(AdmissibleSet& set, const GameSpec& g,
                                           const Vec& x_obs, const Vec& alpha_prev, int i,
                                           bool dedup = true) {
  const PlayerSpec& p = g.players[i];
  set.append(p.nominal.hess_diag(x_obs, i), -p.incentive.hess_diag(x_obs, i).dot(alpha_prev),
             dedup);
}

enum class EtaSchedule { kConstant, kDecay };

struct LearnerOptions {
  EtaSchedule schedule = EtaSchedule::kConstant;
  std::optional<double> eta;   // fixed constant step
  std::optional<double> eta0;  // decay numerator
  int pe_window = 0;           // 0: 5 x (number of free coordinates)
  bool dedup = true;
};

struct LearnerStep {
  double loss = 0.0;
  double residual = 0.0;  // y - <xi, theta_hat> before the update
  double eta = 0.0;
  double xi_sq = 0.0;
  double pe_window = std::numeric_limits<double>::quiet_NaN();
  double pe_step = 0.0;
};

// One player's estimator state.
class PlayerLearner {
 public:
  PlayerLearner(AdmissibleSet set, ProxOperator prox, const Vec& theta0, double cs_warmup,
                LearnerOptions opt)
      : set_(std::move(set)), prox_(std::move(prox)), opt_(opt), cs_(cs_warmup) {
    check_dim(theta0, set_.dim(), "theta0");
    if (prox_.dim() != set_.dim()) {
      throw Error(ErrorCode::kDimensionMismatch, "prox weights vs parameter dimension");
    }
    theta_ = set_.contains(theta0) ? theta0 : prox_update(prox_, set_, theta0, Vec::Zero(theta0.size()));
    for (int j = 0; j < set_.dim(); ++j) {
      if (!set_.box().pinned(j)) free_.push_back(j);
    }
    window_ = opt_.pe_window > 0 ? opt_.pe_window : 5 * std::max<int>(1, free_.size());
    double nu = prox_.modulus();
    if (opt_.schedule == EtaSchedule::kConstant) {
      eta_ = opt_.eta ? *opt_.eta : (cs_ > 0.0 ? nu / cs_ : 1.0);
    } else {
      eta0_ = opt_.eta0 ? *opt_.eta0 : (cs_ > 0.0 ? nu / cs_ : 1.0);
    }
  }

  const Vec& theta() const { return theta_; }
  const AdmissibleSet& set() const { return set_; }
  AdmissibleSet& mutable_set() { return set_; }
  const ProxOperator& prox() const { return prox_; }
  double cs_hat() const { return cs_; }
  double eta0() const { return eta0_; }
  int window() const { return window_; }
  const std::vector<int>& free_coordinates() const { return free_; }

  double current_eta(int k) const {
    return opt_.schedule == EtaSchedule::kConstant ? eta_ : eta0_ / (k + 1.0);
  }

  LearnerStep update(const Vec& xi, double y, int k) {
    LearnerStep st;
    st.xi_sq = xi.squaredNorm();
    cs_ = std::max(cs_, st.xi_sq);
    if (opt_.schedule == EtaSchedule::kConstant && !opt_.eta && cs_ > 0.0) {
      eta_ = std::min(eta_, prox_.modulus() / cs_);
    }
    st.eta = current_eta(k);
    LossGrad lg = loss_and_gradient(xi, y, theta_);
    st.loss = lg.loss;
    st.residual = y - xi.dot(theta_);
    theta_ = prox_update(prox_, set_, theta_, st.eta * lg.grad);

    Vec xf(free_.size());
    for (std::size_t j = 0; j < free_.size(); ++j) xf(j) = xi(free_[j]);
    st.pe_step = free_.size() == 1 ? xf(0) * xf(0) : 0.0;
    recent_.push_back(xf);
    if (static_cast<int>(recent_.size()) > window_) recent_.pop_front();
    if (static_cast<int>(recent_.size()) == window_ && !free_.empty()) {
      Mat S = Mat::Zero(free_.size(), free_.size());
      for (const auto& v : recent_) S += v * v.transpose();
      S /= window_;
      st.pe_window = min_sym_eig(S);
    }
    return st;
  }

 private:
  AdmissibleSet set_;
  ProxOperator prox_;
  LearnerOptions opt_;
  Vec theta_;
  double cs_ = 0.0;
  double eta_ = 0.0;
  double eta0_ = 0.0;
  int window_ = 5;
  std::vector<int> free_;
  std::deque<Vec> recent_;
};

}  // namespace aidlab

#endif  // AIDLAB_LEARNER_HPP_
