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

// The adaptive incentive loop: issue alpha, observe the response, update the
// estimates, redesign alpha. Also diagnostics over a finished trace and the
// perturbation bound check around a designed equilibrium.

#ifndef AIDLAB_LOOP_HPP_
#define AIDLAB_LOOP_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "aidlab/core.hpp"
#include "aidlab/designer.hpp"
#include "aidlab/game.hpp"
#include "aidlab/learner.hpp"
#include "aidlab/response.hpp"

namespace aidlab {

enum class DesignerKind { kP1, kP2, kMyopic };

inline const char* designer_name(DesignerKind d) {
  switch (d) {
    case DesignerKind::kP1: return "p1";
    case DesignerKind::kP2: return "p2";
    case DesignerKind::kMyopic: return "myopic";
  }
  return "?";
}

struct RunConfig {
  GameSpec game;
  ResponseModel response;
  std::vector<MyopicModel> coordinator;  // coordinator's myopic model per player

  ProxKind prox = ProxKind::kEuclidean;
  std::vector<Vec> prox_weights;  // diagonal only
  LearnerOptions learner;
  std::optional<ParamSet> theta0;

  DesignerKind designer = DesignerKind::kP1;
  DesignOptions design;
  bool fallback = true;

  int iterations = 100;
  std::uint64_t seed = 0;
  Vec x_desired;
  std::vector<std::optional<double>> v_desired;
  Vec x0;

  double noise_variance = 0.0;
  SignalSpec signal;

  // Growth condition constants for the noisy-rate check; NaN disables it.
  double rk_k1 = std::numeric_limits<double>::quiet_NaN();
  double rk_k2 = std::numeric_limits<double>::quiet_NaN();
  int rk_t0 = 1;

  PlayMode mode() const {
    return response.mode == ResponseMode::kNash ? PlayMode::kNash : PlayMode::kMyopic;
  }
  MyopicModel model(int i) const {
    return coordinator.empty() ? MyopicModel{} : coordinator[i];
  }
};

struct IterationRecord {
  int k = 0;
  Vec x;     // x^{k+1}
  Vec xhat;  // coordinator's prediction of x^{k+1} (myopic)
  double tau = 0.0;
  Vec y;
  std::vector<Vec> xi;
  Vec w;
  Vec loss;
  Vec residual;  // y - <xi, theta^k>
  Vec eta;
  Vec xi_sq;
  Vec pe_window;
  Vec pe_step;
  ParamSet theta;  // theta^{k+1}
  ParamSet alpha;  // alpha^{k+1}
  Vec V;           // V(theta^{k+1}, theta*)
  Vec theta_err;
  Vec v;  // <Psi_i(x^{k+1}), alpha_i^{k+1}>
  double xd_err = 0.0;
  double v_err = 0.0;
  double pred_err = 0.0;
  std::vector<int> set_rows;
  DesignResult design;
  bool design_failed = false;
  std::string design_error;
  bool response_boundary = false;
};

struct RunTrace {
  Vec x0;
  ParamSet theta0;
  ParamSet alpha0;
  Vec V0;
  Vec cs_warmup;
  std::vector<IterationRecord> rows;
  std::vector<AdmissibleSet> final_sets;
  std::vector<std::string> warnings;
  int n = 0;
};

namespace detail {

inline Vec regressor(PlayMode mode, const PlayerSpec& p, const Vec& x, int i) {
  return mode == PlayMode::kNash ? p.nominal.grad(x, i) : p.nominal.eval(x);
}

inline DesignResult design_step(const RunConfig& cfg, const ParamSet& theta, const Vec& x) {
  const GameSpec& g = cfg.game;
  if (cfg.designer == DesignerKind::kMyopic) {
    std::vector<MyopicModel> models;
    for (int i = 0; i < g.n; ++i) models.push_back(cfg.model(i));
    return solve_myopic(g, theta, x, cfg.x_desired, cfg.v_desired, models, cfg.signal.mean,
                        cfg.design);
  }
  std::vector<NashSystem> sys;
  for (int i = 0; i < g.n; ++i) {
    std::optional<double> vd = i < static_cast<int>(cfg.v_desired.size()) ? cfg.v_desired[i]
                                                                           : std::nullopt;
    sys.push_back(assemble_nash_system(g, theta[i], cfg.x_desired, vd, i));
  }
  if (cfg.designer == DesignerKind::kP1) return solve_p1(sys, cfg.design);
  return solve_p2(g, theta, cfg.x_desired, sys, cfg.design, cfg.response.solver);
}

}  // namespace detail

inline RunTrace run(const RunConfig& cfg) {
  const GameSpec& g = cfg.game;
  g.validate();
  const int n = g.n;
  const PlayMode mode = cfg.mode();
  const bool truth = g.has_truth();
  check_dim(cfg.x_desired, n, "x_desired");
  check_dim(cfg.x0, n, "x0");
  if ((mode == PlayMode::kNash) != (cfg.designer != DesignerKind::kMyopic)) {
    throw Error(ErrorCode::kConfigError, "designer kind does not match the play mode");
  }

  RunTrace tr;
  tr.n = n;
  GaussianStream tau_stream(cfg.seed, 0);
  std::vector<GaussianStream> noise;
  for (int i = 0; i < n; ++i) noise.emplace_back(cfg.seed, 1 + i);

  ParamSet alpha = g.zero_alpha();
  Vec x = cfg.x0;
  try {
    if (mode == PlayMode::kNash) x = respond_nash(g, alpha, cfg.x0, cfg.response.solver);
  } catch (const Error& e) {
    throw Error(e.code(), std::string("nominal equilibrium: ") + e.what());
  }

  std::vector<PlayerLearner> learners;
  tr.cs_warmup = Vec(n);
  for (int i = 0; i < n; ++i) {
    const PlayerSpec& p = g.players[i];
    double cs = 0.0;
    for (const Vec& probe : {x, Vec(cfg.x_desired)}) {
      cs = std::max(cs, detail::regressor(mode, p, probe, i).squaredNorm());
    }
    tr.cs_warmup(i) = cs;
    ProxOperator prox = cfg.prox == ProxKind::kEuclidean ? ProxOperator::euclidean(p.m())
                                                          : ProxOperator::diagonal(cfg.prox_weights.at(i));
    AdmissibleSet set(p.theta_box,
                      mode == PlayMode::kNash ? SetMode::kAccumulating : SetMode::kStatic);
    Vec t0 = cfg.theta0 ? (*cfg.theta0)[i] : p.theta_box.center();
    learners.emplace_back(std::move(set), prox, t0, cs, cfg.learner);
  }
  tr.x0 = x;
  tr.alpha0 = alpha;
  tr.V0 = Vec::Constant(n, std::nan(""));
  for (int i = 0; i < n; ++i) {
    tr.theta0.push_back(learners[i].theta());
    if (truth) tr.V0(i) = learners[i].prox().bregman(learners[i].theta(), g.players[i].true_theta);
  }

  std::vector<Vec> history{x};
  const double sigma = std::sqrt(std::max(0.0, cfg.noise_variance));
  const double tau_sd = std::sqrt(std::max(0.0, cfg.signal.variance));
  tr.rows.reserve(cfg.iterations);

  for (int k = 0; k < cfg.iterations; ++k) {
    IterationRecord rec;
    rec.k = k;
    try {
      double tau = cfg.signal.mean + (tau_sd > 0.0 ? tau_sd * tau_stream.draw() : 0.0);
      rec.tau = tau;
      Vec xn;
      switch (cfg.response.mode) {
        case ResponseMode::kNash:
          xn = respond_nash(g, alpha, x, cfg.response.solver);
          break;
        case ResponseMode::kGradientPlay:
          xn = respond_gradient_play(g, cfg.response.revenue, cfg.response.rates, alpha, x, tau);
          break;
        case ResponseMode::kBestResponse: {
          BestResponseResult br = respond_best_response(g, cfg.response, alpha, x, x, tau);
          xn = br.x;
          rec.response_boundary = br.any_boundary();
          break;
        }
        case ResponseMode::kFictitiousPlay: {
          BestResponseResult br = respond_fictitious_play(g, cfg.response, alpha, history, tau);
          xn = br.x;
          rec.response_boundary = br.any_boundary();
          break;
        }
        case ResponseMode::kLinearMyopic:
          xn = respond_linear_myopic(g, cfg.response.models, alpha, x, tau);
          break;
      }
      rec.w = Vec::Zero(n);
      if (sigma > 0.0) {
        for (int i = 0; i < n; ++i) rec.w(i) = sigma * noise[i].draw();
      }
      if (mode == PlayMode::kMyopic) xn += rec.w;
      if (g.wrap_angles) xn = wrap_angles(xn);

      std::vector<MyopicModel> models;
      for (int i = 0; i < n; ++i) models.push_back(cfg.model(i));
      ObservationRecord obs = build_observation(mode, g, xn, x, alpha, models, tau, k);
      if (mode == PlayMode::kNash) obs.y += rec.w;
      obs.w_true = rec.w;

      rec.xhat = Vec::Constant(n, std::nan(""));
      if (mode == PlayMode::kMyopic) {
        for (int i = 0; i < n; ++i) {
          const PlayerSpec& p = g.players[i];
          const MyopicModel md = cfg.model(i);
          rec.xhat(i) = md.self_weight * x(i) + md.signal_weight * tau +
                        md.scale * (p.nominal.eval(x).dot(learners[i].theta()) +
                                    p.incentive.eval(x).dot(alpha[i]));
        }
      }

      rec.y = obs.y;
      rec.xi = obs.xi;
      for (Vec* v : {&rec.loss, &rec.residual, &rec.eta, &rec.xi_sq, &rec.pe_window, &rec.pe_step,
                     &rec.V, &rec.theta_err})
        *v = Vec::Constant(n, std::nan(""));
      for (int i = 0; i < n; ++i) {
        if (mode == PlayMode::kNash) {
          append_second_order_constraint(learners[i].mutable_set(), g, xn, alpha[i], i,
                                         cfg.learner.dedup);
        }
        LearnerStep st = learners[i].update(obs.xi[i], obs.y(i), k);
        rec.loss(i) = st.loss;
        rec.residual(i) = st.residual;
        rec.eta(i) = st.eta;
        rec.xi_sq(i) = st.xi_sq;
        rec.pe_window(i) = st.pe_window;
        rec.pe_step(i) = st.pe_step;
        rec.theta.push_back(learners[i].theta());
        rec.set_rows.push_back(learners[i].set().row_count());
        if (truth) {
          rec.V(i) = learners[i].prox().bregman(learners[i].theta(), g.players[i].true_theta);
          rec.theta_err(i) = (learners[i].theta() - g.players[i].true_theta).norm();
        }
      }

      try {
        rec.design = detail::design_step(cfg, rec.theta, xn);
        alpha = rec.design.alpha;
      } catch (const Error& e) {
        if (!cfg.fallback) throw;
        rec.design_failed = true;
        rec.design_error = e.what();
        tr.warnings.push_back("iteration " + std::to_string(k) + ": design failed, reusing alpha (" +
                              e.what() + ")");
      }
      rec.alpha = alpha;

      rec.v = Vec(n);
      double vsq = 0.0;
      bool any_pinned = false;
      for (int i = 0; i < n; ++i) {
        rec.v(i) = g.players[i].incentive.eval(xn).dot(alpha[i]);
        if (i < static_cast<int>(cfg.v_desired.size()) && cfg.v_desired[i]) {
          vsq += sq(rec.v(i) - *cfg.v_desired[i]);
          any_pinned = true;
        }
      }
      rec.v_err = any_pinned ? std::sqrt(vsq) : std::nan("");
      rec.xd_err = strategy_distance(g, xn, cfg.x_desired);
      rec.pred_err = mode == PlayMode::kMyopic ? (rec.xhat - xn).norm() : std::nan("");
      rec.x = xn;
      x = xn;
      history.push_back(xn);
    } catch (const Error& e) {
      throw Error(e.code(), "iteration " + std::to_string(k) + ": " + e.what());
    }
    tr.rows.push_back(std::move(rec));
  }
  for (const auto& l : learners) tr.final_sets.push_back(l.set());
  return tr;
}

struct PlayerDiagnostics {
  double cs_hat = 0.0;
  double cp_window = std::nan("");  // min windowed PE over the run
  double cp_step = std::nan("");    // min per-step PE (one free coordinate only)
  bool pe_window_holds = false;
  bool pe_step_holds = false;
  double eta_final = 0.0;
  double eps_hat = std::nan("");
  bool step_hypothesis = false;
  int descent_violations = -1;  // -1: not applicable
  double max_descent_increase = 0.0;
  double max_contraction = std::nan("");  // max V_{k+1}/V_k
  double contraction_bound = std::nan("");  // 1 - 2 cp eps_hat
  double rate_slope = std::nan("");
  double rate_r2 = std::nan("");
  int rate_points = 0;
  double residual_mean_final_quarter = std::nan("");
  bool rk_applicable = false;
  bool rk_holds = false;
  double eta_sq_tail = std::nan("");
};

struct DiagnosticsReport {
  std::vector<PlayerDiagnostics> players;
  int iterations = 0;
  double final_xd_err = std::nan("");
  double final_v_err = std::nan("");
  double final_pred_err = std::nan("");
  double psi_lipschitz = std::nan("");
  int tracking_checked = 0;
  int tracking_violations = 0;
  int design_failures = 0;
  double noise_variance = 0.0;
};

// Numerical floor below which changes in V are rounding, not dynamics.
inline double descent_tolerance(double v_prev, double theta_scale) {
  return 1e-12 * v_prev + 1e-22 * (1.0 + theta_scale * theta_scale);
}

inline DiagnosticsReport diagnostics(const RunTrace& tr, const RunConfig& cfg) {
  const GameSpec& g = cfg.game;
  const int n = tr.n;
  const int K = static_cast<int>(tr.rows.size());
  DiagnosticsReport d;
  d.iterations = K;
  d.noise_variance = cfg.noise_variance;
  const bool truth = g.has_truth();
  const bool noise_free = cfg.noise_variance == 0.0;
  if (K > 0) {
    d.final_xd_err = tr.rows.back().xd_err;
    d.final_v_err = tr.rows.back().v_err;
    d.final_pred_err = tr.rows.back().pred_err;
  }
  for (const auto& r : tr.rows) d.design_failures += r.design_failed;

  for (int i = 0; i < n; ++i) {
    PlayerDiagnostics p;
    const PlayerSpec& ps = g.players[i];
    double nu = cfg.prox == ProxKind::kEuclidean ? 1.0 : cfg.prox_weights.at(i).minCoeff();
    p.cs_hat = K > 0 ? tr.cs_warmup(i) : 0.0;
    bool any_window = false, all_window = K > 0;
    bool one_free = false;
    {
      int free = 0;
      for (int j = 0; j < ps.m(); ++j) free += !ps.theta_box.pinned(j);
      one_free = free == 1;
    }
    for (const auto& r : tr.rows) {
      p.cs_hat = std::max(p.cs_hat, r.xi_sq(i));
      if (!std::isnan(r.pe_window(i))) {
        p.cp_window = any_window ? std::min(p.cp_window, r.pe_window(i)) : r.pe_window(i);
        any_window = true;
      }
      if (one_free) p.cp_step = std::isnan(p.cp_step) ? r.pe_step(i) : std::min(p.cp_step, r.pe_step(i));
    }
    p.pe_window_holds = any_window && p.cp_window > 1e-12;
    p.pe_step_holds = one_free && p.cp_step > 1e-12;
    (void)all_window;
    if (K > 0) p.eta_final = tr.rows.back().eta(i);

    double cp = p.pe_step_holds ? p.cp_step : (p.pe_window_holds ? p.cp_window : 0.0);
    if (cfg.learner.schedule == EtaSchedule::kConstant && K > 0) {
      double e1 = p.eta_final - p.eta_final * p.eta_final * p.cs_hat / (2.0 * nu);
      p.eps_hat = cp > 0.0 ? std::min(e1, (1.0 - 1e-9) / (2.0 * cp)) : e1;
      p.step_hypothesis = p.eps_hat > 0.0 && e1 >= p.eps_hat;
      if (cp > 0.0) p.contraction_bound = 1.0 - 2.0 * cp * p.eps_hat;
    } else if (K > 0) {
      double tail = 0.0;
      double eta0 = tr.rows.front().eta(i);
      for (int k = K; k < 2 * K; ++k) tail += sq(eta0 / (k + 1.0));
      p.eta_sq_tail = tail;
    }

    if (truth) {
      const double scale = ps.true_theta.norm();
      double floor = 1e-26 * (1.0 + scale * scale);
      if (noise_free) {
        p.descent_violations = 0;
        double prev = tr.V0(i);
        for (const auto& r : tr.rows) {
          double inc = r.V(i) - prev;
          if (inc > descent_tolerance(prev, scale)) ++p.descent_violations;
          p.max_descent_increase = std::max(p.max_descent_increase, inc);
          if (prev > floor && r.V(i) > floor) {
            double ratio = r.V(i) / prev;
            p.max_contraction = std::isnan(p.max_contraction) ? ratio : std::max(p.max_contraction, ratio);
          }
          prev = r.V(i);
        }
      }
      // log V regression on the PE-active segment after the transient.
      int start = K / 20;
      double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
      int cnt = 0;
      for (int k = start; k < K; ++k) {
        const auto& r = tr.rows[k];
        bool pe = p.pe_step_holds ? r.pe_step(i) > 1e-12
                                  : (!std::isnan(r.pe_window(i)) && r.pe_window(i) > 1e-12);
        if (!pe || !(r.V(i) > floor)) continue;
        double xv = k, yv = std::log(r.V(i));
        sx += xv; sy += yv; sxx += xv * xv; sxy += xv * yv; syy += yv * yv;
        ++cnt;
      }
      p.rate_points = cnt;
      if (cnt >= 3) {
        double vx = sxx - sx * sx / cnt, vy = syy - sy * sy / cnt, cxy = sxy - sx * sy / cnt;
        if (vx > 0) {
          p.rate_slope = cxy / vx;
          p.rate_r2 = vy > 0 ? cxy * cxy / (vx * vy) : 1.0;
        }
      }
    }

    if (K >= 4) {
      double s = 0.0;
      int c = 0;
      for (int k = K - K / 4; k < K; ++k, ++c) s += sq(tr.rows[k].residual(i));
      p.residual_mean_final_quarter = s / c;
    }

    if (!std::isnan(cfg.rk_k1) && !std::isnan(cfg.rk_k2) && truth &&
        cfg.learner.schedule == EtaSchedule::kDecay) {
      p.rk_applicable = true;
      p.rk_holds = true;
      double acc = 0.0;
      for (int k = 1; k <= K; ++k) {
        const auto& r = tr.rows[k - 1];
        double e = r.residual(i) - r.w(i);
        acc += e * e;
        double r_prev = 1.0 / r.eta(i);  // r_{k-1} = 1 / eta_{k-1}
        if (k >= cfg.rk_t0 && r_prev / k > cfg.rk_k1 + cfg.rk_k2 * acc / k) p.rk_holds = false;
      }
    }
    d.players.push_back(p);
  }

  // |v - v^d|^2 <= C^2 |alpha|^2 |x - x^d|^2 when the value row is met exactly.
  if (cfg.mode() == PlayMode::kMyopic && !cfg.v_desired.empty()) {
    double C = 0.0;
    for (int i = 0; i < n; ++i) C = std::max(C, g.players[i].incentive.lipschitz_bound(g.domain));
    d.psi_lipschitz = C;
    for (const auto& r : tr.rows) {
      if (r.design_failed) continue;
      double lhs = 0.0, a2 = 0.0;
      bool any = false;
      for (int i = 0; i < n; ++i) {
        if (i >= static_cast<int>(cfg.v_desired.size()) || !cfg.v_desired[i]) continue;
        lhs += sq(r.v(i) - *cfg.v_desired[i]);
        a2 += r.alpha[i].squaredNorm();
        any = true;
      }
      if (!any) continue;
      ++d.tracking_checked;
      double rhs = C * C * a2 * sq((r.x - cfg.x_desired).norm());
      double slack = r.design.max_residual();
      if (lhs > rhs * (1.0 + 1e-9) + sq(slack) + 1e-20) ++d.tracking_violations;
    }
  }
  return d;
}

struct BoundReport {
  double M = 0.0;
  int samples = 0;
  int violations = 0;
  double max_ratio = 0.0;  // |x* - x^d| / (M |theta - theta_hat|)
  std::vector<double> displacement;
  std::vector<double> bound;
  bool holds() const { return violations == 0; }
};

inline Mat implicit_jacobian(const GameSpec& g, const ParamSet& theta, const ParamSet& alpha,
                             const Vec& x) {
  Mat J = omega_jacobian(g, theta, alpha, x);
  int P = 0;
  for (const auto& p : g.players) P += p.m();
  Mat D1 = Mat::Zero(g.n, P);
  for (int i = 0, off = 0; i < g.n; ++i) {
    D1.block(i, off, 1, g.players[i].m()) = g.players[i].nominal.grad(x, i).transpose();
    off += g.players[i].m();
  }
  Eigen::JacobiSVD<Mat> svd(J);
  const Vec& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-10 * std::max(1.0, sv(0))) {
    throw Error(ErrorCode::kSingularJacobian, "D omega is singular at x^d");
  }
  return -J.partialPivLu().solve(D1);
}

// Samples theta in a ball around theta_hat (over the unpinned coordinates),
// bounds the equilibrium shift by M |theta - theta_hat| with M the largest
// sampled implicit-function Jacobian restricted to those coordinates.
inline BoundReport perturbation_bound_check(const GameSpec& g, const ParamSet& theta_hat,
                                            const ParamSet& alpha, const Vec& xd, double radius,
                                            int samples, std::uint64_t seed,
                                            double tol_slack = 0.05,
                                            const SolverOptions& opt = {},
                                            double abs_tol = 1e-7) {
  check_params(g, theta_hat, alpha);
  double w0 = omega(g, theta_hat, alpha, xd).norm();
  if (w0 > 1e-6) {
    throw Error(ErrorCode::kHypothesisViolated,
                "x^d is not a first-order point, |omega| = " + std::to_string(w0));
  }
  int P = 0;
  std::vector<int> free;  // pinned coordinates are structure, not unknowns
  for (const auto& p : g.players) {
    for (int j = 0; j < p.m(); ++j) {
      if (!p.theta_box.pinned(j)) free.push_back(P + j);
    }
    P += p.m();
  }
  const int F = static_cast<int>(free.size());
  auto unflatten = [&](const Vec& v) {
    ParamSet t;
    for (int i = 0, off = 0; i < g.n; ++i) {
      t.push_back(v.segment(off, g.players[i].m()));
      off += g.players[i].m();
    }
    return t;
  };
  Vec center(P);
  for (int i = 0, off = 0; i < g.n; ++i) {
    center.segment(off, g.players[i].m()) = theta_hat[i];
    off += g.players[i].m();
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud;
  std::vector<Vec> pts;
  for (int s = 0; s < samples && F > 0; ++s) {
    Vec dir(F);
    for (int j = 0; j < F; ++j) dir(j) = nd(rng);
    dir.normalize();
    double r = radius * std::pow(ud(rng), 1.0 / F);
    Vec t = center;
    for (int j = 0; j < F; ++j) t(free[j]) += r * dir(j);
    pts.push_back(t);
  }

  auto restricted_norm = [&](const Mat& Dg) {
    Mat D(Dg.rows(), F);
    for (int j = 0; j < F; ++j) D.col(j) = Dg.col(free[j]);
    Eigen::JacobiSVD<Mat> svd(D);
    return F > 0 ? svd.singularValues()(0) : 0.0;
  };
  BoundReport rep;
  rep.samples = static_cast<int>(pts.size());
  rep.M = restricted_norm(implicit_jacobian(g, theta_hat, alpha, xd));
  for (const Vec& t : pts) rep.M = std::max(rep.M, restricted_norm(implicit_jacobian(g, unflatten(t), alpha, xd)));
  for (const Vec& t : pts) {
    EquilibriumReport e = solve_equilibrium(g, unflatten(t), alpha, xd, opt);
    double disp = strategy_distance(g, e.point, xd);
    double dt = (t - center).norm();
    double bound = rep.M * dt * (1.0 + tol_slack) + abs_tol;
    rep.displacement.push_back(disp);
    rep.bound.push_back(bound);
    if (disp > bound) ++rep.violations;
    if (dt > 0.0) rep.max_ratio = std::max(rep.max_ratio, disp / (rep.M * dt));
  }
  return rep;
}

inline void write_trace_csv(const RunTrace& tr, std::ostream& os) {
  const int n = tr.n;
  os << "k";
  for (int i = 1; i <= n; ++i) os << ",x_" << i;
  os << ",xd_err,v_err";
  for (const char* c : {"loss", "theta_err", "V", "xi_sq"}) {
    for (int i = 1; i <= n; ++i) os << ',' << c << '_' << i;
  }
  os << ",pe_min_eig,design_residual,design_slack,pred_err\n";
  os.precision(12);
  for (const auto& r : tr.rows) {
    os << r.k;
    for (int i = 0; i < n; ++i) os << ',' << r.x(i);
    os << ',' << r.xd_err << ',' << r.v_err;
    for (const Vec* v : {&r.loss, &r.theta_err, &r.V, &r.xi_sq}) {
      for (int i = 0; i < n; ++i) os << ',' << (*v)(i);
    }
    double pe = std::nan("");
    for (int i = 0; i < n; ++i) {
      if (!std::isnan(r.pe_window(i))) pe = std::isnan(pe) ? r.pe_window(i) : std::min(pe, r.pe_window(i));
    }
    os << ',' << pe << ',' << r.design.max_residual() << ',' << r.design.min_slack() << ','
       << r.pred_err << '\n';
  }
}

inline void write_learner_csv(const RunTrace& tr, std::ostream& os) {
  os << "k,player,loss,V_k,theta_err,xi_norm_sq,pe_window_min_eig\n";
  os.precision(12);
  for (const auto& r : tr.rows) {
    for (int i = 0; i < tr.n; ++i) {
      os << r.k << ',' << i + 1 << ',' << r.loss(i) << ',' << r.V(i) << ',' << r.theta_err(i)
         << ',' << r.xi_sq(i) << ',' << r.pe_window(i) << '\n';
    }
  }
}

inline void write_design_csv(const RunTrace& tr, const GameSpec& g, std::ostream& os) {
  int smax = 0;
  for (const auto& p : g.players) smax = std::max(smax, p.s());
  os << "k,player,residual,slack,rank_sv_min";
  for (int j = 1; j <= smax; ++j) os << ",alpha_" << j;
  os << '\n';
  os.precision(12);
  for (const auto& r : tr.rows) {
    for (int i = 0; i < tr.n; ++i) {
      bool have = !r.design_failed && r.design.residual.size() == tr.n;
      os << r.k << ',' << i + 1 << ',';
      if (have) {
        os << r.design.residual(i) << ',' << r.design.slack(i) << ',' << r.design.rank_sv_min(i);
      } else {
        os << "nan,nan,nan";
      }
      for (int j = 0; j < smax; ++j) {
        os << ',';
        if (j < r.alpha[i].size()) os << r.alpha[i](j);
      }
      os << '\n';
    }
  }
}

}  // namespace aidlab

#endif  // AIDLAB_LOOP_HPP_
