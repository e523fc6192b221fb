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

// Agent response rules: Nash play, and the myopic rules of the Bertrand
// market (gradient play, best response, fictitious play).

#ifndef AIDLAB_RESPONSE_HPP_
#define AIDLAB_RESPONSE_HPP_

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "aidlab/core.hpp"
#include "aidlab/game.hpp"

namespace aidlab {

enum class ResponseMode {
  kNash,
  kGradientPlay,
  kBestResponse,
  kFictitiousPlay,
  kLinearMyopic,  // x_i+ = a x_i + b tau + c (<Phi_i, theta*_i> + <Psi_i, alpha_i>)
};

inline const char* response_mode_name(ResponseMode m) {
  switch (m) {
    case ResponseMode::kNash: return "nash";
    case ResponseMode::kGradientPlay: return "gradient-play";
    case ResponseMode::kBestResponse: return "best-response";
    case ResponseMode::kFictitiousPlay: return "fictitious-play";
    case ResponseMode::kLinearMyopic: return "linear-myopic";
  }
  return "?";
}

inline ResponseMode parse_response_mode(const std::string& s) {
  for (ResponseMode m : {ResponseMode::kNash, ResponseMode::kGradientPlay,
                         ResponseMode::kBestResponse, ResponseMode::kFictitiousPlay,
                         ResponseMode::kLinearMyopic}) {
    if (s == response_mode_name(m)) return m;
  }
  throw Error(ErrorCode::kConfigError, "unknown response mode '" + s + "'");
}

// How the incentive enters a firm's best-response payoff.
//   marginal: gamma_i(z) = z * <Psi_i(x^k), alpha_i>, the integral of the
//             term gradient play adds to marginal revenue
//   level:    gamma_i(z) = <Psi_i(z, x_-i), alpha_i>
enum class IncentiveForm { kMarginal, kLevel };

// Marginal revenue of firm i,
//   M_i = sum_j theta_ij x_j + theta_ii x_i + tau
// plus log(x_i) + theta_i,n + 1 when nonlinear. The own-price coefficient is
// counted twice, so the effective own slope is 2 theta_ii.
struct MarginalRevenue {
  bool nonlinear = false;
  std::vector<Vec> theta;

  bool empty() const { return theta.empty(); }

  double marginal(int i, const Vec& x, double tau) const {
    const Vec& t = theta[i];
    const int n = static_cast<int>(x.size());
    double m = tau + t(i) * x(i);
    for (int j = 0; j < n; ++j) m += t(j) * x(j);
    if (nonlinear) m += safe_log(x(i), i) + t(n) + 1.0;
    return m;
  }

  // Antiderivative of marginal() in x_i from 0, opponents fixed at x.
  double revenue(int i, double z, const Vec& x, double tau) const {
    const Vec& t = theta[i];
    const int n = static_cast<int>(x.size());
    double r = tau * z + t(i) * z * z;
    for (int j = 0; j < n; ++j) {
      if (j != i) r += t(j) * x(j) * z;
    }
    if (nonlinear) r += z * safe_log(z, i) + t(n) * z;
    return r;
  }

  // dM_i / dx_j
  Mat jacobian(const Vec& x) const {
    const int n = static_cast<int>(x.size());
    Mat J(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) J(i, j) = theta[i](j);
      J(i, i) += theta[i](i);
      if (nonlinear) J(i, i) += 1.0 / x(i);
    }
    return J;
  }

  void validate(int n) const {
    if (static_cast<int>(theta.size()) != n) {
      throw Error(ErrorCode::kConfigError, "marginal revenue needs one row per player");
    }
    for (const auto& t : theta) check_dim(t, nonlinear ? n + 1 : n, "revenue theta");
  }

 private:
  static double safe_log(double v, int i) {
    if (!(v > 0.0)) {
      throw Error(ErrorCode::kDomainViolation,
                  "log marginal revenue at non-positive price x_" +
                      std::to_string(i + 1));
    }
    return std::log(v);
  }
};

// Per-player model x_i+ = a x_i + b tau + c (<Phi_i(x), theta_i> + <Psi_i(x), alpha_i>).
// It is the coordinator's parametric view of myopic play.
struct MyopicModel {
  double self_weight = 0.0;
  double signal_weight = 0.0;
  double scale = 1.0;
};

struct SignalSpec {
  double mean = 0.0;
  double variance = 0.0;
};

// Independent N(0,1) stream keyed by (seed, stream id).
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), 0x61u, 0x69u, 0x64u};
    rng_.seed(seq);
  }
  double draw() { return dist_(rng_); }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

struct ResponseModel {
  ResponseMode mode = ResponseMode::kNash;
  Vec rates;       // zeta_i for gradient play
  int window = 0;  // fictitious play; 0 means the full history
  double search_lo = 0.01;
  double search_hi = 50.0;
  IncentiveForm incentive_form = IncentiveForm::kMarginal;
  MarginalRevenue revenue;
  SolverOptions solver;
  std::vector<MyopicModel> models;  // linear-myopic only

  bool is_myopic() const { return mode != ResponseMode::kNash; }
};

inline Vec respond_nash(const GameSpec& g, const ParamSet& alpha, const Vec& x_prev,
                        const SolverOptions& opt = {}) {
  if (!g.has_truth()) {
    throw Error(ErrorCode::kConfigError, "nash response needs true_theta for every player");
  }
  return solve_equilibrium(g, g.true_theta(), alpha, x_prev, opt).point;
}

inline Vec respond_gradient_play(const GameSpec& g, const MarginalRevenue& rev,
                                 const Vec& rates, const ParamSet& alpha,
                                 const Vec& x, double tau) {
  Vec out(g.n);
  for (int i = 0; i < g.n; ++i) {
    double v = g.players[i].incentive.eval(x).dot(alpha[i]);
    out(i) = x(i) + rates(i) * (rev.marginal(i, x, tau) + v);
  }
  return out;
}

inline Vec respond_linear_myopic(const GameSpec& g, const std::vector<MyopicModel>& models,
                                 const ParamSet& alpha, const Vec& x, double tau) {
  Vec out(g.n);
  for (int i = 0; i < g.n; ++i) {
    const PlayerSpec& p = g.players[i];
    const MyopicModel& md = models[i];
    out(i) = md.self_weight * x(i) + md.signal_weight * tau +
             md.scale * (p.nominal.eval(x).dot(p.true_theta) +
                         p.incentive.eval(x).dot(alpha[i]));
  }
  return out;
}

struct ScalarMax {
  double argmax = 0.0;
  double value = 0.0;
  double residual = 0.0;  // |f'(argmax)|
  bool at_boundary = false;
};

// Grid bracket, golden-section refinement, then bisection on the derivative.
inline ScalarMax maximize_scalar(const std::function<double(double)>& f,
                                 const std::function<double(double)>& df, double lo,
                                 double hi, double tol = 1e-10) {
  constexpr int kGrid = 256;
  const double h = (hi - lo) / (kGrid - 1);
  int best = 0;
  double fbest = f(lo);
  for (int j = 1; j < kGrid; ++j) {
    double v = f(lo + j * h);
    if (v > fbest) {
      fbest = v;
      best = j;
    }
  }
  double a = lo + std::max(best - 1, 0) * h;
  double b = lo + std::min(best + 1, kGrid - 1) * h;

  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  double x = 0.5 * (a + b);

  // Derivative bisection over the grid cell around x when it brackets a root.
  double ba = std::max(lo, x - h), bb = std::min(hi, x + h);
  if (df(ba) > 0.0 && df(bb) < 0.0) {
    for (int it = 0; it < 200 && bb - ba > 1e-15 * (1.0 + std::abs(x)); ++it) {
      double mid = 0.5 * (ba + bb);
      double dm = df(mid);
      if (dm == 0.0) {
        ba = bb = mid;
        break;
      }
      if (dm > 0.0) ba = mid; else bb = mid;
      if (std::abs(dm) <= 1e-12) break;
    }
    x = 0.5 * (ba + bb);
  }

  ScalarMax out;
  out.argmax = x;
  out.value = f(x);
  out.residual = std::abs(df(x));
  double edge = 1e-9 * (hi - lo);
  out.at_boundary = (x - lo <= edge && df(lo) < 0.0) || (hi - x <= edge && df(hi) > 0.0);
  if (x - lo <= edge && df(lo) < 0.0) out.residual = 0.0;
  if (hi - x <= edge && df(hi) > 0.0) out.residual = 0.0;
  return out;
}

struct BestResponseResult {
  Vec x;
  std::vector<bool> at_boundary;
  double max_residual = 0.0;
  bool any_boundary() const {
    for (bool b : at_boundary) {
      if (b) return true;
    }
    return false;
  }
};

// Best response of every firm to the opponent profile `others`; the marginal
// incentive coefficient is evaluated at the current state `x_state`.
inline BestResponseResult respond_best_response(const GameSpec& g, const ResponseModel& rm,
                                                const ParamSet& alpha, const Vec& x_state,
                                                const Vec& others, double tau) {
  BestResponseResult out;
  out.x = Vec(g.n);
  out.at_boundary.assign(g.n, false);
  for (int i = 0; i < g.n; ++i) {
    const BasisStack& psi = g.players[i].incentive;
    const Vec& a = alpha[i];
    std::function<double(double)> f, df;
    if (rm.incentive_form == IncentiveForm::kMarginal) {
      double coef = psi.eval(x_state).dot(a);
      f = [&, coef, i](double z) { return rm.revenue.revenue(i, z, others, tau) + coef * z; };
      df = [&, coef, i](double z) {
        Vec y = others;
        y(i) = z;
        return rm.revenue.marginal(i, y, tau) + coef;
      };
    } else {
      f = [&, i](double z) {
        Vec y = others;
        y(i) = z;
        return rm.revenue.revenue(i, z, others, tau) + psi.eval(y).dot(a);
      };
      df = [&, i](double z) {
        Vec y = others;
        y(i) = z;
        return rm.revenue.marginal(i, y, tau) + psi.dot_partial(y, i, a);
      };
    }
    ScalarMax sm = maximize_scalar(f, df, rm.search_lo, rm.search_hi);
    out.x(i) = sm.argmax;
    out.at_boundary[i] = sm.at_boundary;
    out.max_residual = std::max(out.max_residual, sm.residual);
  }
  return out;
}

// Best response against the average of the last `window` profiles (all when 0).
inline BestResponseResult respond_fictitious_play(const GameSpec& g, const ResponseModel& rm,
                                                  const ParamSet& alpha,
                                                  const std::vector<Vec>& history,
                                                  double tau) {
  if (history.empty()) throw Error(ErrorCode::kConfigError, "fictitious play needs history");
  std::size_t w = history.size();
  if (rm.window > 0) w = std::min<std::size_t>(w, rm.window);
  Vec avg = Vec::Zero(g.n);
  for (std::size_t t = history.size() - w; t < history.size(); ++t) avg += history[t];
  avg /= static_cast<double>(w);
  return respond_best_response(g, rm, alpha, history.back(), avg, tau);
}

// Spectral radius of I + diag(zeta) * dM/dx, the linearized gradient-play map.
inline double gradient_play_spectral_radius(const MarginalRevenue& rev, const Vec& rates,
                                            const Vec& x) {
  Mat A = Mat::Identity(x.size(), x.size()) + rates.asDiagonal() * rev.jacobian(x);
  Eigen::EigenSolver<Mat> es(A, false);
  double r = 0.0;
  for (int j = 0; j < es.eigenvalues().size(); ++j) r = std::max(r, std::abs(es.eigenvalues()(j)));
  return r;
}

}  // namespace aidlab

#endif  // AIDLAB_RESPONSE_HPP_
