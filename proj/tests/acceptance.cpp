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

// Acceptance checks, one line per criterion. Exit status is nonzero when any
// criterion fails; a failing line is reported, never skipped.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "aidlab/basis.hpp"
#include "aidlab/config.hpp"
#include "aidlab/designer.hpp"
#include "aidlab/game.hpp"
#include "aidlab/learner.hpp"
#include "aidlab/loop.hpp"
#include "support.hpp"

using namespace aidlab;
namespace at = aidlab::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// 1: three-point inequality of the prox step over random nested sets.
Outcome prox_inequality() {
  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::uniform_int_distribution<int> M(1, 4), R(0, 4);
  double worst = 1e300;
  int count = 0, failed = 0;
  for (int kind = 0; kind < 2; ++kind) {
    for (int trial = 0; trial < 10000; ++trial) {
      int m = M(rng);
      Vec lo(m), hi(m);
      for (int j = 0; j < m; ++j) {
        double a = 3.0 * U(rng), w = 0.5 + 2.0 * std::abs(U(rng));
        lo(j) = a - w;
        hi(j) = a + w;
      }
      Box box{lo, hi};
      Vec ts(m);
      for (int j = 0; j < m; ++j) ts(j) = lo(j) + (hi(j) - lo(j)) * 0.5 * (1.0 + U(rng));
      AdmissibleSet sk(box, SetMode::kAccumulating);
      auto add_row = [&](AdmissibleSet& s) {
        Vec a(m);
        for (int j = 0; j < m; ++j) a(j) = U(rng);
        if (a.norm() < 1e-3) a(0) = 1.0;
        double gap = (U(rng) > 0.0) ? 0.0 : 0.5 * std::abs(U(rng)) * a.norm();
        s.append(a, a.dot(ts) - gap, false);
      };
      int rk = R(rng);
      for (int r = 0; r < rk; ++r) add_row(sk);
      AdmissibleSet sk1 = sk;
      int extra = 1 + R(rng) / 2;
      for (int r = 0; r < extra; ++r) add_row(sk1);
      Vec raw(m);
      for (int j = 0; j < m; ++j) raw(j) = 4.0 * U(rng);
      Vec th = project_euclidean(box, sk.rows(), raw).point;
      Vec g(m);
      double gs = std::pow(10.0, 2.0 * U(rng));
      for (int j = 0; j < m; ++j) g(j) = gs * U(rng);
      ProxOperator prox = ProxOperator::euclidean(m);
      if (kind == 1) {
        Vec d(m);
        for (int j = 0; j < m; ++j) d(j) = 0.2 + 3.0 * std::abs(U(rng));
        prox = ProxOperator::diagonal(d);
      }
      ProxCheck c = verify_prox_inequality(prox, sk, sk1, ts, th, g);
      worst = std::min(worst, c.slack);
      failed += !c.holds;
      ++count;
    }
  }
  return {failed == 0, std::to_string(count) + " instances, " + std::to_string(failed) +
                           " violations, min slack " + fmt("%.3e", worst)};
}

// 2: admissible sets are nested and keep theta* on a noise-free oscillator run.
// Run once as configured and once with row deduplication off, so that every
// second-order row is kept and the nesting check sees them all.
Outcome nested_sets() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  bool ok = true;
  std::string detail;
  for (bool dedup : {true, false}) {
    ExperimentConfig ec = at::load_bundled("oscillator", {{"run.iterations", 500}, {"learner.dedup", dedup}});
    RunTrace tr = run(ec.run);
    int subset_fail = 0, star_fail = 0, est_fail = 0, samples = 0;
    for (int i = 0; i < tr.n; ++i) {
      const AdmissibleSet& fin = tr.final_sets[i];
      const Vec& star = ec.run.game.players[i].true_theta;
      const Box& b = fin.box();
      int prev_rows = 0;
      for (const auto& r : tr.rows) {
        int rows = r.set_rows[i];
        AdmissibleSet next = fin.prefix(rows), cur = fin.prefix(prev_rows);
        if (!next.contains(star)) ++star_fail;
        if (!next.contains(r.theta[i], 1e-9)) ++est_fail;
        for (int s = 0; s < 40; ++s) {
          Vec t(b.dim());
          for (int j = 0; j < b.dim(); ++j) t(j) = b.lo(j) + (b.hi(j) - b.lo(j)) * U(rng);
          ++samples;
          if (next.contains(t, 0.0) && !cur.contains(t, 0.0)) ++subset_fail;
        }
        prev_rows = rows;
      }
    }
    ok = ok && subset_fail == 0 && star_fail == 0 && est_fail == 0;
    if (!detail.empty()) detail += "; ";
    detail += std::string(dedup ? "dedup" : "no dedup") + ": " + std::to_string(tr.rows.size()) +
              " iterations, rows " + std::to_string(tr.final_sets[0].row_count()) + "/" +
              std::to_string(tr.final_sets[1].row_count()) + ", " + std::to_string(samples) +
              " samples, subset failures " + std::to_string(subset_fail) + ", theta* infeasible " +
              std::to_string(star_fail) + ", estimate infeasible " + std::to_string(est_fail);
  }
  return {ok, detail};
}

// 3: noise-free oscillator, lambda = 0.1, constant eta.
Outcome noise_free_descent() {
  ExperimentConfig ec = at::load_bundled("oscillator", {{"designer.lambda", 0.1}});
  RunTrace tr = run(ec.run);
  DiagnosticsReport d = diagnostics(tr, ec.run);
  int viol = 0;
  bool hyp = true;
  for (const auto& p : d.players) {
    viol += p.descent_violations;
    hyp = hyp && p.step_hypothesis;
  }
  const int K = static_cast<int>(tr.rows.size());
  double tail = 0.0;
  for (int k = K - K / 10; k < K; ++k) {
    tail = std::max(tail, tr.rows[k].residual.squaredNorm());
  }
  return {viol == 0 && hyp && tail <= 1e-8,
          std::to_string(K) + " iterations, descent violations " + std::to_string(viol) +
              ", step hypothesis " + (hyp ? "ok" : "violated") + ", max tail |<xi,theta*-theta>|^2 " +
              fmt("%.3e", tail)};
}

// One-dimensional linear-myopic problem used by 4 and 8.
RunConfig scalar_myopic(const Vec& nominal_theta, bool rbf) {
  RunConfig rc;
  GameSpec& g = rc.game;
  g.n = 1;
  g.domain = Box{Vec::Constant(1, -10.0), Vec::Constant(1, 10.0)};
  PlayerSpec p;
  if (rbf) {
    p.nominal = BasisStack({BasisFunction::gaussian_rbf(1, 0, -1, 0.0, 0.1)});
  } else {
    p.nominal = BasisStack({BasisFunction::constant(1), BasisFunction::linear_coordinate(1, 0)});
  }
  p.incentive = BasisStack({BasisFunction::constant(1)});
  p.true_theta = nominal_theta;
  p.theta_box = Box{Vec::Constant(nominal_theta.size(), -5.0), Vec::Constant(nominal_theta.size(), 5.0)};
  g.players.push_back(p);
  rc.response.mode = ResponseMode::kLinearMyopic;
  rc.response.models = {MyopicModel{0.3, 0.0, 1.0}};
  rc.coordinator = rc.response.models;
  rc.designer = DesignerKind::kMyopic;
  rc.v_desired = {std::nullopt};
  rc.x0 = Vec::Constant(1, 2.0);
  return rc;
}

// 4: per-step PE contraction and exponential rate for m = 1.
Outcome exponential_rate() {
  RunConfig rc = scalar_myopic(Vec::Constant(1, 2.0), true);
  rc.x_desired = Vec::Constant(1, 1.0);
  rc.learner.eta = 0.05;
  rc.iterations = 300;
  RunTrace tr = run(rc);
  DiagnosticsReport d = diagnostics(tr, rc);
  const PlayerDiagnostics& p = d.players[0];
  bool ok = p.pe_step_holds && p.max_contraction <= p.contraction_bound + 1e-10 && p.rate_slope < 0.0 &&
            p.rate_r2 >= 0.95;
  return {ok, "c_p " + fmt("%.4f", p.cp_step) + ", eps " + fmt("%.4f", p.eps_hat) + ", max ratio " +
                  fmt("%.6f", p.max_contraction) + " vs bound " + fmt("%.6f", p.contraction_bound) +
                  ", slope " + fmt("%.4f", p.rate_slope) + ", R^2 " + fmt("%.4f", p.rate_r2)};
}

// 5: noise-free gradient play tracks x^d and v^d.
Outcome myopic_tracking() {
  // v^d is the incentive value that makes x^d a rest point of gradient play.
  ExperimentConfig base = at::load_bundled("bertrand_true");
  const GameSpec& g = base.run.game;
  const double tau = base.run.signal.mean;
  json vd = json::array();
  for (int i = 0; i < g.n; ++i) {
    vd.push_back(-tau - g.players[i].nominal.eval(base.run.x_desired).dot(g.players[i].true_theta));
  }
  ExperimentConfig ec = at::load_bundled(
      "bertrand_true", {{"noise.tau_variance", 0.0}, {"run.v_desired", vd}, {"run.iterations", 1000}});
  RunTrace tr = run(ec.run);
  DiagnosticsReport d = diagnostics(tr, ec.run);
  const auto& last = tr.rows.back();
  double xe = sq(last.xd_err), ve = sq(last.v_err);
  int first = -1;
  for (const auto& r : tr.rows) {
    if (sq(r.xd_err) <= 1e-10 && sq(r.v_err) <= 1e-10) {
      first = r.k;
      break;
    }
  }
  bool ok = xe <= 1e-10 && ve <= 1e-10 && d.tracking_violations == 0;
  return {ok, "final |x-x^d|^2 " + fmt("%.3e", xe) + ", |v-v^d|^2 " + fmt("%.3e", ve) +
                  ", first k inside " + std::to_string(first) + ", bound violations " +
                  std::to_string(d.tracking_violations) + "/" + std::to_string(d.tracking_checked) +
                  ", design fallbacks " + std::to_string(d.design_failures)};
}

bool near_any(const GameSpec& g, const std::vector<Vec>& pts, const Vec& target, double tol) {
  for (const auto& p : pts) {
    if (strategy_distance(g, p, target) <= tol) return true;
  }
  return false;
}

std::string list_points(const std::vector<Vec>& pts) {
  std::string s;
  for (const auto& p : pts) s += "(" + fmt("%.3f", p(0)) + "," + fmt("%.3f", p(1)) + ")";
  return s;
}

// 6: equilibrium maps of the nominal and incentivized oscillator.
Outcome oscillator_maps() {
  ExperimentConfig ec = at::load_bundled("oscillator");
  const GameSpec& g = ec.run.game;
  const SolverOptions& opt = ec.run.response.solver;
  ParamSet star = g.true_theta();
  auto stable_nash = [&](const ParamSet& alpha) {
    EquilibriumMap m = enumerate_equilibria(g, star, alpha, 200, opt);
    std::vector<Vec> pts;
    for (const auto& e : m.equilibria) {
      if (e.is_stable && e.is_differential_nash) pts.push_back(e.point);
    }
    return pts;
  };
  Vec a(2), b(2), d(2), e(2);
  a << 1.1, -1.0;
  b << -1.1, 1.0;
  d << -1.8, 0.5;
  e << 1.4, -0.9;

  std::vector<Vec> nom = stable_nash(g.zero_alpha());
  bool ok_nom = nom.size() == 2 && near_any(g, nom, a, 0.1) && near_any(g, nom, b, 0.1);

  RunConfig r0 = ec.run;
  r0.design.lambda = 0.0;
  ParamSet alpha0 = detail::design_step(r0, star, r0.x_desired).alpha;
  std::vector<Vec> inc0 = stable_nash(alpha0);
  bool ok0 = inc0.size() == 1 && near_any(g, inc0, d, 0.05);

  RunConfig r1 = ec.run;
  r1.design.lambda = 0.1;
  ParamSet alpha1 = detail::design_step(r1, star, r1.x_desired).alpha;
  std::vector<Vec> inc1 = stable_nash(alpha1);
  bool ok1 = inc1.size() == 2 && near_any(g, inc1, e, 0.1) && near_any(g, inc1, d, 0.1);

  return {ok_nom && ok0 && ok1,
          std::string("nominal ") + (ok_nom ? "ok " : "FAIL ") + list_points(nom) + "; lambda=0 " +
              (ok0 ? "ok " : "FAIL ") + list_points(inc0) + "; lambda=0.1 " + (ok1 ? "ok " : "FAIL ") +
              list_points(inc1)};
}

// 7: equilibrium shift bounded by the implicit-function Jacobian.
Outcome perturbation_bound() {
  std::string detail;
  bool ok = true;
  {
    Vec t1(3), t2(3);
    t1 << 1.0, 0.4, -0.5;
    t2 << 1.5, -0.3, 0.8;
    GameSpec g = at::quadratic_game(t1, t2);
    Vec xd(2);
    xd << 0.7, -0.4;
    std::vector<NashSystem> sys;
    for (int i = 0; i < 2; ++i) sys.push_back(assemble_nash_system(g, g.players[i].true_theta, xd, std::nullopt, i));
    ParamSet alpha = solve_p1(sys, DesignOptions{}).alpha;
    SolverOptions so;
    so.tol = 1e-12;
    BoundReport r = perturbation_bound_check(g, g.true_theta(), alpha, xd, 0.05, 50, 3, 0.05, so);
    ok = ok && r.holds();
    detail += "quadratic M " + fmt("%.4f", r.M) + " violations " + std::to_string(r.violations) +
              " max ratio " + fmt("%.4f", r.max_ratio);
  }
  {
    ExperimentConfig ec = at::load_bundled("oscillator");
    const GameSpec& g = ec.run.game;
    ParamSet alpha = detail::design_step(ec.run, g.true_theta(), ec.run.x_desired).alpha;
    BoundReport r = perturbation_bound_check(g, g.true_theta(), alpha, ec.run.x_desired, 0.05, 50, 5, 0.05,
                                             ec.run.response.solver);
    ok = ok && r.holds();
    detail += "; oscillator M " + fmt("%.4f", r.M) + " violations " + std::to_string(r.violations) +
              " max ratio " + fmt("%.4f", r.max_ratio);
  }
  return {ok, detail};
}

// 8: noisy myopic run with a 1/(k+1) step.
Outcome noise_floor() {
  Vec star(2);
  star << 1.5, -0.8;
  RunConfig rc = scalar_myopic(star, false);
  // |theta_2 - theta_2*| < 1 over the box keeps the closed loop stable while
  // the estimate is still wrong.
  rc.game.players[0].theta_box = Box{(Vec(2) << -5.0, -1.5).finished(), (Vec(2) << 5.0, 0.0).finished()};
  rc.x_desired = Vec::Zero(1);
  rc.learner.schedule = EtaSchedule::kDecay;
  rc.learner.eta0 = 25.0;
  rc.noise_variance = 0.04;
  rc.iterations = 200000;
  rc.seed = 8;
  rc.rk_k1 = 1.0 / 25.0;
  rc.rk_k2 = 1.0;
  RunTrace tr = run(rc);
  DiagnosticsReport d = diagnostics(tr, rc);
  const PlayerDiagnostics& p = d.players[0];
  double mean = p.residual_mean_final_quarter;
  const int K = static_cast<int>(tr.rows.size());
  double vmin = 1e300, vmax = -1e300;
  for (int k = K - K / 10; k < K; ++k) {
    vmin = std::min(vmin, tr.rows[k].V(0));
    vmax = std::max(vmax, tr.rows[k].V(0));
  }
  double level = tr.V0(0);
  bool ok = std::abs(mean - 0.04) <= 0.004 && (vmax - vmin) <= 0.01 * level;
  return {ok, "final-quarter mean residual^2 " + fmt("%.5f", mean) + ", last-decile V range " +
                  fmt("%.3e", vmax - vmin) + " vs V0 " + fmt("%.3e", level) + ", r_k check " +
                  (p.rk_applicable ? (p.rk_holds ? "holds" : "violated") : "n/a")};
}

// 9: true-model Bertrand prices settle in the tau band; smoothed theta error falls.
Outcome bertrand_true_model() {
  ExperimentConfig ec = at::load_bundled("bertrand_true");
  RunTrace tr = run(ec.run);
  double band = 3.0 * ec.run.response.rates.maxCoeff() * std::sqrt(ec.run.signal.variance);
  const Vec& xd = ec.run.x_desired;
  // x^k for k = 1..100 is rows[k-1].
  int settle = -1;
  for (int k = 100; k >= 1; --k) {
    const Vec& x = tr.rows[k - 1].x;
    if (((x - xd).cwiseAbs().array() <= band).all()) {
      settle = k;
    } else {
      break;
    }
  }
  bool prices = settle >= 1;
  const int W = 50, K = static_cast<int>(tr.rows.size());
  int rises = 0;
  for (int i = 0; i < tr.n; ++i) {
    double prev = 1e300;
    for (int k = W - 1; k < K; ++k) {
      double s = 0.0;
      for (int t = k - W + 1; t <= k; ++t) s += tr.rows[t].theta_err(i);
      s /= W;
      if (s > prev) ++rises;
      prev = s;
    }
  }
  return {prices && rises == 0,
          "band +/-" + fmt("%.3f", band) + ", inside from k=" + std::to_string(settle) +
              " through 100, smoothed theta_err rises " + std::to_string(rises) + ", final theta_err " +
              fmt("%.4f", tr.rows.back().theta_err(0)) + "/" + fmt("%.4f", tr.rows.back().theta_err(1))};
}

// 10: agnostic Bertrand under three update rules.
Outcome bertrand_agnostic() {
  std::vector<std::string> modes = {"gradient-play", "best-response", "fictitious-play"};
  std::vector<int> cross;
  std::string detail;
  bool all = true;
  for (const auto& m : modes) {
    ExperimentConfig ec = at::load_bundled("bertrand_agnostic", {{"response.mode", m}, {"run.iterations", 500}});
    RunTrace tr = run(ec.run);
    int c = -1;
    for (const auto& r : tr.rows) {
      if (r.pred_err < 0.5 && r.xd_err < 0.5) {
        c = r.k + 1;
        break;
      }
    }
    cross.push_back(c);
    all = all && c > 0;
    detail += m + " " + std::to_string(c) + "; ";
  }
  bool fp_slowest = all && cross[2] >= cross[0] && cross[2] >= cross[1];
  detail += std::string("fictitious play slowest: ") + (fp_slowest ? "yes" : "no");
  return {all && fp_slowest, "crossing iteration " + detail};
}

// 11: analytic basis derivatives against finite differences.
Outcome basis_calculus() {
  std::mt19937_64 rng(11);
  int bad_g = 0, bad_h = 0, total = 0;
  double worst_g = 0.0, worst_h = 0.0;
  for (const auto& ks : at::every_kind()) {
    std::uniform_real_distribution<double> U(ks.lo, ks.hi);
    for (int s = 0; s < 100; ++s) {
      Vec x(3);
      for (int j = 0; j < 3; ++j) x(j) = U(rng);
      double eg = at::rel_err(ks.f.grad(x), at::fd_grad(ks.f, x));
      double eh = at::rel_err(ks.f.hess(x), at::fd_hess(ks.f, x));
      worst_g = std::max(worst_g, eg);
      worst_h = std::max(worst_h, eh);
      bad_g += eg > 1e-6;
      bad_h += eh > 1e-5;
      ++total;
    }
  }
  return {bad_g == 0 && bad_h == 0,
          std::to_string(total) + " points over " + std::to_string(at::every_kind().size()) +
              " bases, worst gradient " + fmt("%.2e", worst_g) + ", worst Hessian " + fmt("%.2e", worst_h)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> fn;
};

}  // namespace

int main() {
  std::vector<Criterion> all = {
      {1, "prox inequality", 30, prox_inequality},
      {2, "nested admissible sets", 60, nested_sets},
      {3, "noise-free descent", 120, noise_free_descent},
      {4, "exponential rate", 30, exponential_rate},
      {5, "myopic tracking", 60, myopic_tracking},
      {6, "oscillator equilibrium maps", 300, oscillator_maps},
      {7, "perturbation bound", 120, perturbation_bound},
      {8, "noise floor", 180, noise_floor},
      {9, "bertrand true model", 60, bertrand_true_model},
      {10, "bertrand agnostic", 180, bertrand_agnostic},
      {11, "basis calculus", 10, basis_calculus},
  };
  int failed = 0;
  for (const auto& c : all) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = secs < c.budget_s;
    bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("[%s] criterion %d %s: %s (%.1fs of %.0fs)%s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_s, in_time ? "" : " over budget");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed ? 1 : 0;
}
