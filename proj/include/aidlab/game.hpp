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

// Parametric incentivized games. Player i's cost is
//   f_i(x) = <Phi_i(x), theta_i> + <Psi_i(x), alpha_i>
// and omega stacks the own-coordinate derivatives D_i f_i.

#ifndef AIDLAB_GAME_HPP_
#define AIDLAB_GAME_HPP_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "aidlab/basis.hpp"
#include "aidlab/core.hpp"

namespace aidlab {

struct PlayerSpec {
  BasisStack nominal;    // Phi_i, dimension m
  BasisStack incentive;  // Psi_i, dimension s
  Vec true_theta;        // empty when unknown
  Box theta_box;

  int m() const { return nominal.size(); }
  int s() const { return incentive.size(); }
  bool has_truth() const { return true_theta.size() > 0; }
};

struct GameSpec {
  int n = 0;
  std::vector<PlayerSpec> players;
  Box domain;
  bool wrap_angles = false;

  void validate() const {
    if (n <= 0 || static_cast<int>(players.size()) != n) {
      throw Error(ErrorCode::kConfigError, "player count does not match n");
    }
    if (domain.dim() != n) {
      throw Error(ErrorCode::kDimensionMismatch, "domain box dimension");
    }
    for (int i = 0; i < n; ++i) {
      const PlayerSpec& p = players[i];
      if (p.nominal.strategy_dim() != n || p.incentive.strategy_dim() != n) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "player " + std::to_string(i) + " stacks vs n");
      }
      if (p.theta_box.dim() != p.m()) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "player " + std::to_string(i) + " theta_box vs nominal stack");
      }
      if ((p.theta_box.hi - p.theta_box.lo).minCoeff() < 0.0) {
        throw Error(ErrorCode::kConfigError,
                    "player " + std::to_string(i) + " theta_box has lo > hi");
      }
      if (p.has_truth()) {
        check_dim(p.true_theta, p.m(), "true_theta");
        if (!p.theta_box.contains(p.true_theta)) {
          throw Error(ErrorCode::kConfigError,
                      "player " + std::to_string(i) + " true_theta outside theta_box");
        }
      }
    }
  }

  bool has_truth() const {
    return std::all_of(players.begin(), players.end(),
                       [](const PlayerSpec& p) { return p.has_truth(); });
  }
  ParamSet true_theta() const {
    ParamSet t;
    for (const auto& p : players) t.push_back(p.true_theta);
    return t;
  }
  ParamSet zero_alpha() const {
    ParamSet a;
    for (const auto& p : players) a.push_back(Vec::Zero(p.s()));
    return a;
  }
};

inline void check_params(const GameSpec& g, const ParamSet& theta,
                         const ParamSet& alpha) {
  if (static_cast<int>(theta.size()) != g.n || static_cast<int>(alpha.size()) != g.n) {
    throw Error(ErrorCode::kDimensionMismatch, "parameter sets need one entry per player");
  }
  for (int i = 0; i < g.n; ++i) {
    check_dim(theta[i], g.players[i].m(), "theta");
    check_dim(alpha[i], g.players[i].s(), "alpha");
  }
}

inline double incentivized_cost(const GameSpec& g, const ParamSet& theta,
                                const ParamSet& alpha, int i, const Vec& x) {
  check_params(g, theta, alpha);
  check_dim(x, g.n, "strategy");
  if (i < 0 || i >= g.n) throw Error(ErrorCode::kIndexOutOfRange, "player");
  const PlayerSpec& p = g.players[i];
  return p.nominal.eval(x).dot(theta[i]) + p.incentive.eval(x).dot(alpha[i]);
}

inline void omega_into(const GameSpec& g, const ParamSet& theta,
                       const ParamSet& alpha, const Vec& x, Vec& out) {
  for (int i = 0; i < g.n; ++i) {
    const PlayerSpec& p = g.players[i];
    out(i) = p.nominal.dot_partial(x, i, theta[i]) +
             p.incentive.dot_partial(x, i, alpha[i]);
  }
}

inline Vec omega(const GameSpec& g, const ParamSet& theta, const ParamSet& alpha,
                 const Vec& x) {
  check_params(g, theta, alpha);
  check_dim(x, g.n, "strategy");
  Vec out(g.n);
  omega_into(g, theta, alpha, x, out);
  return out;
}

inline Mat omega_jacobian(const GameSpec& g, const ParamSet& theta,
                          const ParamSet& alpha, const Vec& x) {
  check_params(g, theta, alpha);
  check_dim(x, g.n, "strategy");
  Mat J(g.n, g.n);
  for (int i = 0; i < g.n; ++i) {
    const PlayerSpec& p = g.players[i];
    for (int j = 0; j < g.n; ++j) {
      J(i, j) = p.nominal.dot_partial2(x, i, j, theta[i]) +
                p.incentive.dot_partial2(x, i, j, alpha[i]);
    }
  }
  return J;
}

struct SolverOptions {
  double step = 0.05;
  double tol = 1e-8;
  std::int64_t max_iters = 200000;
  bool step_halving = false;
  double classify_eps = 1e-8;
};

struct EquilibriumReport {
  Vec point;
  double omega_norm = 0.0;
  bool is_first_order = false;
  Vec second_order;  // D_ii^2 f_i at the point
  bool is_differential_nash = false;
  bool is_stable = false;
  double min_sym_eig = 0.0;
  std::int64_t iterations = 0;
  std::optional<int> basin_label;
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, EquilibriumReport last)
      : Error(ErrorCode::kNonConvergence, what), last_(std::move(last)) {}
  const EquilibriumReport& last() const { return last_; }

 private:
  EquilibriumReport last_;
};

inline EquilibriumReport classify(const GameSpec& g, const ParamSet& theta,
                                  const ParamSet& alpha, const Vec& x,
                                  const SolverOptions& opt) {
  EquilibriumReport r;
  r.point = x;
  r.omega_norm = omega(g, theta, alpha, x).norm();
  Mat J = omega_jacobian(g, theta, alpha, x);
  r.second_order = J.diagonal();
  r.is_first_order = r.omega_norm <= opt.tol;
  r.min_sym_eig = min_sym_eig(J);
  r.is_stable = r.min_sym_eig > opt.classify_eps;
  r.is_differential_nash =
      r.is_first_order && r.second_order.minCoeff() > opt.classify_eps;
  return r;
}

// Simultaneous gradient descent x <- wrap(x - step * omega(x)).
inline EquilibriumReport solve_equilibrium(const GameSpec& g, const ParamSet& theta,
                                           const ParamSet& alpha, const Vec& x0,
                                           const SolverOptions& opt = {}) {
  check_params(g, theta, alpha);
  check_dim(x0, g.n, "start point");
  if (!(opt.step > 0.0)) throw Error(ErrorCode::kConfigError, "solver step must be > 0");
  Vec x = g.wrap_angles ? wrap_angles(x0) : x0;
  Vec w(g.n), xn(g.n), wn(g.n);
  omega_into(g, theta, alpha, x, w);
  double wnorm = w.norm();
  double step = opt.step;
  std::int64_t it = 0;
  for (; it < opt.max_iters && !(wnorm <= opt.tol); ++it) {
    xn = x - step * w;
    if (g.wrap_angles) {
      for (int j = 0; j < g.n; ++j) xn(j) = wrap_angle(xn(j));
    } else if (!xn.allFinite() || !g.domain.contains(xn)) {
      throw Error(ErrorCode::kDivergedFromBox,
                  "iterate left the domain box after " + std::to_string(it) + " steps");
    }
    omega_into(g, theta, alpha, xn, wn);
    double nn = wn.norm();
    if (opt.step_halving && nn > wnorm && step > opt.step * 1e-6) {
      step *= 0.5;
      continue;
    }
    x.swap(xn);
    w.swap(wn);
    wnorm = nn;
  }
  EquilibriumReport r = classify(g, theta, alpha, x, opt);
  r.iterations = it;
  if (!(wnorm <= opt.tol)) {
    throw NonConvergenceError("|omega| = " + std::to_string(wnorm) + " after " +
                                  std::to_string(it) + " iterations",
                              r);
  }
  return r;
}

inline double strategy_distance(const GameSpec& g, const Vec& a, const Vec& b) {
  if (!g.wrap_angles) return (a - b).norm();
  double s = 0.0;
  for (int j = 0; j < g.n; ++j) s += sq(wrap_angle(a(j) - b(j)));
  return std::sqrt(s);
}

struct EquilibriumMap {
  std::vector<EquilibriumReport> equilibria;  // distinct endpoints
  std::vector<int> start_count;               // starts per equilibrium
  std::vector<Vec> starts;
  std::vector<Vec> endpoints;
  std::vector<int> labels;  // -1 for starts that failed
  std::vector<std::string> errors;

  int stable_count() const {
    int c = 0;
    for (const auto& e : equilibria) c += (e.is_differential_nash && e.is_stable);
    return c;
  }
  std::vector<Vec> stable_points() const {
    std::vector<Vec> out;
    for (const auto& e : equilibria) {
      if (e.is_differential_nash && e.is_stable) out.push_back(e.point);
    }
    return out;
  }
};

// Cell-centred grid with `density` points per dimension over the domain box.
inline std::vector<Vec> grid_starts(const Box& box, int density) {
  const int n = box.dim();
  std::int64_t total = 1;
  for (int j = 0; j < n; ++j) total *= density;
  std::vector<Vec> out;
  out.reserve(total);
  for (std::int64_t idx = 0; idx < total; ++idx) {
    Vec x(n);
    std::int64_t r = idx;
    for (int j = n - 1; j >= 0; --j) {
      int c = static_cast<int>(r % density);
      r /= density;
      x(j) = box.lo(j) + (c + 0.5) * (box.hi(j) - box.lo(j)) / density;
    }
    out.push_back(x);
  }
  return out;
}

inline EquilibriumMap enumerate_equilibria(const GameSpec& g, const ParamSet& theta,
                                           const ParamSet& alpha, int density,
                                           const SolverOptions& opt = {},
                                           double merge_radius = 0.05,
                                           int threads = 0) {
  if (density < 2) throw Error(ErrorCode::kConfigError, "grid density must be >= 2");
  EquilibriumMap map;
  map.starts = grid_starts(g.domain, density);
  const std::size_t total = map.starts.size();
  std::vector<std::optional<EquilibriumReport>> ends(total);
  std::vector<std::string> errs(total);

  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t s = begin; s < total; s += stride) {
      try {
        ends[s] = solve_equilibrium(g, theta, alpha, map.starts[s], opt);
      } catch (const Error& e) {
        errs[s] = e.what();
      }
    }
  };
  unsigned nt = threads > 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  if (nt <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(work, t, nt);
    for (auto& t : pool) t.join();
  }

  map.labels.assign(total, -1);
  map.endpoints.resize(total);
  for (std::size_t s = 0; s < total; ++s) {
    if (!ends[s]) {
      map.errors.push_back("start " + std::to_string(s) + ": " + errs[s]);
      map.endpoints[s] = Vec::Constant(g.n, std::nan(""));
      continue;
    }
    const Vec& p = ends[s]->point;
    map.endpoints[s] = p;
    int label = -1;
    for (std::size_t c = 0; c < map.equilibria.size(); ++c) {
      if (strategy_distance(g, map.equilibria[c].point, p) <= merge_radius) {
        label = static_cast<int>(c);
        break;
      }
    }
    if (label < 0) {
      label = static_cast<int>(map.equilibria.size());
      map.equilibria.push_back(*ends[s]);
      map.equilibria.back().basin_label = label;
      map.start_count.push_back(0);
    }
    map.labels[s] = label;
    ++map.start_count[label];
  }
  return map;
}

inline void write_basin_csv(const GameSpec& g, const EquilibriumMap& map,
                            std::ostream& os) {
  for (int j = 0; j < g.n; ++j) os << "start_x" << j + 1 << ',';
  os << "basin_label";
  for (int j = 0; j < g.n; ++j) os << ",end_x" << j + 1;
  os << ",stable\n";
  os.precision(10);
  for (std::size_t s = 0; s < map.starts.size(); ++s) {
    for (int j = 0; j < g.n; ++j) os << map.starts[s](j) << ',';
    os << map.labels[s];
    for (int j = 0; j < g.n; ++j) os << ',' << map.endpoints[s](j);
    int lbl = map.labels[s];
    bool stable = lbl >= 0 && map.equilibria[lbl].is_differential_nash &&
                  map.equilibria[lbl].is_stable;
    os << ',' << (stable ? 1 : 0) << '\n';
  }
}

}  // namespace aidlab

#endif  // AIDLAB_GAME_HPP_
