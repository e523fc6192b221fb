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

// Experiment config files (JSON). Every key is checked; anything not listed
// in the schema reference is a ConfigError naming its dot path.

#ifndef AIDLAB_CONFIG_HPP_
#define AIDLAB_CONFIG_HPP_

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "aidlab/basis.hpp"
#include "aidlab/core.hpp"
#include "aidlab/game.hpp"
#include "aidlab/loop.hpp"
#include "aidlab/response.hpp"
#include "json.hpp"

namespace aidlab {

using json = nlohmann::json;

struct OutputSpec {
  std::string dir = "out";
  std::string trace = "trace.csv";
  std::string learner = "learner.csv";
  std::string design = "design.csv";
  std::string summary = "summary.json";
  std::string basin = "basin.csv";
};

struct ExperimentConfig {
  RunConfig run;
  OutputSpec output;
  std::vector<std::string> warnings;
};

namespace cfg {

inline Error bad(const std::string& path, const std::string& what) {
  return Error(ErrorCode::kConfigError, path + ": " + what);
}

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw bad(path.empty() ? "<root>" : path, "expected an object");
}

inline void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  require_object(j, path);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw Error(ErrorCode::kConfigError, "unknown key " + join(path, it.key()));
    }
  }
}

inline bool present(const json& j, const char* key) {
  return j.contains(key) && !j.at(key).is_null();
}

inline double num(const json& j, const std::string& path) {
  if (!j.is_number()) throw bad(path, "expected a number");
  return j.get<double>();
}

inline double num(const json& o, const char* key, const std::string& path, double def) {
  return present(o, key) ? num(o.at(key), join(path, key)) : def;
}

inline long long integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw bad(path, "expected an integer");
  return j.get<long long>();
}

inline long long integer(const json& o, const char* key, const std::string& path, long long def) {
  return present(o, key) ? integer(o.at(key), join(path, key)) : def;
}

inline bool boolean(const json& o, const char* key, const std::string& path, bool def) {
  if (!present(o, key)) return def;
  if (!o.at(key).is_boolean()) throw bad(join(path, key), "expected true or false");
  return o.at(key).get<bool>();
}

inline std::string str(const json& o, const char* key, const std::string& path,
                       const std::string& def) {
  if (!present(o, key)) return def;
  if (!o.at(key).is_string()) throw bad(join(path, key), "expected a string");
  return o.at(key).get<std::string>();
}

inline Vec vec(const json& j, const std::string& path) {
  if (!j.is_array()) throw bad(path, "expected an array of numbers");
  Vec v(static_cast<int>(j.size()));
  for (std::size_t a = 0; a < j.size(); ++a) v(a) = num(j[a], path + "[" + std::to_string(a) + "]");
  return v;
}

inline const json& req(const json& o, const char* key, const std::string& path) {
  if (!present(o, key)) throw bad(join(path, key), "required key missing");
  return o.at(key);
}

inline const json& arr(const json& j, const std::string& path, std::size_t size) {
  if (!j.is_array()) throw bad(path, "expected an array");
  if (size && j.size() != size) {
    throw bad(path, "expected " + std::to_string(size) + " entries, got " + std::to_string(j.size()));
  }
  return j;
}

inline json to_json(const Vec& v) {
  json a = json::array();
  for (int j = 0; j < v.size(); ++j) a.push_back(v(j));
  return a;
}

inline Box box(const json& j, const std::string& path, int dim) {
  check_keys(j, path, {"lo", "hi"});
  Box b{vec(req(j, "lo", path), join(path, "lo")), vec(req(j, "hi", path), join(path, "hi"))};
  if (b.lo.size() != dim || b.hi.size() != dim) {
    throw bad(path, "expected bounds of length " + std::to_string(dim));
  }
  for (int k = 0; k < dim; ++k) {
    if (b.lo(k) > b.hi(k)) throw bad(path, "lo > hi in coordinate " + std::to_string(k));
  }
  return b;
}

inline json to_json(const Box& b) { return {{"lo", to_json(b.lo)}, {"hi", to_json(b.hi)}}; }

inline BasisFunction basis(const json& j, const std::string& path, int n) {
  require_object(j, path);
  BasisKind kind;
  try {
    kind = parse_basis_kind(str(j, "kind", path, ""));
  } catch (const Error&) {
    throw bad(join(path, "kind"), "unknown basis kind '" + str(j, "kind", path, "") + "'");
  }
  switch (kind) {
    case BasisKind::kConstant: check_keys(j, path, {"kind"}); break;
    case BasisKind::kLinearCoordinate:
    case BasisKind::kTrigCos: check_keys(j, path, {"kind", "coordinate"}); break;
    case BasisKind::kLogCoordinate: check_keys(j, path, {"kind", "coordinate", "x_min"}); break;
    case BasisKind::kTrigCosDiff:
    case BasisKind::kProduct: check_keys(j, path, {"kind", "coordinate", "other"}); break;
    case BasisKind::kTrigSinShift:
    case BasisKind::kTrigCosShift: check_keys(j, path, {"kind", "coordinate", "shift"}); break;
    case BasisKind::kGaussianRbf:
      check_keys(j, path, {"kind", "coordinate", "other", "weights", "center", "width"});
      break;
  }
  int c = static_cast<int>(integer(j, "coordinate", path, 0));
  int o = static_cast<int>(integer(j, "other", path, -1));
  auto need_index = [&](int idx, const char* key) {
    if (idx < 0 || idx >= n) throw bad(join(path, key), "index out of range for n = " + std::to_string(n));
  };
  BasisFunction f;
  try {
    switch (kind) {
      case BasisKind::kConstant: f = BasisFunction::constant(n); break;
      case BasisKind::kLinearCoordinate: need_index(c, "coordinate"); f = BasisFunction::linear_coordinate(n, c); break;
      case BasisKind::kLogCoordinate:
        need_index(c, "coordinate");
        f = BasisFunction::log_coordinate(n, c, num(j, "x_min", path, 0.1));
        break;
      case BasisKind::kTrigCos: need_index(c, "coordinate"); f = BasisFunction::trig_cos(n, c); break;
      case BasisKind::kTrigCosDiff:
        need_index(c, "coordinate");
        need_index(o, "other");
        f = BasisFunction::trig_cos_diff(n, c, o);
        break;
      case BasisKind::kTrigSinShift:
        need_index(c, "coordinate");
        f = BasisFunction::trig_sin_shift(n, c, num(j, "shift", path, 0.0));
        break;
      case BasisKind::kTrigCosShift:
        need_index(c, "coordinate");
        f = BasisFunction::trig_cos_shift(n, c, num(j, "shift", path, 0.0));
        break;
      case BasisKind::kGaussianRbf: {
        double width = num(j, "width", path, 1.0);
        if (!(width > 0.0)) throw bad(join(path, "width"), "rbf width must be > 0");
        double center = num(j, "center", path, 0.0);
        if (present(j, "weights")) {
          Vec w = vec(j.at("weights"), join(path, "weights"));
          if (w.size() != n) throw bad(join(path, "weights"), "expected length " + std::to_string(n));
          f = BasisFunction::gaussian_rbf(w, center, width);
        } else {
          need_index(c, "coordinate");
          if (o >= 0) need_index(o, "other");
          f = BasisFunction::gaussian_rbf(n, c, o, center, width);
        }
        break;
      }
      case BasisKind::kProduct:
        need_index(c, "coordinate");
        need_index(o, "other");
        f = BasisFunction::product(n, c, o);
        break;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigError) throw;
    throw bad(path, e.what());
  }
  return f;
}

inline json to_json(const BasisFunction& f) {
  const BasisParams& p = f.params();
  json j = {{"kind", basis_kind_name(f.kind())}};
  switch (f.kind()) {
    case BasisKind::kConstant: break;
    case BasisKind::kLinearCoordinate:
    case BasisKind::kTrigCos: j["coordinate"] = p.coordinate; break;
    case BasisKind::kLogCoordinate: j["coordinate"] = p.coordinate; j["x_min"] = p.x_min; break;
    case BasisKind::kTrigCosDiff:
    case BasisKind::kProduct: j["coordinate"] = p.coordinate; j["other"] = p.other; break;
    case BasisKind::kTrigSinShift:
    case BasisKind::kTrigCosShift: j["coordinate"] = p.coordinate; j["shift"] = p.shift; break;
    case BasisKind::kGaussianRbf:
      j["weights"] = to_json(p.weights);
      j["center"] = p.center;
      j["width"] = p.width;
      break;
  }
  return j;
}

inline BasisStack stack(const json& j, const std::string& path, int n) {
  if (!j.is_array() || j.empty()) throw bad(path, "expected a non-empty array of basis functions");
  std::vector<BasisFunction> fns;
  for (std::size_t a = 0; a < j.size(); ++a) fns.push_back(basis(j[a], path + "[" + std::to_string(a) + "]", n));
  return BasisStack(std::move(fns));
}

inline json to_json(const BasisStack& s) {
  json a = json::array();
  for (const auto& f : s.functions()) a.push_back(to_json(f));
  return a;
}

inline MyopicModel model(const json& j, const std::string& path) {
  check_keys(j, path, {"self_weight", "signal_weight", "scale"});
  MyopicModel m;
  m.self_weight = num(j, "self_weight", path, 0.0);
  m.signal_weight = num(j, "signal_weight", path, 0.0);
  m.scale = num(j, "scale", path, 1.0);
  if (m.scale == 0.0) throw bad(join(path, "scale"), "scale must be nonzero");
  return m;
}

inline json to_json(const MyopicModel& m) {
  return {{"self_weight", m.self_weight}, {"signal_weight", m.signal_weight}, {"scale", m.scale}};
}

inline std::vector<MyopicModel> models(const json& j, const std::string& path, int n) {
  arr(j, path, n);
  std::vector<MyopicModel> out;
  for (int i = 0; i < n; ++i) out.push_back(model(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline json to_json(const std::vector<MyopicModel>& ms) {
  json a = json::array();
  for (const auto& m : ms) a.push_back(to_json(m));
  return a;
}

inline json opt_num(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

}  // namespace cfg

inline ExperimentConfig parse_config(const json& root) {
  using namespace cfg;
  check_keys(root, "", {"game", "response", "learner", "designer", "run", "noise", "diagnostics", "output"});
  ExperimentConfig ec;
  RunConfig& rc = ec.run;

  // game
  const json& jg = req(root, "game", "");
  check_keys(jg, "game", {"n", "domain", "wrap_angles", "players"});
  GameSpec& g = rc.game;
  long long n = integer(req(jg, "n", "game"), "game.n");
  if (n <= 0 || n > 64) throw bad("game.n", "must be in [1, 64]");
  g.n = static_cast<int>(n);
  g.domain = box(req(jg, "domain", "game"), "game.domain", g.n);
  g.wrap_angles = boolean(jg, "wrap_angles", "game", false);
  const json& jp = arr(req(jg, "players", "game"), "game.players", g.n);
  for (int i = 0; i < g.n; ++i) {
    std::string p = "game.players[" + std::to_string(i) + "]";
    check_keys(jp[i], p, {"nominal", "incentive", "true_theta", "theta_box"});
    PlayerSpec ps;
    ps.nominal = stack(req(jp[i], "nominal", p), join(p, "nominal"), g.n);
    ps.incentive = stack(req(jp[i], "incentive", p), join(p, "incentive"), g.n);
    if (present(jp[i], "true_theta")) {
      ps.true_theta = vec(jp[i].at("true_theta"), join(p, "true_theta"));
      if (ps.true_theta.size() != ps.m()) throw bad(join(p, "true_theta"), "length must match nominal stack");
    }
    ps.theta_box = box(req(jp[i], "theta_box", p), join(p, "theta_box"), ps.m());
    if (ps.has_truth() && !ps.theta_box.contains(ps.true_theta)) {
      throw bad(join(p, "true_theta"), "outside theta_box");
    }
    g.players.push_back(std::move(ps));
  }

  // response
  json jr = present(root, "response") ? root.at("response") : json::object();
  check_keys(jr, "response", {"mode", "rates", "window", "search", "incentive_form", "revenue", "models", "solver"});
  ResponseModel& rm = rc.response;
  try {
    rm.mode = parse_response_mode(str(jr, "mode", "response", "nash"));
  } catch (const Error&) {
    throw bad("response.mode", "unknown mode '" + str(jr, "mode", "response", "") + "'");
  }
  if (present(jr, "rates")) {
    rm.rates = vec(jr.at("rates"), "response.rates");
    if (rm.rates.size() != g.n) throw bad("response.rates", "one rate per player");
    if (rm.rates.minCoeff() <= 0.0) throw bad("response.rates", "rates must be > 0");
  }
  rm.window = static_cast<int>(integer(jr, "window", "response", 0));
  if (rm.window < 0) throw bad("response.window", "must be >= 0");
  if (present(jr, "search")) {
    Vec s = vec(jr.at("search"), "response.search");
    if (s.size() != 2 || !(s(0) < s(1))) throw bad("response.search", "expected [lo, hi] with lo < hi");
    rm.search_lo = s(0);
    rm.search_hi = s(1);
  }
  std::string form = str(jr, "incentive_form", "response", "marginal");
  if (form == "marginal") rm.incentive_form = IncentiveForm::kMarginal;
  else if (form == "level") rm.incentive_form = IncentiveForm::kLevel;
  else throw bad("response.incentive_form", "expected marginal or level");
  if (present(jr, "revenue")) {
    const json& rv = jr.at("revenue");
    check_keys(rv, "response.revenue", {"nonlinear", "theta"});
    rm.revenue.nonlinear = boolean(rv, "nonlinear", "response.revenue", false);
    const json& th = arr(req(rv, "theta", "response.revenue"), "response.revenue.theta", g.n);
    for (int i = 0; i < g.n; ++i) {
      std::string p = "response.revenue.theta[" + std::to_string(i) + "]";
      Vec t = vec(th[i], p);
      if (t.size() != g.n + (rm.revenue.nonlinear ? 1 : 0)) throw bad(p, "wrong length");
      rm.revenue.theta.push_back(t);
    }
  }
  if (present(jr, "models")) rm.models = models(jr.at("models"), "response.models", g.n);
  if (present(jr, "solver")) {
    const json& s = jr.at("solver");
    check_keys(s, "response.solver", {"step", "tol", "max_iters", "step_halving", "classify_eps"});
    rm.solver.step = num(s, "step", "response.solver", rm.solver.step);
    rm.solver.tol = num(s, "tol", "response.solver", rm.solver.tol);
    rm.solver.max_iters = integer(s, "max_iters", "response.solver", rm.solver.max_iters);
    rm.solver.step_halving = boolean(s, "step_halving", "response.solver", false);
    rm.solver.classify_eps = num(s, "classify_eps", "response.solver", rm.solver.classify_eps);
    if (!(rm.solver.step > 0.0)) throw bad("response.solver.step", "must be > 0");
    if (!(rm.solver.tol > 0.0)) throw bad("response.solver.tol", "must be > 0");
  }
  switch (rm.mode) {
    case ResponseMode::kNash:
      if (!g.has_truth()) throw bad("game.players", "nash play needs true_theta for every player");
      break;
    case ResponseMode::kGradientPlay:
      if (rm.rates.size() == 0) throw bad("response.rates", "required for gradient-play");
      [[fallthrough]];
    case ResponseMode::kBestResponse:
    case ResponseMode::kFictitiousPlay:
      if (rm.revenue.empty()) throw bad("response.revenue", "required for " + std::string(response_mode_name(rm.mode)));
      break;
    case ResponseMode::kLinearMyopic:
      if (rm.models.empty()) throw bad("response.models", "required for linear-myopic");
      if (!g.has_truth()) throw bad("game.players", "linear-myopic play needs true_theta for every player");
      break;
  }

  // learner
  json jl = present(root, "learner") ? root.at("learner") : json::object();
  check_keys(jl, "learner", {"prox", "weights", "schedule", "eta", "eta0", "pe_window", "dedup", "theta0", "coordinator_model"});
  std::string prox = str(jl, "prox", "learner", "euclidean");
  if (prox == "euclidean") rc.prox = ProxKind::kEuclidean;
  else if (prox == "diagonal") rc.prox = ProxKind::kDiagonal;
  else throw bad("learner.prox", "expected euclidean or diagonal");
  if (rc.prox == ProxKind::kDiagonal) {
    const json& w = arr(req(jl, "weights", "learner"), "learner.weights", g.n);
    for (int i = 0; i < g.n; ++i) {
      std::string p = "learner.weights[" + std::to_string(i) + "]";
      Vec d = vec(w[i], p);
      if (d.size() != g.players[i].m() || d.minCoeff() <= 0.0) throw bad(p, "need m positive weights");
      rc.prox_weights.push_back(d);
    }
  } else if (present(jl, "weights")) {
    throw bad("learner.weights", "only valid with the diagonal prox");
  }
  std::string sched = str(jl, "schedule", "learner", "constant");
  if (sched == "constant") rc.learner.schedule = EtaSchedule::kConstant;
  else if (sched == "decay") rc.learner.schedule = EtaSchedule::kDecay;
  else throw bad("learner.schedule", "expected constant or decay");
  if (present(jl, "eta")) {
    rc.learner.eta = num(jl.at("eta"), "learner.eta");
    if (!(*rc.learner.eta > 0.0)) throw bad("learner.eta", "must be > 0");
  }
  if (present(jl, "eta0")) {
    rc.learner.eta0 = num(jl.at("eta0"), "learner.eta0");
    if (!(*rc.learner.eta0 > 0.0)) throw bad("learner.eta0", "must be > 0");
  }
  rc.learner.pe_window = static_cast<int>(integer(jl, "pe_window", "learner", 0));
  if (rc.learner.pe_window < 0) throw bad("learner.pe_window", "must be >= 0");
  rc.learner.dedup = boolean(jl, "dedup", "learner", true);
  if (present(jl, "theta0")) {
    const json& t = arr(jl.at("theta0"), "learner.theta0", g.n);
    ParamSet t0;
    for (int i = 0; i < g.n; ++i) {
      std::string p = "learner.theta0[" + std::to_string(i) + "]";
      Vec v = vec(t[i], p);
      if (v.size() != g.players[i].m()) throw bad(p, "length must match nominal stack");
      if (!g.players[i].theta_box.contains(v)) throw bad(p, "outside theta_box");
      t0.push_back(v);
    }
    rc.theta0 = t0;
  }
  if (present(jl, "coordinator_model")) {
    rc.coordinator = models(jl.at("coordinator_model"), "learner.coordinator_model", g.n);
  }

  // designer
  json jd = present(root, "designer") ? root.at("designer") : json::object();
  check_keys(jd, "designer", {"kind", "epsilon", "lambda", "rank_tol", "residual_tol", "fallback"});
  std::string dk = str(jd, "kind", "designer", rm.mode == ResponseMode::kNash ? "p1" : "myopic");
  if (dk == "p1") rc.designer = DesignerKind::kP1;
  else if (dk == "p2") rc.designer = DesignerKind::kP2;
  else if (dk == "myopic") rc.designer = DesignerKind::kMyopic;
  else throw bad("designer.kind", "expected p1, p2 or myopic");
  if ((rm.mode == ResponseMode::kNash) == (rc.designer == DesignerKind::kMyopic)) {
    throw bad("designer.kind", "'" + dk + "' does not fit response mode " + response_mode_name(rm.mode));
  }
  rc.design.epsilon = num(jd, "epsilon", "designer", rc.design.epsilon);
  rc.design.lambda = num(jd, "lambda", "designer", rc.design.lambda);
  rc.design.rank_tol = num(jd, "rank_tol", "designer", rc.design.rank_tol);
  rc.design.residual_tol = num(jd, "residual_tol", "designer", rc.design.residual_tol);
  rc.fallback = boolean(jd, "fallback", "designer", true);
  if (!(rc.design.epsilon > 0.0)) throw bad("designer.epsilon", "must be > 0");
  if (!(rc.design.lambda >= 0.0)) throw bad("designer.lambda", "must be >= 0");

  // run
  const json& ju = req(root, "run", "");
  check_keys(ju, "run", {"iterations", "seed", "x_desired", "v_desired", "x0"});
  rc.iterations = static_cast<int>(integer(ju, "iterations", "run", 100));
  if (rc.iterations < 0) throw bad("run.iterations", "must be >= 0");
  long long seed = integer(ju, "seed", "run", 0);
  if (seed < 0) throw bad("run.seed", "must be >= 0");
  rc.seed = static_cast<std::uint64_t>(seed);
  rc.x_desired = vec(req(ju, "x_desired", "run"), "run.x_desired");
  if (rc.x_desired.size() != g.n) throw bad("run.x_desired", "length must be n");
  rc.v_desired.assign(g.n, 0.0);
  if (ju.contains("v_desired")) {
    const json& v = arr(ju.at("v_desired"), "run.v_desired", g.n);
    for (int i = 0; i < g.n; ++i) {
      if (v[i].is_null()) rc.v_desired[i] = std::nullopt;
      else rc.v_desired[i] = num(v[i], "run.v_desired[" + std::to_string(i) + "]");
    }
  }
  rc.x0 = present(ju, "x0") ? vec(ju.at("x0"), "run.x0") : g.domain.center();
  if (rc.x0.size() != g.n) throw bad("run.x0", "length must be n");

  // noise
  json jn = present(root, "noise") ? root.at("noise") : json::object();
  check_keys(jn, "noise", {"variance", "tau_mean", "tau_variance"});
  rc.noise_variance = num(jn, "variance", "noise", 0.0);
  rc.signal.mean = num(jn, "tau_mean", "noise", 0.0);
  rc.signal.variance = num(jn, "tau_variance", "noise", 0.0);
  if (rc.noise_variance < 0.0) throw bad("noise.variance", "must be >= 0");
  if (rc.signal.variance < 0.0) throw bad("noise.tau_variance", "must be >= 0");

  // diagnostics
  json jx = present(root, "diagnostics") ? root.at("diagnostics") : json::object();
  check_keys(jx, "diagnostics", {"k1", "k2", "t0"});
  rc.rk_k1 = num(jx, "k1", "diagnostics", std::nan(""));
  rc.rk_k2 = num(jx, "k2", "diagnostics", std::nan(""));
  rc.rk_t0 = static_cast<int>(integer(jx, "t0", "diagnostics", 1));

  // output
  json jo = present(root, "output") ? root.at("output") : json::object();
  check_keys(jo, "output", {"dir", "trace", "learner", "design", "summary", "basin"});
  ec.output.dir = str(jo, "dir", "output", ec.output.dir);
  ec.output.trace = str(jo, "trace", "output", ec.output.trace);
  ec.output.learner = str(jo, "learner", "output", ec.output.learner);
  ec.output.design = str(jo, "design", "output", ec.output.design);
  ec.output.summary = str(jo, "summary", "output", ec.output.summary);
  ec.output.basin = str(jo, "basin", "output", ec.output.basin);

  if (rm.mode == ResponseMode::kGradientPlay) {
    double rho = gradient_play_spectral_radius(rm.revenue, rm.rates, rc.x_desired);
    if (rho >= 1.0) {
      ec.warnings.push_back("gradient-play map is not a contraction at x_desired (spectral radius " +
                            std::to_string(rho) + ")");
    }
  }
  g.validate();
  return ec;
}

// Full normalized form with every default spelled out; parse_config(to_json(c))
// reproduces c.
inline json to_json(const ExperimentConfig& ec) {
  using cfg::to_json;
  const RunConfig& rc = ec.run;
  const GameSpec& g = rc.game;
  json players = json::array();
  for (const auto& p : g.players) {
    players.push_back({{"nominal", to_json(p.nominal)},
                       {"incentive", to_json(p.incentive)},
                       {"true_theta", p.has_truth() ? to_json(p.true_theta) : json(nullptr)},
                       {"theta_box", to_json(p.theta_box)}});
  }
  json game = {{"n", g.n}, {"domain", to_json(g.domain)}, {"wrap_angles", g.wrap_angles}, {"players", players}};

  const ResponseModel& rm = rc.response;
  json response = {{"mode", response_mode_name(rm.mode)},
                   {"window", rm.window},
                   {"search", {rm.search_lo, rm.search_hi}},
                   {"incentive_form", rm.incentive_form == IncentiveForm::kMarginal ? "marginal" : "level"},
                   {"solver",
                    {{"step", rm.solver.step},
                     {"tol", rm.solver.tol},
                     {"max_iters", rm.solver.max_iters},
                     {"step_halving", rm.solver.step_halving},
                     {"classify_eps", rm.solver.classify_eps}}}};
  if (rm.rates.size()) response["rates"] = to_json(rm.rates);
  if (!rm.revenue.empty()) {
    json th = json::array();
    for (const auto& t : rm.revenue.theta) th.push_back(to_json(t));
    response["revenue"] = {{"nonlinear", rm.revenue.nonlinear}, {"theta", th}};
  }
  if (!rm.models.empty()) response["models"] = cfg::to_json(rm.models);

  json learner = {{"prox", rc.prox == ProxKind::kEuclidean ? "euclidean" : "diagonal"},
                  {"schedule", rc.learner.schedule == EtaSchedule::kConstant ? "constant" : "decay"},
                  {"eta", rc.learner.eta ? json(*rc.learner.eta) : json(nullptr)},
                  {"eta0", rc.learner.eta0 ? json(*rc.learner.eta0) : json(nullptr)},
                  {"pe_window", rc.learner.pe_window},
                  {"dedup", rc.learner.dedup}};
  if (rc.prox == ProxKind::kDiagonal) {
    json w = json::array();
    for (const auto& d : rc.prox_weights) w.push_back(to_json(d));
    learner["weights"] = w;
  }
  if (rc.theta0) {
    json t = json::array();
    for (const auto& v : *rc.theta0) t.push_back(to_json(v));
    learner["theta0"] = t;
  }
  if (!rc.coordinator.empty()) learner["coordinator_model"] = cfg::to_json(rc.coordinator);

  json designer = {{"kind", designer_name(rc.designer)},
                   {"epsilon", rc.design.epsilon},
                   {"lambda", rc.design.lambda},
                   {"rank_tol", rc.design.rank_tol},
                   {"residual_tol", rc.design.residual_tol},
                   {"fallback", rc.fallback}};
  json vd = json::array();
  for (const auto& v : rc.v_desired) vd.push_back(v ? json(*v) : json(nullptr));
  json run = {{"iterations", rc.iterations},
              {"seed", rc.seed},
              {"x_desired", to_json(rc.x_desired)},
              {"v_desired", vd},
              {"x0", to_json(rc.x0)}};
  json noise = {{"variance", rc.noise_variance},
                {"tau_mean", rc.signal.mean},
                {"tau_variance", rc.signal.variance}};
  json diag = {{"k1", cfg::opt_num(rc.rk_k1)}, {"k2", cfg::opt_num(rc.rk_k2)}, {"t0", rc.rk_t0}};
  json output = {{"dir", ec.output.dir},         {"trace", ec.output.trace},
                 {"learner", ec.output.learner}, {"design", ec.output.design},
                 {"summary", ec.output.summary}, {"basin", ec.output.basin}};
  return {{"game", game},     {"response", response}, {"learner", learner},
          {"designer", designer}, {"run", run},       {"noise", noise},
          {"diagnostics", diag}, {"output", output}};
}

// Value text from the command line: JSON when it parses, a plain string otherwise.
inline json parse_override_value(const std::string& text) {
  json v = json::parse(text, nullptr, false);
  if (v.is_discarded()) return json(text);
  return v;
}

// Sets root[a][b]... for a dot path "a.b.c"; numeric segments index arrays.
inline void apply_override(json& root, const std::string& path, const json& value) {
  if (path.empty()) throw Error(ErrorCode::kConfigError, "empty override path");
  json* cur = &root;
  std::stringstream ss(path);
  std::string seg;
  std::vector<std::string> segs;
  while (std::getline(ss, seg, '.')) segs.push_back(seg);
  for (std::size_t s = 0; s < segs.size(); ++s) {
    const std::string& key = segs[s];
    bool last = s + 1 == segs.size();
    if (cur->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(key);
      } catch (...) {
        throw Error(ErrorCode::kConfigError, "override " + path + ": '" + key + "' is not an index");
      }
      if (idx >= cur->size()) throw Error(ErrorCode::kConfigError, "override " + path + ": index out of range");
      cur = &(*cur)[idx];
    } else {
      if (cur->is_null()) *cur = json::object();
      if (!cur->is_object()) throw Error(ErrorCode::kConfigError, "override " + path + ": not an object at '" + key + "'");
      cur = &(*cur)[key];
    }
    if (last) *cur = value;
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot open config " + path);
  json j = json::parse(in, nullptr, false, true);
  if (j.is_discarded()) throw Error(ErrorCode::kConfigError, "config " + path + " is not valid JSON");
  return j;
}

inline const std::map<std::string, std::string>& sweep_parameters() {
  static const std::map<std::string, std::string> m = {{"lambda", "designer.lambda"},
                                                       {"sigma2", "noise.variance"},
                                                       {"eta0", "learner.eta0"},
                                                       {"mode", "response.mode"},
                                                       {"seed", "run.seed"}};
  return m;
}

inline std::string sweep_path(const std::string& name) {
  auto it = sweep_parameters().find(name);
  if (it == sweep_parameters().end()) {
    throw Error(ErrorCode::kUnknownParameter,
                "unknown sweep parameter '" + name + "' (lambda, sigma2, eta0, mode, seed)");
  }
  return it->second;
}

inline json to_json(const DiagnosticsReport& d) {
  using cfg::opt_num;
  json players = json::array();
  for (const auto& p : d.players) {
    players.push_back({{"cs_hat", opt_num(p.cs_hat)},
                       {"cp_window", opt_num(p.cp_window)},
                       {"cp_step", opt_num(p.cp_step)},
                       {"pe_window_holds", p.pe_window_holds},
                       {"pe_step_holds", p.pe_step_holds},
                       {"eta_final", opt_num(p.eta_final)},
                       {"eps_hat", opt_num(p.eps_hat)},
                       {"step_hypothesis", p.step_hypothesis},
                       {"descent_violations", p.descent_violations < 0 ? json(nullptr) : json(p.descent_violations)},
                       {"max_descent_increase", opt_num(p.max_descent_increase)},
                       {"max_contraction", opt_num(p.max_contraction)},
                       {"contraction_bound", opt_num(p.contraction_bound)},
                       {"rate_slope", opt_num(p.rate_slope)},
                       {"rate_r2", opt_num(p.rate_r2)},
                       {"rate_points", p.rate_points},
                       {"residual_mean_final_quarter", opt_num(p.residual_mean_final_quarter)},
                       {"rk_check", p.rk_applicable ? json(p.rk_holds) : json("not-applicable")},
                       {"eta_sq_tail", opt_num(p.eta_sq_tail)}});
  }
  return {{"iterations", d.iterations},
          {"final_xd_err", opt_num(d.final_xd_err)},
          {"final_v_err", opt_num(d.final_v_err)},
          {"final_pred_err", opt_num(d.final_pred_err)},
          {"psi_lipschitz", opt_num(d.psi_lipschitz)},
          {"tracking_checked", d.tracking_checked},
          {"tracking_violations", d.tracking_violations},
          {"design_failures", d.design_failures},
          {"noise_variance", d.noise_variance},
          {"players", players}};
}

}  // namespace aidlab

#endif  // AIDLAB_CONFIG_HPP_
