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

// aidlab command line: run, equilibria, sweep, validate.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "aidlab/config.hpp"
#include "aidlab/designer.hpp"
#include "aidlab/game.hpp"
#include "aidlab/loop.hpp"

namespace fs = std::filesystem;
using aidlab::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRun = 3;

// "--a.b value" pairs left over after CLI11 has taken the known flags.
void apply_extras(json& root, const std::vector<std::string>& extras) {
  for (std::size_t a = 0; a < extras.size(); ++a) {
    const std::string& flag = extras[a];
    if (flag.rfind("--", 0) != 0 || flag.size() <= 2) {
      throw aidlab::Error(aidlab::ErrorCode::kConfigError, "unexpected argument '" + flag + "'");
    }
    std::string key = flag.substr(2);
    std::string value;
    auto eq = key.find('=');
    if (eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (a + 1 >= extras.size()) {
        throw aidlab::Error(aidlab::ErrorCode::kConfigError, "missing value for --" + key);
      }
      value = extras[++a];
    }
    aidlab::apply_override(root, key, aidlab::parse_override_value(value));
  }
}

void write_file(const fs::path& p, const std::string& body) {
  std::ofstream out(p);
  if (!out) throw aidlab::Error(aidlab::ErrorCode::kConfigError, "cannot write " + p.string());
  out << body;
}

struct RunOutcome {
  aidlab::ExperimentConfig config;
  aidlab::RunTrace trace;
  aidlab::DiagnosticsReport diag;
};

json final_state(const aidlab::RunTrace& tr) {
  json theta = json::array(), alpha = json::array();
  const aidlab::ParamSet& th = tr.rows.empty() ? tr.theta0 : tr.rows.back().theta;
  const aidlab::ParamSet& al = tr.rows.empty() ? tr.alpha0 : tr.rows.back().alpha;
  for (const auto& t : th) theta.push_back(aidlab::cfg::to_json(t));
  for (const auto& a : al) alpha.push_back(aidlab::cfg::to_json(a));
  json x = aidlab::cfg::to_json(tr.rows.empty() ? tr.x0 : tr.rows.back().x);
  return {{"x", x}, {"theta", theta}, {"alpha", alpha}};
}

RunOutcome execute(const aidlab::ExperimentConfig& ec, const fs::path& dir) {
  RunOutcome o{ec, aidlab::run(ec.run), {}};
  o.diag = aidlab::diagnostics(o.trace, ec.run);
  fs::create_directories(dir);
  {
    std::ofstream f(dir / ec.output.trace);
    aidlab::write_trace_csv(o.trace, f);
  }
  {
    std::ofstream f(dir / ec.output.learner);
    aidlab::write_learner_csv(o.trace, f);
  }
  {
    std::ofstream f(dir / ec.output.design);
    aidlab::write_design_csv(o.trace, ec.run.game, f);
  }
  json warnings = ec.warnings;
  for (const auto& w : o.trace.warnings) warnings.push_back(w);
  json summary = {{"config", aidlab::to_json(ec)},
                  {"diagnostics", aidlab::to_json(o.diag)},
                  {"final", final_state(o.trace)},
                  {"warnings", warnings}};
  write_file(dir / ec.output.summary, summary.dump(2) + "\n");
  return o;
}

aidlab::ParamSet parse_alpha(const std::string& text, const aidlab::GameSpec& g) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      vals.push_back(std::stod(tok));
    } catch (...) {
      throw aidlab::Error(aidlab::ErrorCode::kConfigError, "--alpha: bad number '" + tok + "'");
    }
  }
  aidlab::ParamSet a;
  std::size_t at = 0;
  for (const auto& p : g.players) {
    if (at + p.s() > vals.size()) break;
    aidlab::Vec v(p.s());
    for (int j = 0; j < p.s(); ++j) v(j) = vals[at++];
    a.push_back(v);
  }
  if (static_cast<int>(a.size()) != g.n || at != vals.size()) {
    throw aidlab::Error(aidlab::ErrorCode::kDimensionMismatch,
                        "--alpha needs the concatenated incentive parameters of all players");
  }
  return a;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aidlab: adaptive incentive design simulator"};
  app.require_subcommand(1);

  std::string run_config, run_out;
  std::optional<double> run_lambda;
  std::optional<int> run_iters;
  std::optional<long long> run_seed;
  auto* run_cmd = app.add_subcommand("run", "run the adaptive loop and write traces");
  run_cmd->add_option("config", run_config, "experiment config (JSON)")->required();
  run_cmd->add_option("--out", run_out, "output directory (default: output.dir)");
  run_cmd->add_option("--lambda", run_lambda, "designer.lambda");
  run_cmd->add_option("--iterations", run_iters, "run.iterations");
  run_cmd->add_option("--seed", run_seed, "run.seed");
  run_cmd->allow_extras();

  std::string eq_config, eq_out, eq_alpha;
  int eq_grid = 200;
  int eq_threads = 0;
  bool eq_design = false;
  std::optional<double> eq_lambda;
  auto* eq_cmd = app.add_subcommand("equilibria", "map equilibria and basins on an N x N grid");
  eq_cmd->add_option("config", eq_config, "experiment config (JSON)")->required();
  eq_cmd->add_option("--grid", eq_grid, "grid size per axis")->check(CLI::PositiveNumber);
  eq_cmd->add_option("--alpha", eq_alpha, "incentive parameters, all players concatenated, comma separated");
  eq_cmd->add_flag("--design", eq_design, "design alpha at x_desired from true_theta");
  eq_cmd->add_option("--lambda", eq_lambda, "designer.lambda for --design");
  eq_cmd->add_option("--out", eq_out, "basin CSV path (default: output.dir/output.basin)");
  eq_cmd->add_option("--threads", eq_threads, "worker threads (0: hardware)");
  eq_cmd->allow_extras();

  std::string sw_config, sw_param, sw_values, sw_seeds, sw_out = "sweep";
  int sw_jobs = 1;
  auto* sw_cmd = app.add_subcommand("sweep", "one run per (value, seed) pair");
  sw_cmd->add_option("config", sw_config, "experiment config (JSON)")->required();
  sw_cmd->add_option("--param", sw_param, "lambda | sigma2 | eta0 | mode | seed")->required();
  sw_cmd->add_option("--values", sw_values, "comma separated values")->required();
  sw_cmd->add_option("--seeds", sw_seeds, "comma separated seeds (default: config seed)");
  sw_cmd->add_option("--out", sw_out, "sweep directory");
  sw_cmd->add_option("--jobs", sw_jobs, "parallel runs")->check(CLI::PositiveNumber);
  sw_cmd->allow_extras();

  std::vector<std::string> val_configs;
  auto* val_cmd = app.add_subcommand("validate", "check configs against the schema");
  val_cmd->add_option("configs", val_configs, "experiment configs")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      json root = aidlab::read_json_file(run_config);
      if (run_lambda) aidlab::apply_override(root, "designer.lambda", *run_lambda);
      if (run_iters) aidlab::apply_override(root, "run.iterations", *run_iters);
      if (run_seed) aidlab::apply_override(root, "run.seed", *run_seed);
      apply_extras(root, run_cmd->remaining());
      aidlab::ExperimentConfig ec = aidlab::parse_config(root);
      for (const auto& w : ec.warnings) std::cerr << "warning: " << w << "\n";
      fs::path dir = run_out.empty() ? fs::path(ec.output.dir) : fs::path(run_out);
      try {
        RunOutcome o = execute(ec, dir);
        for (const auto& w : o.trace.warnings) std::cerr << "warning: " << w << "\n";
        std::cout << "iterations " << o.diag.iterations << "\n";
        std::cout << "final xd_err " << o.diag.final_xd_err << "\n";
        if (!o.trace.rows.empty() && ec.run.game.has_truth()) {
          std::cout << "final theta_err";
          for (int i = 0; i < o.trace.n; ++i) std::cout << " " << o.trace.rows.back().theta_err(i);
          std::cout << "\n";
        }
        std::cout << "wrote " << dir.string() << "\n";
      } catch (const aidlab::Error& e) {
        std::cerr << "run aborted: " << e.what() << "\n";
        return kExitRun;
      }
      return 0;
    }

    if (*eq_cmd) {
      json root = aidlab::read_json_file(eq_config);
      if (eq_lambda) aidlab::apply_override(root, "designer.lambda", *eq_lambda);
      apply_extras(root, eq_cmd->remaining());
      aidlab::ExperimentConfig ec = aidlab::parse_config(root);
      const aidlab::GameSpec& g = ec.run.game;
      if (g.n != 2) {
        throw aidlab::Error(aidlab::ErrorCode::kUnsupportedDimension,
                            "basin maps need n = 2, config has n = " + std::to_string(g.n));
      }
      if (!g.has_truth()) {
        throw aidlab::Error(aidlab::ErrorCode::kConfigError, "equilibria needs true_theta");
      }
      if (eq_design && !eq_alpha.empty()) {
        throw aidlab::Error(aidlab::ErrorCode::kConfigError, "--alpha and --design are exclusive");
      }
      aidlab::ParamSet alpha = g.zero_alpha();
      if (!eq_alpha.empty()) alpha = parse_alpha(eq_alpha, g);
      if (eq_design) {
        aidlab::RunConfig rc = ec.run;
        if (rc.designer == aidlab::DesignerKind::kMyopic) rc.designer = aidlab::DesignerKind::kP1;
        alpha = aidlab::detail::design_step(rc, g.true_theta(), rc.x_desired).alpha;
        std::cout << "alpha";
        for (const auto& a : alpha) {
          for (int j = 0; j < a.size(); ++j) std::cout << " " << a(j);
        }
        std::cout << "\n";
      }
      aidlab::EquilibriumMap m = aidlab::enumerate_equilibria(
          g, g.true_theta(), alpha, eq_grid, ec.run.response.solver, 0.05, eq_threads);
      fs::path out = eq_out.empty() ? fs::path(ec.output.dir) / ec.output.basin : fs::path(eq_out);
      if (out.has_parent_path()) fs::create_directories(out.parent_path());
      std::ofstream f(out);
      aidlab::write_basin_csv(g, m, f);
      std::cout << "stable equilibria " << m.stable_count() << "\n";
      for (const auto& e : m.equilibria) {
        if (!e.is_stable) continue;
        std::cout << "  (" << e.point(0) << ", " << e.point(1) << ")\n";
      }
      std::cout << "wrote " << out.string() << "\n";
      return 0;
    }

    if (*sw_cmd) {
      json base = aidlab::read_json_file(sw_config);
      apply_extras(base, sw_cmd->remaining());
      std::string path = aidlab::sweep_path(sw_param);
      std::vector<std::string> values = split(sw_values);
      std::vector<std::string> seeds = split(sw_seeds);
      if (values.empty()) throw aidlab::Error(aidlab::ErrorCode::kConfigError, "--values is empty");
      struct Job {
        std::string value, seed;
        aidlab::ExperimentConfig ec;
      };
      std::vector<Job> jobs;
      for (const auto& v : values) {
        for (std::size_t s = 0; s < std::max<std::size_t>(1, seeds.size()); ++s) {
          json root = base;
          aidlab::apply_override(root, path, aidlab::parse_override_value(v));
          if (!seeds.empty()) aidlab::apply_override(root, "run.seed", aidlab::parse_override_value(seeds[s]));
          aidlab::ExperimentConfig ec = aidlab::parse_config(root);
          jobs.push_back({v, std::to_string(ec.run.seed), std::move(ec)});
        }
      }
      std::vector<std::string> rows(jobs.size());
      std::atomic<std::size_t> next{0};
      std::mutex log_mu;
      auto worker = [&]() {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
          std::ostringstream row;
          row.precision(12);
          row << j << ',' << sw_param << ',' << jobs[j].value << ',' << jobs[j].seed << ',';
          try {
            RunOutcome o = execute(jobs[j].ec, fs::path(sw_out) / ("run_" + std::to_string(j)));
            double terr = std::nan(""), anorm = 0.0;
            if (!o.trace.rows.empty()) {
              const auto& last = o.trace.rows.back();
              if (jobs[j].ec.run.game.has_truth()) terr = last.theta_err.maxCoeff();
              for (const auto& a : last.alpha) anorm += a.squaredNorm();
            }
            row << o.diag.iterations << ',' << o.diag.final_xd_err << ',' << o.diag.final_v_err << ','
                << o.diag.final_pred_err << ',' << terr << ',' << std::sqrt(anorm) << ','
                << o.diag.design_failures << ",ok";
          } catch (const aidlab::Error& e) {
            row << "0,nan,nan,nan,nan,nan,0,error";
            std::lock_guard<std::mutex> lk(log_mu);
            std::cerr << "run " << j << " aborted: " << e.what() << "\n";
          }
          rows[j] = row.str();
        }
      };
      std::vector<std::thread> pool;
      for (int t = 0; t < std::max(1, sw_jobs); ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
      fs::create_directories(sw_out);
      std::ostringstream csv;
      csv << "index,param,value,seed,iterations,final_xd_err,final_v_err,final_pred_err,"
             "final_theta_err_max,final_alpha_norm,design_failures,status\n";
      for (const auto& r : rows) csv << r << "\n";
      write_file(fs::path(sw_out) / "summary.csv", csv.str());
      std::cout << "wrote " << jobs.size() << " runs to " << sw_out << "\n";
      return 0;
    }

    if (*val_cmd) {
      int bad = 0;
      for (const auto& c : val_configs) {
        try {
          aidlab::ExperimentConfig ec = aidlab::parse_config(aidlab::read_json_file(c));
          std::cout << c << ": ok\n";
          for (const auto& w : ec.warnings) std::cout << "  warning: " << w << "\n";
        } catch (const aidlab::Error& e) {
          std::cout << c << ": " << e.what() << "\n";
          ++bad;
        }
      }
      return bad ? kExitConfig : 0;
    }
  } catch (const aidlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
