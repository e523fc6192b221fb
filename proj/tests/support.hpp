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

// Shared fixtures and oracles for the unit tests and the acceptance binary.
// Oracles here use nothing from the library beyond eval().

#ifndef AIDLAB_TESTS_SUPPORT_HPP_
#define AIDLAB_TESTS_SUPPORT_HPP_

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "aidlab/basis.hpp"
#include "aidlab/config.hpp"
#include "aidlab/game.hpp"

#ifndef AIDLAB_CONFIG_DIR
#define AIDLAB_CONFIG_DIR "configs"
#endif

namespace aidlab::testing {

inline std::string config_path(const std::string& name) {
  return std::string(AIDLAB_CONFIG_DIR) + "/" + name + ".json";
}

inline ExperimentConfig load_bundled(const std::string& name,
                                     const std::vector<std::pair<std::string, json>>& overrides = {}) {
  json root = read_json_file(config_path(name));
  for (const auto& [k, v] : overrides) apply_override(root, k, v);
  return parse_config(root);
}

// f_i = q_i x_i^2 + c_i x_i x_j + l_i x_i, incentive {x_i, x_i^2}.
inline GameSpec quadratic_game(const Vec& t1, const Vec& t2) {
  GameSpec g;
  g.n = 2;
  g.domain = Box{Vec::Constant(2, -10.0), Vec::Constant(2, 10.0)};
  const Vec ts[2] = {t1, t2};
  for (int i = 0; i < 2; ++i) {
    int j = 1 - i;
    PlayerSpec p;
    p.nominal = BasisStack({BasisFunction::product(2, i, i), BasisFunction::product(2, i, j),
                            BasisFunction::linear_coordinate(2, i)});
    p.incentive = BasisStack({BasisFunction::linear_coordinate(2, i), BasisFunction::product(2, i, i)});
    p.true_theta = ts[i];
    p.theta_box = Box{(Vec(3) << 0.1, -2.0, -5.0).finished(), (Vec(3) << 5.0, 2.0, 5.0).finished()};
    g.players.push_back(p);
  }
  return g;
}

// Closed-form Nash of the quadratic game: A x = -b.
inline Vec quadratic_nash(const ParamSet& th, const ParamSet& al) {
  Mat A(2, 2);
  Vec b(2);
  for (int i = 0; i < 2; ++i) {
    int j = 1 - i;
    A(i, i) = 2.0 * th[i](0) + 2.0 * al[i](1);
    A(i, j) = th[i](1);
    b(i) = th[i](2) + al[i](0);
  }
  return A.partialPivLu().solve(-b);
}

// Central differences on eval() only.
inline Vec fd_grad(const BasisFunction& f, const Vec& x, double h = 1e-5) {
  Vec g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vec a = x, b = x;
    a(i) += h;
    b(i) -= h;
    g(i) = (f.eval(a) - f.eval(b)) / (2.0 * h);
  }
  return g;
}

inline Mat fd_hess(const BasisFunction& f, const Vec& x, double h = 1e-4) {
  const int n = static_cast<int>(x.size());
  Mat H(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      auto at = [&](double si, double sj) {
        Vec y = x;
        y(i) += si * h;
        y(j) += sj * h;
        return f.eval(y);
      };
      H(i, j) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h);
    }
  }
  return H;
}

// One representative of every basis kind on R^3, with the sampling box for x.
struct KindSample {
  std::string label;
  BasisFunction f;
  double lo, hi;
};

inline std::vector<KindSample> every_kind() {
  const int n = 3;
  return {
      {"constant", BasisFunction::constant(n), -3, 3},
      {"linear-coordinate", BasisFunction::linear_coordinate(n, 1), -3, 3},
      {"log-coordinate", BasisFunction::log_coordinate(n, 2), 0.2, 5},
      {"trig-cos", BasisFunction::trig_cos(n, 0), -4, 4},
      {"trig-cos-diff", BasisFunction::trig_cos_diff(n, 0, 2), -4, 4},
      {"trig-sin-shift", BasisFunction::trig_sin_shift(n, 1, -1.8), -4, 4},
      {"trig-cos-shift", BasisFunction::trig_cos_shift(n, 2, 0.5), -4, 4},
      {"gaussian-rbf", BasisFunction::gaussian_rbf(n, 0, -1, 5.0, 0.01), -10, 20},
      {"gaussian-rbf-diff", BasisFunction::gaussian_rbf(n, 1, 0, 0.0, 0.3), -3, 3},
      {"gaussian-rbf-weights", BasisFunction::gaussian_rbf((Vec(3) << 0.5, -1.0, 2.0).finished(), 0.7, 0.8), -1.5, 1.5},
      {"product", BasisFunction::product(n, 0, 2), -3, 3},
      {"product-square", BasisFunction::product(n, 1, 1), -3, 3},
  };
}

inline double rel_err(const Mat& a, const Mat& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace aidlab::testing

#endif  // AIDLAB_TESTS_SUPPORT_HPP_
