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

#include <gtest/gtest.h>

#include <cmath>

#include "aidlab/response.hpp"
#include "support.hpp"

namespace aidlab {
namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

struct Bertrand {
  ExperimentConfig ec = testing::load_bundled("bertrand_true");
  const GameSpec& g() const { return ec.run.game; }
  ResponseModel rm() const {
    ResponseModel r = ec.run.response;
    r.mode = ResponseMode::kBestResponse;
    return r;
  }
};

TEST(Response, GradientPlayHandValue) {
  Bertrand b;
  MarginalRevenue rev;
  rev.theta = {v2(-1.2, -0.5), v2(0.3, -1.0)};
  Vec out = respond_gradient_play(b.g(), rev, v2(0.1, 0.1), b.g().zero_alpha(), v2(1.0, 1.0), 5.0);
  EXPECT_NEAR(out(0), 1.21, 1e-12);
  EXPECT_NEAR(out(1), 1.0 + 0.1 * (0.3 - 2.0 + 5.0), 1e-12);
}

TEST(Response, GradientPlayZeroRateIsIdentity) {
  Bertrand b;
  Vec x = v2(3.0, 4.5);
  Vec out = respond_gradient_play(b.g(), b.ec.run.response.revenue, v2(0.0, 0.0),
                                  b.g().zero_alpha(), x, 5.0);
  EXPECT_EQ(out, x);
}

TEST(Response, GradientPlayStationaryPoint) {
  Bertrand b;
  const MarginalRevenue& rev = b.ec.run.response.revenue;
  Vec x = v2(4.0, 6.0);
  ParamSet al = b.g().zero_alpha();
  for (int i = 0; i < 2; ++i) {
    double psi0 = b.g().players[i].incentive.eval(x)(0);
    al[i](0) = -rev.marginal(i, x, 5.0) / psi0;
  }
  Vec out = respond_gradient_play(b.g(), rev, v2(0.1, 0.1), al, x, 5.0);
  EXPECT_LE((out - x).norm(), 1e-12);
}

TEST(Response, BestResponseVertex) {
  Bertrand b;
  ResponseModel rm = b.rm();
  rm.revenue.theta = {v2(-1.2, -0.5), v2(0.3, -1.0)};
  Vec others = v2(2.0, 7.0);
  auto r = respond_best_response(b.g(), rm, b.g().zero_alpha(), others, others, 5.0);
  EXPECT_NEAR(r.x(0), (5.0 - 0.5 * 7.0) / 2.4, 1e-8);
  EXPECT_NEAR(r.x(1), (5.0 + 0.3 * 2.0) / 2.0, 1e-8);
  EXPECT_FALSE(r.any_boundary());
}

TEST(Response, BestResponseHitsConstructedTarget) {
  Bertrand b;
  ResponseModel rm = b.rm();
  Vec x = v2(3.0, 9.0);
  ParamSet al = b.g().zero_alpha();
  const Vec target = v2(6.0, 2.5);
  for (int i = 0; i < 2; ++i) {
    Vec y = x;
    y(i) = target(i);
    double psi0 = b.g().players[i].incentive.eval(x)(0);
    al[i](0) = -rm.revenue.marginal(i, y, 5.0) / psi0;
  }
  auto r = respond_best_response(b.g(), rm, al, x, x, 5.0);
  EXPECT_LE((r.x - target).norm(), 1e-7);
}

TEST(Response, DecreasingPayoffFlagsBoundary) {
  Bertrand b;
  ResponseModel rm = b.rm();
  auto r = respond_best_response(b.g(), rm, b.g().zero_alpha(), v2(1.0, 1.0), v2(1.0, 1.0), -100.0);
  EXPECT_TRUE(r.any_boundary());
  EXPECT_NEAR(r.x(0), rm.search_lo, 1e-6);
}

TEST(Response, FictitiousPlayAverages) {
  Bertrand b;
  ResponseModel rm = b.rm();
  ParamSet al = b.g().zero_alpha();
  Vec a = v2(2.0, 8.0), c = v2(6.0, 4.0);
  auto one = respond_fictitious_play(b.g(), rm, al, {a}, 5.0);
  auto br = respond_best_response(b.g(), rm, al, a, a, 5.0);
  EXPECT_LE((one.x - br.x).norm(), 1e-12);

  std::vector<Vec> hist{a, c, a, c};
  auto fp = respond_fictitious_play(b.g(), rm, al, hist, 5.0);
  auto avg = respond_best_response(b.g(), rm, al, c, 0.5 * (a + c), 5.0);
  EXPECT_LE((fp.x - avg.x).norm(), 1e-10);

  EXPECT_THROW(respond_fictitious_play(b.g(), rm, al, {}, 5.0), Error);
}

TEST(Response, NonlinearRevenueNeedsPositivePrices) {
  MarginalRevenue rev;
  rev.nonlinear = true;
  rev.theta = {(Vec(3) << -1.2, -0.5, 7.5).finished(), (Vec(3) << 0.3, -1.0, 1.5).finished()};
  EXPECT_NEAR(rev.marginal(0, v2(1.0, 2.0), 5.0), 5.0 - 2.4 - 1.0 + 0.0 + 7.5 + 1.0, 1e-12);
  try {
    rev.marginal(1, v2(1.0, 0.0), 5.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDomainViolation);
  }
}

TEST(Response, RevenueDerivativeIsMarginal) {
  MarginalRevenue rev;
  rev.nonlinear = true;
  rev.theta = {(Vec(3) << -1.2, -0.5, 7.5).finished(), (Vec(3) << 0.3, -1.0, 1.5).finished()};
  Vec x = v2(3.0, 4.0);
  const double h = 1e-6;
  for (int i = 0; i < 2; ++i) {
    double d = (rev.revenue(i, x(i) + h, x, 5.0) - rev.revenue(i, x(i) - h, x, 5.0)) / (2 * h);
    EXPECT_NEAR(d, rev.marginal(i, x, 5.0), 1e-6);
  }
}

TEST(Response, SpectralRadiusOfLinearMap) {
  MarginalRevenue rev;
  rev.theta = {v2(-1.2, -0.5), v2(0.3, -1.0)};
  Mat A(2, 2);
  A << 1.0 - 0.24, -0.05, 0.03, 1.0 - 0.2;
  Eigen::EigenSolver<Mat> es(A, false);
  double want = std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(1)));
  EXPECT_NEAR(gradient_play_spectral_radius(rev, v2(0.1, 0.1), v2(5.0, 7.0)), want, 1e-14);
}

TEST(Response, LinearMyopicUpdate) {
  Bertrand b;
  std::vector<MyopicModel> ms(2, MyopicModel{1.0, 0.1, 0.1});
  Vec x = v2(5.0, 7.0);
  Vec out = respond_linear_myopic(b.g(), ms, b.g().zero_alpha(), x, 5.0);
  for (int i = 0; i < 2; ++i) {
    double phi = b.g().players[i].nominal.eval(x).dot(b.g().players[i].true_theta);
    EXPECT_NEAR(out(i), x(i) + 0.5 + 0.1 * phi, 1e-12);
  }
}

TEST(Response, StreamsAreReproducibleAndDistinct) {
  GaussianStream a(7, 0), b(7, 0), c(7, 1), d(8, 0);
  double va = a.draw();
  EXPECT_EQ(va, b.draw());
  EXPECT_NE(va, c.draw());
  EXPECT_NE(va, d.draw());
}

TEST(Response, ScalarMaximizerOnConcaveQuadratic) {
  auto f = [](double z) { return -(z - 1.3) * (z - 1.3); };
  auto df = [](double z) { return -2.0 * (z - 1.3); };
  ScalarMax m = maximize_scalar(f, df, 0.0, 4.0);
  EXPECT_NEAR(m.argmax, 1.3, 1e-10);
  EXPECT_FALSE(m.at_boundary);
}

}  // namespace
}  // namespace aidlab
