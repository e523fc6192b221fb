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
#include <random>

#include "aidlab/basis.hpp"
#include "support.hpp"

namespace aidlab {
namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

TEST(Basis, ConstantIsOne) {
  auto f = BasisFunction::constant(2);
  EXPECT_EQ(f.eval(v2(3.0, -7.0)), 1.0);
  EXPECT_TRUE(f.grad(v2(3.0, -7.0)).isZero());
  EXPECT_TRUE(f.hess(v2(3.0, -7.0)).isZero());
}

TEST(Basis, RbfAtItsCenter) {
  auto f = BasisFunction::gaussian_rbf(2, 0, -1, 5.0, 0.01);
  EXPECT_DOUBLE_EQ(f.eval(v2(5.0, 123.0)), 1.0);
  EXPECT_NEAR(f.eval(v2(15.0, 0.0)), std::exp(-1.0), 1e-15);
}

TEST(Basis, NegCosValues) {
  auto f = BasisFunction::trig_cos(2, 0);
  EXPECT_DOUBLE_EQ(f.eval(v2(0.0, 0.4)), -1.0);
  EXPECT_NEAR(f.partial(v2(1.1, 0.0), 0), std::sin(1.1), 1e-12);
  EXPECT_NEAR(f.partial(v2(1.1, 0.0), 0), 0.89121, 1e-5);
  EXPECT_DOUBLE_EQ(f.partial2(v2(0.0, 0.0), 0, 0), 1.0);
}

TEST(Basis, LinearCoordinateIgnoresOthers) {
  auto f = BasisFunction::linear_coordinate(2, 1);
  EXPECT_EQ(f.partial(v2(0.3, 0.7), 0), 0.0);
  EXPECT_EQ(f.partial(v2(0.3, 0.7), 1), 1.0);
}

TEST(Basis, ShiftedTrigAndDiff) {
  auto s = BasisFunction::trig_sin_shift(2, 0, -1.8);
  auto c = BasisFunction::trig_cos_shift(2, 0, -1.8);
  auto d = BasisFunction::trig_cos_diff(2, 0, 1);
  Vec x = v2(-1.8, 0.5);
  EXPECT_NEAR(s.eval(x), 0.0, 1e-15);
  EXPECT_NEAR(c.eval(x), 1.0, 1e-15);
  EXPECT_NEAR(d.eval(x), std::cos(-2.3), 1e-15);
  EXPECT_NEAR(d.partial(x, 1), -d.partial(x, 0), 1e-15);
}

TEST(Basis, LogRejectsNonPositive) {
  auto f = BasisFunction::log_coordinate(2, 0);
  EXPECT_NEAR(f.eval(v2(std::exp(1.0), 0.0)), 1.0, 1e-15);
  try {
    f.eval(v2(-1.0, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDomainViolation);
  }
}

TEST(Basis, BadIndicesRejected) {
  EXPECT_THROW(BasisFunction::linear_coordinate(2, 2), Error);
  EXPECT_THROW(BasisFunction::product(2, 0, 5), Error);
  EXPECT_THROW(BasisFunction::trig_cos_diff(2, 1, 1), Error);
  EXPECT_THROW(BasisFunction::gaussian_rbf(2, 0, -1, 0.0, 0.0), Error);
  EXPECT_THROW(BasisStack(std::vector<BasisFunction>{}), Error);
  EXPECT_THROW(BasisStack({BasisFunction::constant(2), BasisFunction::constant(3)}), Error);
  auto f = BasisFunction::constant(2);
  EXPECT_THROW(f.eval(Vec::Zero(3)), Error);
}

TEST(Basis, StackMatchesMembers) {
  BasisStack st({BasisFunction::trig_cos(2, 0), BasisFunction::product(2, 0, 1),
                 BasisFunction::constant(2)});
  Vec x = v2(0.4, -1.3);
  Vec e = st.eval(x);
  ASSERT_EQ(e.size(), 3);
  EXPECT_DOUBLE_EQ(e(0), -std::cos(0.4));
  EXPECT_DOUBLE_EQ(e(1), 0.4 * -1.3);
  Mat J = st.jacobian(x);
  EXPECT_DOUBLE_EQ(J(1, 0), -1.3);
  EXPECT_DOUBLE_EQ(J(1, 1), 0.4);
  Vec h = st.hess_diag(x, 0);
  EXPECT_DOUBLE_EQ(h(0), std::cos(0.4));
  EXPECT_DOUBLE_EQ(h(1), 0.0);
  Vec coef = (Vec(3) << 2.0, -1.0, 9.0).finished();
  EXPECT_NEAR(st.dot_partial(x, 0, coef), st.grad(x, 0).dot(coef), 1e-15);
}

TEST(Basis, FiniteDifferencesAgree) {
  std::mt19937_64 rng(99);
  for (const auto& ks : testing::every_kind()) {
    std::uniform_real_distribution<double> u(ks.lo, ks.hi);
    for (int t = 0; t < 20; ++t) {
      Vec x(3);
      for (int j = 0; j < 3; ++j) x(j) = u(rng);
      EXPECT_LE(testing::rel_err(ks.f.grad(x), testing::fd_grad(ks.f, x)), 1e-6) << ks.label;
      EXPECT_LE(testing::rel_err(ks.f.hess(x), testing::fd_hess(ks.f, x)), 1e-5) << ks.label;
    }
  }
}

TEST(Basis, LipschitzBoundHoldsOnSamples) {
  std::mt19937_64 rng(5);
  for (const auto& ks : testing::every_kind()) {
    Box b{Vec::Constant(3, ks.lo), Vec::Constant(3, ks.hi)};
    double L = ks.f.lipschitz_bound(b);
    std::uniform_real_distribution<double> u(ks.lo, ks.hi);
    for (int t = 0; t < 50; ++t) {
      Vec x(3);
      for (int j = 0; j < 3; ++j) x(j) = u(rng);
      EXPECT_LE(ks.f.grad(x).norm(), L + 1e-12) << ks.label;
    }
  }
}

}  // namespace
}  // namespace aidlab
