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

// Scalar basis functions on the joint strategy space and ordered stacks of
// them. Every kind carries analytic first and second derivatives.

#ifndef AIDLAB_BASIS_HPP_
#define AIDLAB_BASIS_HPP_

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "aidlab/core.hpp"

namespace aidlab {

enum class BasisKind {
  kConstant,
  kLinearCoordinate,
  kLogCoordinate,
  kTrigCos,        // -cos(x_c)
  kTrigCosDiff,    // cos(x_c - x_o)
  kTrigSinShift,   // sin(x_c - d)
  kTrigCosShift,   // cos(x_c - d)
  kGaussianRbf,    // exp(-width * (<weights, x> - center)^2)
  kProduct,        // x_c * x_o
};

inline const char* basis_kind_name(BasisKind k) {
  switch (k) {
    case BasisKind::kConstant: return "constant";
    case BasisKind::kLinearCoordinate: return "linear-coordinate";
    case BasisKind::kLogCoordinate: return "log-coordinate";
    case BasisKind::kTrigCos: return "trig-cos";
    case BasisKind::kTrigCosDiff: return "trig-cos-diff";
    case BasisKind::kTrigSinShift: return "trig-sin-shift";
    case BasisKind::kTrigCosShift: return "trig-cos-shift";
    case BasisKind::kGaussianRbf: return "gaussian-rbf";
    case BasisKind::kProduct: return "product";
  }
  return "?";
}

inline BasisKind parse_basis_kind(const std::string& s) {
  for (BasisKind k :
       {BasisKind::kConstant, BasisKind::kLinearCoordinate,
        BasisKind::kLogCoordinate, BasisKind::kTrigCos, BasisKind::kTrigCosDiff,
        BasisKind::kTrigSinShift, BasisKind::kTrigCosShift,
        BasisKind::kGaussianRbf, BasisKind::kProduct}) {
    if (s == basis_kind_name(k)) return k;
  }
  throw Error(ErrorCode::kConfigError, "unknown basis kind '" + s + "'");
}

struct BasisParams {
  int coordinate = 0;
  int other = -1;
  double shift = 0.0;
  Vec weights;          // rbf direction, length n
  double center = 0.0;  // rbf center along weights
  double width = 1.0;   // rbf kappa
  double x_min = 0.1;   // log floor used for the Lipschitz bound
};

class BasisFunction {
 public:
  BasisFunction() = default;

  static BasisFunction constant(int n) { return {BasisKind::kConstant, n, {}}; }
  static BasisFunction linear_coordinate(int n, int c) {
    BasisParams p;
    p.coordinate = c;
    return {BasisKind::kLinearCoordinate, n, p};
  }
  static BasisFunction log_coordinate(int n, int c, double x_min = 0.1) {
    BasisParams p;
    p.coordinate = c;
    p.x_min = x_min;
    return {BasisKind::kLogCoordinate, n, p};
  }
  static BasisFunction trig_cos(int n, int c) {
    BasisParams p;
    p.coordinate = c;
    return {BasisKind::kTrigCos, n, p};
  }
  static BasisFunction trig_cos_diff(int n, int c, int o) {
    BasisParams p;
    p.coordinate = c;
    p.other = o;
    return {BasisKind::kTrigCosDiff, n, p};
  }
  static BasisFunction trig_sin_shift(int n, int c, double d) {
    BasisParams p;
    p.coordinate = c;
    p.shift = d;
    return {BasisKind::kTrigSinShift, n, p};
  }
  static BasisFunction trig_cos_shift(int n, int c, double d) {
    BasisParams p;
    p.coordinate = c;
    p.shift = d;
    return {BasisKind::kTrigCosShift, n, p};
  }
  static BasisFunction gaussian_rbf(const Vec& weights, double center,
                                    double width) {
    BasisParams p;
    p.weights = weights;
    p.center = center;
    p.width = width;
    return {BasisKind::kGaussianRbf, static_cast<int>(weights.size()), p};
  }
  // exp(-width * (x_c - center)^2), or of (x_c - x_o) when o >= 0.
  static BasisFunction gaussian_rbf(int n, int c, int o, double center,
                                    double width) {
    Vec w = Vec::Zero(n);
    if (c < 0 || c >= n || o >= n) {
      throw Error(ErrorCode::kIndexOutOfRange, "rbf coordinate out of range");
    }
    w(c) = 1.0;
    if (o >= 0) w(o) -= 1.0;
    return gaussian_rbf(w, center, width);
  }
  static BasisFunction product(int n, int c, int o) {
    BasisParams p;
    p.coordinate = c;
    p.other = o;
    return {BasisKind::kProduct, n, p};
  }

  BasisKind kind() const { return kind_; }
  int dim() const { return n_; }
  const BasisParams& params() const { return p_; }

  double eval(const Vec& x) const {
    check_dim(x, n_, "basis input");
    switch (kind_) {
      case BasisKind::kConstant: return 1.0;
      case BasisKind::kLinearCoordinate: return x(p_.coordinate);
      case BasisKind::kLogCoordinate: return std::log(positive(x));
      case BasisKind::kTrigCos: return -std::cos(x(p_.coordinate));
      case BasisKind::kTrigCosDiff:
        return std::cos(x(p_.coordinate) - x(p_.other));
      case BasisKind::kTrigSinShift: return std::sin(x(p_.coordinate) - p_.shift);
      case BasisKind::kTrigCosShift: return std::cos(x(p_.coordinate) - p_.shift);
      case BasisKind::kGaussianRbf: {
        double u = p_.weights.dot(x) - p_.center;
        return std::exp(-p_.width * u * u);
      }
      case BasisKind::kProduct: return x(p_.coordinate) * x(p_.other);
    }
    return 0.0;
  }

  // d phi / d x_i
  double partial(const Vec& x, int i) const {
    check_dim(x, n_, "basis input");
    const int c = p_.coordinate;
    switch (kind_) {
      case BasisKind::kConstant: return 0.0;
      case BasisKind::kLinearCoordinate: return i == c ? 1.0 : 0.0;
      case BasisKind::kLogCoordinate: return i == c ? 1.0 / positive(x) : 0.0;
      case BasisKind::kTrigCos: return i == c ? std::sin(x(c)) : 0.0;
      case BasisKind::kTrigCosDiff: {
        double s = sign_in_diff(i);
        return s == 0.0 ? 0.0 : -s * std::sin(x(c) - x(p_.other));
      }
      case BasisKind::kTrigSinShift:
        return i == c ? std::cos(x(c) - p_.shift) : 0.0;
      case BasisKind::kTrigCosShift:
        return i == c ? -std::sin(x(c) - p_.shift) : 0.0;
      case BasisKind::kGaussianRbf: {
        double a = p_.weights(i);
        if (a == 0.0) return 0.0;
        double u = p_.weights.dot(x) - p_.center;
        return -2.0 * p_.width * u * a * std::exp(-p_.width * u * u);
      }
      case BasisKind::kProduct:
        return (i == c ? x(p_.other) : 0.0) + (i == p_.other ? x(c) : 0.0);
    }
    return 0.0;
  }

  // d^2 phi / d x_i d x_j
  double partial2(const Vec& x, int i, int j) const {
    check_dim(x, n_, "basis input");
    const int c = p_.coordinate;
    switch (kind_) {
      case BasisKind::kConstant:
      case BasisKind::kLinearCoordinate: return 0.0;
      case BasisKind::kLogCoordinate: {
        if (i != c || j != c) return 0.0;
        double v = positive(x);
        return -1.0 / (v * v);
      }
      case BasisKind::kTrigCos:
        return (i == c && j == c) ? std::cos(x(c)) : 0.0;
      case BasisKind::kTrigCosDiff:
        return -sign_in_diff(i) * sign_in_diff(j) *
               std::cos(x(c) - x(p_.other));
      case BasisKind::kTrigSinShift:
        return (i == c && j == c) ? -std::sin(x(c) - p_.shift) : 0.0;
      case BasisKind::kTrigCosShift:
        return (i == c && j == c) ? -std::cos(x(c) - p_.shift) : 0.0;
      case BasisKind::kGaussianRbf: {
        double ai = p_.weights(i), aj = p_.weights(j);
        if (ai == 0.0 || aj == 0.0) return 0.0;
        double u = p_.weights.dot(x) - p_.center;
        double k = p_.width;
        return (4.0 * k * k * u * u - 2.0 * k) * ai * aj * std::exp(-k * u * u);
      }
      case BasisKind::kProduct:
        return ((i == c && j == p_.other) ? 1.0 : 0.0) +
               ((i == p_.other && j == c) ? 1.0 : 0.0);
    }
    return 0.0;
  }

  Vec grad(const Vec& x) const {
    Vec g(n_);
    for (int i = 0; i < n_; ++i) g(i) = partial(x, i);
    return g;
  }

  Mat hess(const Vec& x) const {
    Mat h(n_, n_);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j <= i; ++j) h(i, j) = h(j, i) = partial2(x, i, j);
    }
    return h;
  }

  // Upper bound on |grad phi| over the box.
  double lipschitz_bound(const Box& box) const {
    const int c = p_.coordinate;
    switch (kind_) {
      case BasisKind::kConstant: return 0.0;
      case BasisKind::kLinearCoordinate:
      case BasisKind::kTrigCos:
      case BasisKind::kTrigSinShift:
      case BasisKind::kTrigCosShift: return 1.0;
      case BasisKind::kTrigCosDiff: return std::sqrt(2.0);
      case BasisKind::kLogCoordinate: {
        double lo = box.lo(c) > 0.0 ? box.lo(c) : p_.x_min;
        return 1.0 / lo;
      }
      case BasisKind::kGaussianRbf:
        return std::sqrt(2.0 * p_.width) * std::exp(-0.5) * p_.weights.norm();
      case BasisKind::kProduct: {
        double ma = std::max(std::abs(box.lo(c)), std::abs(box.hi(c)));
        double mb = std::max(std::abs(box.lo(p_.other)), std::abs(box.hi(p_.other)));
        if (c == p_.other) return 2.0 * ma;
        return std::hypot(ma, mb);
      }
    }
    return 0.0;
  }

 private:
  BasisFunction(BasisKind k, int n, BasisParams p)
      : kind_(k), n_(n), p_(std::move(p)) {
    validate();
  }

  void validate() const {
    auto in_range = [&](int c) { return c >= 0 && c < n_; };
    switch (kind_) {
      case BasisKind::kConstant: break;
      case BasisKind::kTrigCosDiff:
      case BasisKind::kProduct:
        if (!in_range(p_.other)) {
          throw Error(ErrorCode::kIndexOutOfRange,
                      std::string(basis_kind_name(kind_)) + " other index");
        }
        if (kind_ == BasisKind::kTrigCosDiff && p_.other == p_.coordinate) {
          throw Error(ErrorCode::kConfigError, "trig-cos-diff needs two coordinates");
        }
        [[fallthrough]];
      case BasisKind::kLinearCoordinate:
      case BasisKind::kLogCoordinate:
      case BasisKind::kTrigCos:
      case BasisKind::kTrigSinShift:
      case BasisKind::kTrigCosShift:
        if (!in_range(p_.coordinate)) {
          throw Error(ErrorCode::kIndexOutOfRange,
                      std::string(basis_kind_name(kind_)) + " coordinate " +
                          std::to_string(p_.coordinate));
        }
        break;
      case BasisKind::kGaussianRbf:
        if (!(p_.width > 0.0)) {
          throw Error(ErrorCode::kConfigError, "gaussian-rbf width must be > 0");
        }
        break;
    }
    if (kind_ == BasisKind::kLogCoordinate && !(p_.x_min > 0.0)) {
      throw Error(ErrorCode::kConfigError, "log-coordinate x_min must be > 0");
    }
  }

  double positive(const Vec& x) const {
    double v = x(p_.coordinate);
    if (!(v > 0.0)) {
      throw Error(ErrorCode::kDomainViolation,
                  "log basis at non-positive x_" + std::to_string(p_.coordinate + 1) +
                      " = " + std::to_string(v));
    }
    return v;
  }

  double sign_in_diff(int i) const {
    if (i == p_.coordinate) return 1.0;
    if (i == p_.other) return -1.0;
    return 0.0;
  }

  BasisKind kind_ = BasisKind::kConstant;
  int n_ = 0;
  BasisParams p_;
};

class BasisStack {
 public:
  BasisStack() = default;
  explicit BasisStack(std::vector<BasisFunction> fns) : fns_(std::move(fns)) {
    if (fns_.empty()) {
      throw Error(ErrorCode::kConfigError, "basis stack must not be empty");
    }
    n_ = fns_[0].dim();
    for (const auto& f : fns_) {
      if (f.dim() != n_) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "basis functions disagree on strategy dimension");
      }
    }
  }

  int size() const { return static_cast<int>(fns_.size()); }
  int strategy_dim() const { return n_; }
  const BasisFunction& operator[](int j) const { return fns_[j]; }
  const std::vector<BasisFunction>& functions() const { return fns_; }

  Vec eval(const Vec& x) const {
    check_dim(x, n_, "strategy");
    Vec v(size());
    for (int j = 0; j < size(); ++j) v(j) = fns_[j].eval(x);
    return v;
  }

  // D_i Phi(x): component j is d phi_j / d x_i.
  Vec grad(const Vec& x, int i) const {
    check_dim(x, n_, "strategy");
    check_index(i);
    Vec v(size());
    for (int j = 0; j < size(); ++j) v(j) = fns_[j].partial(x, i);
    return v;
  }

  // m x n matrix of all first partials.
  Mat jacobian(const Vec& x) const {
    check_dim(x, n_, "strategy");
    Mat J(size(), n_);
    for (int j = 0; j < size(); ++j) {
      for (int i = 0; i < n_; ++i) J(j, i) = fns_[j].partial(x, i);
    }
    return J;
  }

  std::vector<Mat> hess(const Vec& x) const {
    check_dim(x, n_, "strategy");
    std::vector<Mat> out;
    out.reserve(size());
    for (const auto& f : fns_) out.push_back(f.hess(x));
    return out;
  }

  Vec hess_entry(const Vec& x, int i, int k) const {
    check_dim(x, n_, "strategy");
    check_index(i);
    check_index(k);
    Vec v(size());
    for (int j = 0; j < size(); ++j) v(j) = fns_[j].partial2(x, i, k);
    return v;
  }

  Vec hess_diag(const Vec& x, int i) const { return hess_entry(x, i, i); }

  // Sum of coefficient-weighted partials without temporaries; hot path of the
  // equilibrium solver.
  double dot_partial(const Vec& x, int i, const Vec& coef) const {
    double s = 0.0;
    for (int j = 0; j < size(); ++j) {
      if (coef(j) != 0.0) s += coef(j) * fns_[j].partial(x, i);
    }
    return s;
  }
  double dot_partial2(const Vec& x, int i, int k, const Vec& coef) const {
    double s = 0.0;
    for (int j = 0; j < size(); ++j) {
      if (coef(j) != 0.0) s += coef(j) * fns_[j].partial2(x, i, k);
    }
    return s;
  }

  // Lipschitz constant of x -> Phi(x) in the Euclidean norm.
  double lipschitz_bound(const Box& box) const {
    double s = 0.0;
    for (const auto& f : fns_) s += sq(f.lipschitz_bound(box));
    return std::sqrt(s);
  }

 private:
  void check_index(int i) const {
    if (i < 0 || i >= n_) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "player index " + std::to_string(i));
    }
  }

  std::vector<BasisFunction> fns_;
  int n_ = 0;
};

}  // namespace aidlab

#endif  // AIDLAB_BASIS_HPP_
