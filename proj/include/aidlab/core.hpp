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

#ifndef AIDLAB_CORE_HPP_
#define AIDLAB_CORE_HPP_

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace aidlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// One parameter vector per player (theta or alpha).
using ParamSet = std::vector<Vec>;

enum class ErrorCode {
  kDomainViolation,
  kIndexOutOfRange,
  kDimensionMismatch,
  kNonConvergence,
  kDivergedFromBox,
  kNoInteriorMaximum,
  kInfeasibleSet,
  kHypothesisViolated,
  kRankDeficient,
  kInfeasibleMargin,
  kInfeasibleStability,
  kSingularJacobian,
  kConfigError,
  kUnknownParameter,
  kUnsupportedDimension,
};

inline const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDomainViolation: return "DomainViolation";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonConvergence: return "NonConvergence";
    case ErrorCode::kDivergedFromBox: return "DivergedFromBox";
    case ErrorCode::kNoInteriorMaximum: return "NoInteriorMaximum";
    case ErrorCode::kInfeasibleSet: return "InfeasibleSet";
    case ErrorCode::kHypothesisViolated: return "HypothesisViolated";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kInfeasibleMargin: return "InfeasibleMargin";
    case ErrorCode::kInfeasibleStability: return "InfeasibleStability";
    case ErrorCode::kSingularJacobian: return "SingularJacobian";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kUnknownParameter: return "UnknownParameter";
    case ErrorCode::kUnsupportedDimension: return "UnsupportedDimension";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Axis-aligned bounds, lo(j) <= hi(j). lo == hi pins a coordinate.
struct Box {
  Vec lo;
  Vec hi;

  int dim() const { return static_cast<int>(lo.size()); }
  Vec center() const { return 0.5 * (lo + hi); }
  bool contains(const Vec& x, double tol = 0.0) const {
    for (int j = 0; j < dim(); ++j) {
      if (x(j) < lo(j) - tol || x(j) > hi(j) + tol) return false;
    }
    return true;
  }
  Vec clamp(const Vec& x) const { return x.cwiseMax(lo).cwiseMin(hi); }
  bool pinned(int j) const { return lo(j) == hi(j); }
};

inline void check_dim(const Vec& v, int n, const char* what) {
  if (v.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + " has length " + std::to_string(v.size()) +
                    ", expected " + std::to_string(n));
  }
}

// Maps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double kPi = std::numbers::pi;
  double r = std::remainder(a, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

inline Vec wrap_angles(const Vec& x) {
  Vec out(x.size());
  for (int j = 0; j < x.size(); ++j) out(j) = wrap_angle(x(j));
  return out;
}

// Minimum eigenvalue of (A + A^T) / 2.
inline double min_sym_eig(const Mat& a) {
  if (a.rows() == 1) return a(0, 0);
  if (a.rows() == 2) {
    double p = a(0, 0), q = a(1, 1);
    double r = 0.5 * (a(0, 1) + a(1, 0));
    return 0.5 * (p + q) - std::sqrt(0.25 * (p - q) * (p - q) + r * r);
  }
  Mat s = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Unit eigenvector for the minimum eigenvalue of the symmetric part.
inline Vec min_sym_eigvec(const Mat& a) {
  Mat s = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(s);
  return es.eigenvectors().col(0);
}

inline double sq(double v) { return v * v; }

}  // namespace aidlab

#endif  // AIDLAB_CORE_HPP_
