// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HELM_COMMON_HPP
#define HELM_COMMON_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace helm {

using Complex = std::complex<double>;
using Point = Eigen::Vector2d;
using Vector2c = Eigen::Matrix<Complex, 2, 1>;

inline constexpr double kPi = 3.14159265358979323846;

/// Base class of all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MeshError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// Raised when a factorization fails or the solution misses the residual target.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double condition_estimate)
      : Error(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const { return condition_estimate_; }

 private:
  double condition_estimate_;
};

/// Raised when patch data violate (d_a,1) = (b_a,1) beyond the rebalancing window.
class CompatibilityError : public Error {
 public:
  CompatibilityError(const std::string& what, int vertex, double relative_residual)
      : Error(what), vertex_(vertex), relative_residual_(relative_residual) {}
  int vertex() const { return vertex_; }
  double relative_residual() const { return relative_residual_; }

 private:
  int vertex_;
  double relative_residual_;
};

class BoundsError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace helm

#endif  // HELM_COMMON_HPP
