// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HELM_QUADRATURE_HPP
#define HELM_QUADRATURE_HPP

#include <vector>

#include "helm/common.hpp"

namespace helm {

/// Quadrature on the reference triangle (0,0),(1,0),(0,1); weights sum to 1/2.
struct TriangleRule {
  std::vector<Point> points;
  std::vector<double> weights;
  int exact_degree;
};

/// Quadrature on [0,1]; weights sum to 1.
struct EdgeRule {
  std::vector<double> points;
  std::vector<double> weights;
  int exact_degree;
};

inline constexpr int kMaxQuadratureDegree = 30;

/// Rule exact for all polynomials of total degree <= `degree` (0..30).
/// Returned references stay valid for the lifetime of the program.
const TriangleRule& triangle_rule(int degree);
const EdgeRule& edge_rule(int degree);

}  // namespace helm

#endif  // HELM_QUADRATURE_HPP
