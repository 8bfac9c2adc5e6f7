// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HELM_ADAPTIVITY_HPP
#define HELM_ADAPTIVITY_HPP

#include <functional>
#include <optional>
#include <vector>

#include "helm/estimator.hpp"

namespace helm {

/// The ceil(fraction * N) elements with the largest eta, ties broken by
/// ascending index; returned in ascending index order.
std::vector<int> mark(const std::vector<double>& eta, double fraction = 0.1);

/// Refines every marked element `passes` times (children of marked elements
/// are bisected again), each pass with conforming closure.
Mesh refine_repeated(const Mesh& mesh, std::span<const int> marked, int passes);

struct AdaptState {
  int iteration = 0;
  std::shared_ptr<const Mesh> mesh;
  DiscreteField u_h;
  EstimateReport report;
  std::vector<int> marked;
  double h_min = 0.0;
  double h_max = 0.0;
  bool resolved = false;  // max_K k h_K / (2 pi p) <= 1
};

struct AdaptOptions {
  int iterations = 15;
  int reference_degree = -1;  // -1 selects max(min(p + 3, 6), p + 1)
  double mark_fraction = 0.1;
  int bisections = 2;  // halves the marked element diameters
  double c_up = 0.0;
  EquilibrationOptions equilibration;
  std::function<void(const AdaptState&)> on_iteration;
};

/// Solve, estimate, mark and refine, starting from problem.mesh. Returns one
/// state per visited mesh: iterations + 1 states unless the estimator
/// vanishes first.
std::vector<AdaptState> adapt_loop(const HelmholtzProblem& problem, const AdaptOptions& options);

}  // namespace helm

#endif  // HELM_ADAPTIVITY_HPP
