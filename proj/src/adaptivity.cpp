// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#include "helm/adaptivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace helm {

std::vector<int> mark(const std::vector<double>& eta, double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ConfigError("marking fraction must lie in [0, 1]");
  const int n = static_cast<int>(eta.size());
  const int count = std::min(n, static_cast<int>(std::ceil(fraction * n - 1e-12)));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return eta[a] > eta[b]; });
  order.resize(count);
  std::sort(order.begin(), order.end());
  return order;
}

Mesh refine_repeated(const Mesh& mesh, std::span<const int> marked, int passes) {
  Mesh current = refine(mesh, marked);
  std::vector<char> flag(mesh.num_elements(), 0);
  for (int k : marked) flag[k] = 1;
  for (int pass = 1; pass < passes; ++pass) {
    std::vector<int> children;
    std::vector<char> next(current.num_elements(), 0);
    for (int k = 0; k < current.num_elements(); ++k) {
      if (flag[current.parent()[k]]) {
        children.push_back(k);
        next[k] = 1;
      }
    }
    current = refine(current, children);
    flag = std::move(next);
  }
  return current;
}

std::vector<AdaptState> adapt_loop(const HelmholtzProblem& problem, const AdaptOptions& options) {
  problem.validate();
  const int p = problem.degree;
  const int p_ref = options.reference_degree > 0 ? options.reference_degree
                                                 : std::max(std::min(p + 3, 6), p + 1);
  if (p_ref <= p) throw ConfigError("reference degree must exceed the discretization degree");

  std::vector<AdaptState> states;
  std::shared_ptr<const Mesh> mesh = problem.mesh;
  for (int it = 0; it <= options.iterations; ++it) {
    HelmholtzProblem current = problem;
    current.mesh = mesh;
    AdaptState state;
    state.iteration = it;
    state.mesh = mesh;
    state.u_h = solve_helmholtz(current);
    const ProjectedData data = project_data(current);
    const FluxField flux = equilibrate(current, state.u_h, data, options.equilibration);

    HelmholtzProblem reference_problem = current;
    reference_problem.degree = p_ref;
    const DiscreteField reference = solve_helmholtz(reference_problem);

    EstimateReport& r = state.report;
    r.eta_k = eta_all(flux, state.u_h);
    r.osc_k = osc_all(current, data);
    r.eta = root_sum_squares(r.eta_k);
    r.osc = root_sum_squares(r.osc_k);
    const std::vector<double> e2 = energy_error2_local(reference, state.u_h, problem.k);
    r.error_k.resize(e2.size());
    std::transform(e2.begin(), e2.end(), r.error_k.begin(), [](double v) { return std::sqrt(v); });
    r.error = sum_sqrt(e2);
    r.reference_norm = energy_norm(reference, problem.k);
    r.c_up = options.c_up;

    state.h_min = INFINITY;
    state.h_max = 0.0;
    for (int k = 0; k < mesh->num_elements(); ++k) {
      const double h = element_geometry(*mesh, k).h;
      state.h_min = std::min(state.h_min, h);
      state.h_max = std::max(state.h_max, h);
    }
    state.resolved = problem.k * state.h_max / (2.0 * kPi * p) <= 1.0;

    const bool last = it == options.iterations || r.eta == 0.0;
    if (!last) state.marked = mark(r.eta_k, options.mark_fraction);
    if (options.on_iteration) options.on_iteration(state);
    states.push_back(state);
    if (last) break;
    mesh = std::make_shared<const Mesh>(refine_repeated(*mesh, state.marked, options.bisections));
  }
  return states;
}

}  // namespace helm
