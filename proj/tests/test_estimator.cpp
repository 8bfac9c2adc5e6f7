// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "helm/estimator.hpp"

using namespace helm;

namespace {

constexpr double kTraceConstantOneEdge = 2.70875752500710343477;  // tests/oracles/constants.py

AnalyticField x2y() {
  AnalyticField u;
  u.value = [](const Point& x) { return Complex(x.x() * x.x() * x.y()); };
  u.gradient = [](const Point& x) { return Vector2c(2.0 * x.x() * x.y(), x.x() * x.x()); };
  return u;
}

}  // namespace

TEST_CASE("trace constant counts absorbing edges") {
  const Mesh mesh = build_cartesian_mesh(2);
  int seen_one = 0;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    int absorbing = 0;
    for (int i = 0; i < 3; ++i) absorbing += mesh.is_boundary_edge(mesh.element_edge(k, i));
    const double c = trace_constant(mesh, k);
    CHECK(c == doctest::Approx(kTraceConstantOneEdge * std::sqrt(double(absorbing))));
    seen_one += absorbing == 1;
  }
  CHECK(seen_one > 0);
  const Mesh sealed = build_cartesian_mesh(2, Point(-1, -1), Point(1, 1), BoundaryTag::Dirichlet);
  for (int k = 0; k < sealed.num_elements(); ++k) CHECK(trace_constant(sealed, k) == 0.0);
}

TEST_CASE("exact plane-wave energy norms") {
  const Mesh mesh = build_cartesian_mesh(64);
  for (auto [m, expected] : {std::pair{1.0, 10.2024299280824867}, std::pair{4.0, 36.9302088845204244},
                             std::pair{10.0, 90.2607939980513929}}) {
    const double k = m * kPi;
    CHECK(energy_norm(plane_wave(k, kPi / 3), mesh, k, 12) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(expected == doctest::Approx(std::sqrt(8 * k * k + 8 * k)).epsilon(1e-15));
  }
}

TEST_CASE("local energy norms sum to the global norm") {
  auto mesh = std::make_shared<const Mesh>(build_cartesian_mesh(3));
  auto space = std::make_shared<const LagrangeSpace>(mesh, 2);
  const double k = 2.0;
  const DiscreteField f = interpolate(x2y(), space);
  const auto local = energy_norm2_local(f, k);
  double total = 0.0;
  for (double v : local) total += v;
  CHECK(std::sqrt(total) == doctest::Approx(energy_norm(f, k)));
  // Degree-2 interpolant of x^2 y differs from it; discrete and analytic
  // evaluations of the same P2 field agree.
  AnalyticField quad;
  quad.value = [](const Point& x) { return Complex(x.x() * x.y() + 1.0); };
  quad.gradient = [](const Point& x) { return Vector2c(x.y(), x.x()); };
  const DiscreteField g = interpolate(quad, space);
  CHECK(energy_norm(g, k) == doctest::Approx(energy_norm(quad, *mesh, k, 8)).epsilon(1e-12));
  CHECK(sum_sqrt(energy_error2_local(quad, g, k, 8)) < 1e-12);
}

TEST_CASE("discrete reference errors") {
  auto mesh = std::make_shared<const Mesh>(build_cartesian_mesh(2));
  auto coarse = std::make_shared<const LagrangeSpace>(mesh, 1);
  auto fine = std::make_shared<const LagrangeSpace>(mesh, 3);
  const double k = 1.5;
  const DiscreteField u1 = interpolate(x2y(), coarse);
  const DiscreteField u3 = interpolate(x2y(), fine);
  const double discrete = sum_sqrt(energy_error2_local(u3, u1, k));
  const double analytic = sum_sqrt(energy_error2_local(x2y(), u1, k, 10));
  CHECK(discrete == doctest::Approx(analytic).epsilon(1e-12));
}

TEST_CASE("estimator and oscillation vanish for exactly represented data") {
  const double k = 2.0;
  auto mesh = std::make_shared<const Mesh>(build_cartesian_mesh(3));
  const AnalyticField u = x2y();
  for (int p = 3; p <= 4; ++p) {
    const HelmholtzProblem problem{mesh, p, k,
                                   [k](const Point& x) { return Complex(-k * k * x.x() * x.x() * x.y() - 2 * x.y()); },
                                   impedance_datum(u, k)};
    const DiscreteField u_h = solve_helmholtz(problem);
    const ProjectedData data = project_data(problem);
    const FluxField flux = equilibrate(problem, u_h, data);
    const double norm = energy_norm(u_h, k);
    CHECK(root_sum_squares(eta_all(flux, u_h)) <= 1e-8 * norm);
    CHECK(root_sum_squares(osc_all(problem, data)) <= 1e-12);
  }
}

TEST_CASE("estimator bounds the error with the guaranteed constant") {
  const double k = kPi;
  const AnalyticField u = plane_wave(k, kPi / 3);
  auto mesh = std::make_shared<const Mesh>(build_cartesian_mesh(6));
  const HelmholtzProblem problem{mesh, 1, k, {}, impedance_datum(u, k)};
  const DiscreteField u_h = solve_helmholtz(problem);
  const ProjectedData data = project_data(problem);
  const std::vector<double> eta = eta_all(equilibrate(problem, u_h, data), u_h);
  const std::vector<double> osc = osc_all(problem, data);
  for (double v : osc) CHECK(v >= 0.0);
  const double error = sum_sqrt(energy_error2_local(u, u_h, k, 12));
  EstimateReport r;
  r.eta = root_sum_squares(eta);
  r.error = error;
  r.reference_norm = energy_norm(u, *mesh, k, 12);
  r.c_up = 11.0;
  CHECK(r.e_est() == doctest::Approx(100 * r.eta / r.reference_norm));
  CHECK(*r.e_fem() == doctest::Approx(100 * error / r.reference_norm));
  CHECK(*r.effectivity() == doctest::Approx(r.eta / error));
  CHECK(*r.guaranteed_effectivity() == doctest::Approx(11.0 * r.eta / error));
  CHECK(r.e_est_guaranteed() >= *r.e_fem());
  CHECK_FALSE(r.e_ba().has_value());
  EstimateReport empty;
  CHECK_FALSE(empty.effectivity().has_value());
}

TEST_CASE("summation helpers") {
  CHECK(sum_sqrt({9.0, 16.0}) == doctest::Approx(5.0));
  CHECK(root_sum_squares({3.0, 4.0}) == doctest::Approx(5.0));
  CHECK(root_sum_squares({}) == 0.0);
}
