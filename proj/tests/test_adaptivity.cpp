// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "helm/adaptivity.hpp"
#include "helm/cli.hpp"

using namespace helm;

TEST_CASE("marking selects the top decile with ties in index order") {
  CHECK(mark({}).empty());
  CHECK(mark({0.3}) == std::vector<int>{0});
  CHECK(mark({1, 5, 5, 2, 5, 0, 0, 0, 0, 0, 0}, 0.1) == std::vector<int>{1, 2});
  CHECK(mark({1, 2, 3}, 0.0).empty());
  CHECK(mark({1, 2, 3}, 1.0) == std::vector<int>{0, 1, 2});
  CHECK_THROWS_AS(mark({1.0}, 1.5), ConfigError);

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n : {1, 7, 10, 11, 99, 100, 101, 1234}) {
    std::vector<double> eta(n);
    for (double& v : eta) v = u(rng);
    const std::vector<int> marked = mark(eta);
    CHECK(marked.size() == static_cast<std::size_t>(std::ceil(n / 10.0)));
    double lowest_marked = INFINITY;
    for (int k : marked) lowest_marked = std::min(lowest_marked, eta[k]);
    std::vector<char> flag(n, 0);
    for (int k : marked) flag[k] = 1;
    for (int k = 0; k < n; ++k) {
      if (!flag[k]) CHECK(eta[k] <= lowest_marked);
    }
    for (std::size_t i = 1; i < marked.size(); ++i) CHECK(marked[i] > marked[i - 1]);
  }
}

TEST_CASE("double bisection halves marked elements") {
  const Mesh mesh = build_cartesian_mesh(4);
  const int marked[] = {3, 17};
  const Mesh fine = refine_repeated(mesh, marked, 2);
  CHECK_FALSE(check_conformity(fine).has_value());
  double largest_inside = 0.0;
  for (int k = 0; k < fine.num_elements(); ++k) {
    const Triangle& t = fine.triangle(k);
    const Point c = (fine.vertex(t[0]) + fine.vertex(t[1]) + fine.vertex(t[2])) / 3.0;
    for (int m : marked) {
      const AffineMap map = affine_map(mesh, m);
      const Point xi = reference_coordinates(map, c);
      if (xi.x() > 0 && xi.y() > 0 && xi.sum() < 1) {
        largest_inside = std::max(largest_inside, element_geometry(fine, k).h);
      }
    }
  }
  CHECK(largest_inside == doctest::Approx(element_geometry(mesh, 3).h / 2));
  CHECK(refine_repeated(mesh, marked, 1) == refine(mesh, marked));
}

TEST_CASE("zero data stop the loop at the first iteration") {
  auto mesh = std::make_shared<const Mesh>(build_cartesian_mesh(2));
  AdaptOptions options;
  options.iterations = 5;
  const auto states = adapt_loop(HelmholtzProblem{mesh, 1, 2.0}, options);
  REQUIRE(states.size() == 1);
  CHECK(states[0].report.eta == 0.0);
  CHECK(states[0].marked.empty());
}

TEST_CASE("short adaptive run on the obstacle geometry") {
  auto mesh = std::make_shared<const Mesh>(load_mesh(std::string(HELM_ASSET_DIR) + "/scattering.mesh"));
  const double k = 2 * kPi;
  const HelmholtzProblem problem{mesh, 1, k, {}, impedance_datum(plane_wave(k, kPi / 3), k)};
  AdaptOptions options;
  options.iterations = 3;
  options.c_up = scattering_c_up(*mesh, k);
  int callbacks = 0;
  options.on_iteration = [&](const AdaptState&) { ++callbacks; };
  const auto states = adapt_loop(problem, options);
  REQUIRE(states.size() == 4);
  CHECK(callbacks == 4);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const AdaptState& s = states[i];
    CHECK(s.iteration == static_cast<int>(i));
    CHECK(s.report.error.has_value());
    CHECK(s.report.e_est_guaranteed() >= *s.report.e_fem());
    CHECK(s.h_min <= s.h_max);
    CHECK(s.resolved);
    if (i + 1 < states.size()) {
      CHECK(s.marked.size() == static_cast<std::size_t>(std::ceil(s.mesh->num_elements() / 10.0)));
      CHECK(states[i + 1].mesh->num_elements() > s.mesh->num_elements());
      CHECK(states[i + 1].report.eta < s.report.eta);
    } else {
      CHECK(s.marked.empty());
    }
  }
  options.reference_degree = 1;
  CHECK_THROWS_AS(adapt_loop(problem, options), ConfigError);
}
