// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "helm/mesh.hpp"

using namespace helm;

namespace {

double min_angle(const Mesh& mesh) {
  double worst = kPi;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const Triangle& t = mesh.triangle(k);
    for (int i = 0; i < 3; ++i) {
      const Point u = mesh.vertex(t[(i + 1) % 3]) - mesh.vertex(t[i]);
      const Point v = mesh.vertex(t[(i + 2) % 3]) - mesh.vertex(t[i]);
      worst = std::min(worst, std::acos(u.dot(v) / (u.norm() * v.norm())));
    }
  }
  return worst;
}

const std::string kTwoTriangles =
    "4 2 4\n"
    "0 0\n1 0\n1 1\n0 1\n"
    "0 1 2\n0 2 3\n"
    "0 1 A\n1 2 A\n2 3 D\n3 0 D\n";

}  // namespace

TEST_CASE("cartesian mesh counts and area") {
  for (int n : {1, 2, 5, 8}) {
    const Mesh mesh = build_cartesian_mesh(n);
    CHECK(mesh.num_vertices() == (n + 1) * (n + 1));
    CHECK(mesh.num_elements() == 2 * n * n);
    CHECK(mesh.num_edges() == 3 * n * n + 2 * n);
    CHECK(mesh.boundary_edges().size() == static_cast<std::size_t>(4 * n));
    CHECK(total_area(mesh) == doctest::Approx(4.0));
    CHECK(mesh_size(mesh) == doctest::Approx(2.0 * std::sqrt(2.0) / n));
    CHECK(domain_diameter(mesh) == doctest::Approx(2.0 * std::sqrt(2.0)));
    CHECK_FALSE(check_conformity(mesh).has_value());
    CHECK(mesh.has_absorbing_boundary());
    CHECK_FALSE(mesh.has_dirichlet_boundary());
  }
}

TEST_CASE("element geometry of a right isosceles triangle") {
  const Mesh mesh = build_cartesian_mesh(2);
  const ElementGeometry g = element_geometry(mesh, 0);
  CHECK(g.h == doctest::Approx(std::sqrt(2.0)));
  CHECK(g.area == doctest::Approx(0.5));
  CHECK(g.rho == doctest::Approx(1.0 / (2.0 + std::sqrt(2.0))));
  CHECK(g.kappa == doctest::Approx(g.rho / g.h));
}

TEST_CASE("topology is consistent") {
  const Mesh mesh = build_cartesian_mesh(4);
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const Triangle& t = mesh.triangle(k);
    for (int i = 0; i < 3; ++i) {
      const int e = mesh.element_edge(k, i);
      const auto& ev = mesh.edge(e);
      CHECK(ev[0] < ev[1]);
      CHECK(ev[0] == std::min(t[(i + 1) % 3], t[(i + 2) % 3]));
      CHECK(ev[1] == std::max(t[(i + 1) % 3], t[(i + 2) % 3]));
      const auto& els = mesh.edge_elements(e);
      CHECK((els[0] == k || els[1] == k));
      CHECK(mesh.find_edge(ev[1], ev[0]) == e);
      const Point n = outward_normal(mesh, k, i);
      const Point mid = 0.5 * (mesh.vertex(ev[0]) + mesh.vertex(ev[1]));
      const Point centroid = (mesh.vertex(t[0]) + mesh.vertex(t[1]) + mesh.vertex(t[2])) / 3.0;
      CHECK(n.norm() == doctest::Approx(1.0));
      CHECK(n.dot(mid - centroid) > 0.0);
    }
  }
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    for (int k : mesh.vertex_elements(v)) {
      const Triangle& t = mesh.triangle(k);
      CHECK(std::find(t.begin(), t.end(), v) != t.end());
    }
  }
  CHECK(mesh.find_edge(0, mesh.num_vertices() - 1) == -1);
}

TEST_CASE("find_mesh_defect reports invariant violations") {
  std::vector<Point> v{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  std::vector<BoundaryEdge> b{{{0, 1}, BoundaryTag::Absorbing},
                              {{1, 2}, BoundaryTag::Absorbing},
                              {{2, 3}, BoundaryTag::Absorbing},
                              {{3, 0}, BoundaryTag::Absorbing}};
  std::vector<Triangle> good{{0, 1, 2}, {0, 2, 3}};
  CHECK_FALSE(find_mesh_defect(v, good, b).has_value());

  SUBCASE("clockwise triangle") {
    std::vector<Triangle> t{{0, 2, 1}, {0, 2, 3}};
    auto d = find_mesh_defect(v, t, b);
    REQUIRE(d.has_value());
    CHECK(d->triangle >= 0);
  }
  SUBCASE("repeated vertex") {
    std::vector<Triangle> t{{0, 1, 1}, {0, 2, 3}};
    CHECK(find_mesh_defect(v, t, b).has_value());
  }
  SUBCASE("vertex out of range") {
    std::vector<Triangle> t{{0, 1, 7}, {0, 2, 3}};
    CHECK(find_mesh_defect(v, t, b).has_value());
  }
  SUBCASE("untagged boundary edge") {
    std::vector<BoundaryEdge> partial(b.begin(), b.end() - 1);
    CHECK(find_mesh_defect(v, good, partial).has_value());
  }
  SUBCASE("tagged interior edge") {
    auto extra = b;
    extra.push_back({{0, 2}, BoundaryTag::Dirichlet});
    auto d = find_mesh_defect(v, good, extra);
    REQUIRE(d.has_value());
    CHECK(d->boundary_edge == 4);
  }
  SUBCASE("degenerate triangle") {
    std::vector<Point> w = v;
    w.push_back({0.5, 0.5});
    std::vector<Triangle> t{{0, 4, 2}, {0, 2, 3}, {0, 1, 2}};
    CHECK(find_mesh_defect(w, t, b).has_value());
  }
  CHECK_THROWS_AS(Mesh(v, {{0, 2, 1}, {0, 2, 3}}, b), MeshError);
}

TEST_CASE("mesh text round trip") {
  const Mesh mesh = parse_mesh(kTwoTriangles);
  CHECK(mesh.num_elements() == 2);
  CHECK(mesh.has_dirichlet_boundary());
  CHECK(mesh.is_dirichlet_vertex(3));
  CHECK(mesh.is_dirichlet_vertex(0));
  CHECK_FALSE(mesh.is_dirichlet_vertex(1));
  CHECK(parse_mesh(format_mesh(mesh)) == mesh);
  const Mesh grid = build_cartesian_mesh(3);
  CHECK(parse_mesh(format_mesh(grid)) == grid);
}

TEST_CASE("parse errors carry line numbers") {
  auto message = [](const std::string& text) {
    try {
      parse_mesh(text);
    } catch (const MeshError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("4 2 4\n0 0\n1 0\n1 x\n").rfind("line 4", 0) == 0);
  CHECK(message("4 2 4\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 2 9\n").rfind("line 7", 0) == 0);
  CHECK(message("4 2 4\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 2 3\n0 1 A\n1 2 A\n2 3 Q\n").rfind("line 10", 0) ==
        0);
  CHECK(message("4 2 4\n0 0\n1 0\n1 1\n0 1\n0 2 1\n0 2 3\n0 1 A\n1 2 A\n2 3 A\n3 0 A\n")
            .rfind("line 6", 0) == 0);
  CHECK(message("4 2\n").rfind("line 1", 0) == 0);
  CHECK_FALSE(message("4 2 4\n0 0\n1 0\n").empty());
  CHECK_THROWS_AS(load_mesh("/nonexistent/helm.mesh"), MeshError);
}

TEST_CASE("vertex patch classification") {
  const Mesh mesh = parse_mesh(kTwoTriangles);
  const VertexPatch corner = vertex_patch(mesh, 0);
  CHECK(corner.elements == std::vector<int>{0, 1});
  CHECK(corner.inner_edges.size() == 1);
  CHECK(corner.is_dirichlet_vertex);
  int sharing = 0;
  for (const PatchEdge& e : corner.boundary) {
    if (e.kind == PatchEdgeKind::DirichletSharing) ++sharing;
    CHECK(e.essential() == (e.kind != PatchEdgeKind::DirichletSharing));
  }
  CHECK(sharing == 1);

  const VertexPatch inner = vertex_patch(build_cartesian_mesh(4), 12);
  CHECK(inner.elements.size() == 6);
  CHECK(inner.inner_edges.size() == 6);
  CHECK(inner.boundary.size() == 6);
  for (const PatchEdge& e : inner.boundary) CHECK(e.kind == PatchEdgeKind::InteriorFacing);
}

TEST_CASE("scattering asset tags and obstacle corner") {
  const Mesh mesh = load_mesh(std::string(HELM_ASSET_DIR) + "/scattering.mesh");
  CHECK_FALSE(check_conformity(mesh).has_value());
  CHECK(total_area(mesh) == doctest::Approx(3.75));
  for (const BoundaryEdge& b : mesh.boundary_edges()) {
    const Point a = mesh.vertex(b.vertices[0]);
    const Point c = mesh.vertex(b.vertices[1]);
    const bool outer = std::max(std::abs(a.x()), std::abs(a.y())) == 1.0 &&
                       std::max(std::abs(c.x()), std::abs(c.y())) == 1.0;
    CHECK((b.tag == BoundaryTag::Absorbing) == outer);
  }
  int origin = -1;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.vertex(v).norm() < 1e-14) origin = v;
  }
  REQUIRE(origin >= 0);
  CHECK(mesh.is_dirichlet_vertex(origin));
  const VertexPatch patch = vertex_patch(mesh, origin);
  int sharing = 0;
  for (const PatchEdge& e : patch.boundary) {
    if (!e.essential()) {
      ++sharing;
      CHECK(e.kind == PatchEdgeKind::DirichletSharing);
    }
  }
  CHECK(sharing == 2);
}

TEST_CASE("refinement keeps the mesh conforming and shape regular") {
  std::mt19937 rng(11);
  Mesh mesh = build_cartesian_mesh(3);
  const double angle0 = min_angle(mesh);
  for (int pass = 0; pass < 8; ++pass) {
    std::vector<int> marked;
    std::bernoulli_distribution pick(0.2);
    for (int k = 0; k < mesh.num_elements(); ++k) {
      if (pick(rng)) marked.push_back(k);
    }
    if (marked.empty()) marked.push_back(0);
    const Mesh next = refine(mesh, marked);
    CHECK(next.num_elements() >= mesh.num_elements() + static_cast<int>(marked.size()));
    CHECK_FALSE(check_conformity(next).has_value());
    CHECK(total_area(next) == doctest::Approx(total_area(mesh)).epsilon(1e-13));
    CHECK(next.boundary_edges().size() >= mesh.boundary_edges().size());
    for (int k = 0; k < next.num_elements(); ++k) {
      const int parent = next.parent()[k];
      REQUIRE(parent >= 0);
      REQUIRE(parent < mesh.num_elements());
      CHECK(element_geometry(next, k).area <= element_geometry(mesh, parent).area * (1 + 1e-12));
    }
    mesh = next;
  }
  CHECK(min_angle(mesh) >= angle0 / 2.0 - 1e-12);
}

TEST_CASE("bisection halves an element and preserves boundary tags") {
  const Mesh mesh = parse_mesh(kTwoTriangles);
  const int marked[] = {0};
  const Mesh fine = refine(mesh, marked);
  CHECK(fine.num_elements() == 4);
  int dirichlet = 0;
  for (const BoundaryEdge& b : fine.boundary_edges()) dirichlet += b.tag == BoundaryTag::Dirichlet;
  CHECK(dirichlet == 2);
  std::vector<int> parents = fine.parent();
  std::sort(parents.begin(), parents.end());
  CHECK(parents == std::vector<int>{0, 0, 1, 1});
  const int bad[] = {5};
  CHECK_THROWS_AS(refine(mesh, bad), MeshError);
  CHECK(refine(mesh, {}) == mesh);
}
