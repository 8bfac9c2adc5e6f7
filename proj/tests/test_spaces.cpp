// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "helm/quadrature.hpp"
#include "helm/solver.hpp"

using namespace helm;

namespace {

const Point kVertices[3] = {Point(0, 0), Point(1, 0), Point(0, 1)};

// Reference edge i runs from vertex i+1 to vertex i+2; the returned vector
// is n ds / dt for the outward normal n.
Point scaled_normal(int i) {
  const Point t = kVertices[(i + 2) % 3] - kVertices[(i + 1) % 3];
  return Point(t.y(), -t.x());
}

}  // namespace

TEST_CASE("dimensions") {
  CHECK(lagrange_dim(1) == 3);
  CHECK(lagrange_dim(4) == 15);
  CHECK(rt_dim(0) == 3);
  CHECK(rt_dim(2) == 15);
}

TEST_CASE("Lagrange basis is nodal and sums to one") {
  for (int p = 1; p <= 7; ++p) {
    const LagrangeElement& el = lagrange_element(p);
    REQUIRE(el.size() == lagrange_dim(p));
    for (int j = 0; j < el.size(); ++j) {
      const Eigen::VectorXd v = el.values(el.nodes()[j]);
      for (int i = 0; i < el.size(); ++i) CHECK(v(i) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
    }
    Eigen::VectorXd values;
    Eigen::MatrixX2d grads;
    el.evaluate(Point(0.21, 0.37), values, grads);
    CHECK(values.sum() == doctest::Approx(1.0));
    CHECK(std::abs(grads.col(0).sum()) < 1e-10);
    CHECK(std::abs(grads.col(1).sum()) < 1e-10);
  }
}

TEST_CASE("Lagrange gradients match finite differences") {
  const double eps = 1e-6;
  for (int p = 1; p <= 6; ++p) {
    const LagrangeElement& el = lagrange_element(p);
    const Point x(0.3, 0.25);
    Eigen::VectorXd values;
    Eigen::MatrixX2d grads;
    el.evaluate(x, values, grads);
    const Eigen::VectorXd dx = (el.values(x + Point(eps, 0)) - el.values(x - Point(eps, 0))) / (2 * eps);
    const Eigen::VectorXd dy = (el.values(x + Point(0, eps)) - el.values(x - Point(0, eps))) / (2 * eps);
    CHECK((dx - grads.col(0)).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((dy - grads.col(1)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("Raviart-Thomas basis is dual to the edge moments") {
  for (int q = 0; q <= 4; ++q) {
    const RtElement& rt = rt_element(q);
    REQUIRE(rt.size() == rt_dim(q));
    const EdgeRule& rule = edge_rule(2 * q + 2);
    for (int i = 0; i < 3; ++i) {
      Eigen::MatrixXd moments = Eigen::MatrixXd::Zero(q + 1, rt.size());
      for (std::size_t g = 0; g < rule.points.size(); ++g) {
        const double t = rule.points[g];
        const Point x = kVertices[(i + 1) % 3] + t * (kVertices[(i + 2) % 3] - kVertices[(i + 1) % 3]);
        Eigen::MatrixX2d values;
        Eigen::VectorXd div;
        rt.evaluate(x, values, div);
        const Eigen::VectorXd flux = values * scaled_normal(i);
        moments += rule.weights[g] * legendre(q, t) * flux.transpose();
      }
      for (int j = 0; j <= q; ++j) {
        for (int m = 0; m < rt.size(); ++m) {
          INFO("q " << q << " edge " << i << " moment " << j << " basis " << m);
          CHECK(moments(j, m) == doctest::Approx(m == rt.edge_dof(i, j) ? 1.0 : 0.0).epsilon(1e-10));
        }
      }
    }
  }
}

TEST_CASE("Raviart-Thomas divergence matches finite differences and the divergence theorem") {
  const double eps = 1e-6;
  for (int q = 0; q <= 4; ++q) {
    const RtElement& rt = rt_element(q);
    Eigen::MatrixX2d v, vxp, vxm, vyp, vym;
    Eigen::VectorXd div, tmp;
    const Point x(0.2, 0.45);
    rt.evaluate(x, v, div);
    rt.evaluate(x + Point(eps, 0), vxp, tmp);
    rt.evaluate(x - Point(eps, 0), vxm, tmp);
    rt.evaluate(x + Point(0, eps), vyp, tmp);
    rt.evaluate(x - Point(0, eps), vym, tmp);
    const Eigen::VectorXd fd = (vxp.col(0) - vxm.col(0) + vyp.col(1) - vym.col(1)) / (2 * eps);
    CHECK((fd - div).cwiseAbs().maxCoeff() < 1e-5);

    const TriangleRule& tri = triangle_rule(q);
    Eigen::VectorXd volume = Eigen::VectorXd::Zero(rt.size());
    for (std::size_t g = 0; g < tri.points.size(); ++g) {
      rt.evaluate(tri.points[g], v, div);
      volume += tri.weights[g] * div;
    }
    Eigen::VectorXd expected = Eigen::VectorXd::Zero(rt.size());
    for (int i = 0; i < 3; ++i) expected(rt.edge_dof(i, 0)) = 1.0;
    CHECK((volume - expected).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("tables agree with direct evaluation") {
  const TriangleRule& rule = triangle_rule(5);
  const LagrangeTable& lt = lagrange_table(3, 5);
  const RtTable& rtt = rt_table(2, 5);
  for (std::size_t g = 0; g < rule.points.size(); ++g) {
    const Eigen::VectorXd v = lagrange_element(3).values(rule.points[g]);
    CHECK((lt.values.row(g).transpose() - v).cwiseAbs().maxCoeff() < 1e-14);
    Eigen::MatrixX2d rv;
    Eigen::VectorXd div;
    rt_element(2).evaluate(rule.points[g], rv, div);
    CHECK((rtt.vx.row(g).transpose() - rv.col(0)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((rtt.div.row(g).transpose() - div).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("edge signs follow the global orientation") {
  const Triangle forward{0, 1, 2};
  CHECK(rt_edge_sign(forward, 0, 0) == 1.0);
  CHECK(rt_edge_sign(forward, 0, 1) == 1.0);
  const Triangle backward{0, 2, 1};
  CHECK(rt_edge_sign(backward, 0, 0) == -1.0);
  CHECK(rt_edge_sign(backward, 0, 1) == 1.0);
  CHECK(rt_edge_sign(backward, 0, 2) == -1.0);
}

TEST_CASE("hat functions form a partition of unity") {
  const Mesh mesh = build_cartesian_mesh(4);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Point x(c(rng), c(rng));
    double sum = 0.0;
    Point grad = Point::Zero();
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      const HatValue h = hat_function(mesh, v, x);
      sum += h.value;
      grad += h.gradient;
    }
    CHECK(sum == doctest::Approx(1.0));
    CHECK(grad.norm() < 1e-10);
  }
  CHECK_THROWS_AS(hat_function(mesh, 0, Point(3.0, 0.0)), MeshError);
}

TEST_CASE("Lagrange space numbering") {
  for (int p = 1; p <= 4; ++p) {
    const int n = 3;
    auto open = std::make_shared<const Mesh>(build_cartesian_mesh(n));
    const LagrangeSpace space(open, p);
    CHECK(space.num_dofs() == (n * p + 1) * (n * p + 1));
    CHECK(space.num_free_dofs() == space.num_dofs());
    auto closed = std::make_shared<const Mesh>(
        build_cartesian_mesh(n, Point(-1, -1), Point(1, 1), BoundaryTag::Dirichlet));
    const LagrangeSpace sealed(closed, p);
    CHECK(sealed.dirichlet_dofs().size() == static_cast<std::size_t>(4 * n * p));
    CHECK(sealed.num_free_dofs() == (n * p - 1) * (n * p - 1));
    for (int d = 0; d < sealed.num_dofs(); ++d) {
      const Point& x = sealed.dof_coordinates()[d];
      const bool on_boundary = std::abs(std::abs(x.x()) - 1.0) < 1e-12 || std::abs(std::abs(x.y()) - 1.0) < 1e-12;
      CHECK(sealed.is_dirichlet(d) == on_boundary);
    }
  }
  CHECK_THROWS_AS(LagrangeSpace(std::make_shared<const Mesh>(build_cartesian_mesh(1)), 0), ConfigError);
}

TEST_CASE("interpolation reproduces polynomials of the space degree") {
  auto mesh = std::make_shared<const Mesh>(build_cartesian_mesh(2));
  for (int p = 1; p <= 5; ++p) {
    auto space = std::make_shared<const LagrangeSpace>(mesh, p);
    AnalyticField u;
    u.value = [p](const Point& x) { return Complex(std::pow(x.x(), p - 1) * x.y() + 0.5, std::pow(x.y(), p)); };
    u.gradient = [](const Point&) { return Vector2c::Zero().eval(); };
    const DiscreteField f = interpolate(u, space);
    const LagrangeElement& el = lagrange_element(p);
    for (int k = 0; k < mesh->num_elements(); ++k) {
      const AffineMap map = affine_map(*mesh, k);
      const Point xhat(0.17, 0.41);
      const Eigen::VectorXd phi = el.values(xhat);
      const Complex value = phi.dot(f.local(k));
      const Complex expected = u.value(map.map(xhat));
      CHECK(std::abs(value - expected) < 1e-12);
    }
  }
}
