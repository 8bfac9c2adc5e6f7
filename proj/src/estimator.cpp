// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#include "helm/estimator.hpp"

#include <cmath>
#include <numeric>

#include "helm/quadrature.hpp"

namespace helm {
namespace {

Vector2c physical_gradient(const AffineMap& map, Complex gx, Complex gy) {
  return map.inverse_transpose.cast<Complex>() * Vector2c(gx, gy);
}

// Calls visit(K, x, w, edge_term) for volume quadrature points of every
// element and then for Gamma_A edge points (edge_term = true).
template <class Visit>
void for_each_point(const Mesh& mesh, int degree, Visit visit) {
  const TriangleRule& rule = triangle_rule(degree);
  for (int K = 0; K < mesh.num_elements(); ++K) {
    const AffineMap map = affine_map(mesh, K);
    for (std::size_t i = 0; i < rule.points.size(); ++i) {
      visit(K, map, rule.points[i], rule.weights[i] * map.det, false);
    }
  }
  const EdgeRule& er = edge_rule(degree);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto tag = mesh.edge_tag(e);
    if (!tag || *tag != BoundaryTag::Absorbing) continue;
    const int K = mesh.edge_elements(e)[0];
    int le = 0;
    while (mesh.element_edge(K, le) != e) ++le;
    const AffineMap map = affine_map(mesh, K);
    const Triangle& t = mesh.triangle(K);
    const double len = (mesh.vertex(t[(le + 2) % 3]) - mesh.vertex(t[(le + 1) % 3])).norm();
    for (std::size_t i = 0; i < er.points.size(); ++i) {
      visit(K, map, reference_edge_point(le, er.points[i]), er.weights[i] * len, true);
    }
  }
}

}  // namespace

double eta_local(const FluxField& flux, const DiscreteField& u_h, int element) {
  const int p = u_h.space->degree();
  const int degree = 2 * flux.degree + 2;
  const TriangleRule& rule = triangle_rule(degree);
  const RtTable& rt = rt_table(flux.degree, degree);
  const LagrangeTable& lt = lagrange_table(p, degree);
  const AffineMap map = affine_map(*flux.mesh, element);
  const Eigen::VectorXcd& c = flux.coefficients[element];
  const Eigen::VectorXcd u = u_h.local(element);
  const Eigen::VectorXcd sx = rt.vx.cast<Complex>() * c;
  const Eigen::VectorXcd sy = rt.vy.cast<Complex>() * c;
  const Eigen::VectorXcd gx = lt.dx.cast<Complex>() * u;
  const Eigen::VectorXcd gy = lt.dy.cast<Complex>() * u;
  const Eigen::Matrix2cd jac = map.jacobian.cast<Complex>() / map.det;
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.points.size(); ++i) {
    const Vector2c s = jac * Vector2c(sx(i), sy(i));
    const Vector2c g = physical_gradient(map, gx(i), gy(i));
    sum += rule.weights[i] * map.det * (s + g).squaredNorm();
  }
  return std::sqrt(sum);
}

std::vector<double> eta_all(const FluxField& flux, const DiscreteField& u_h) {
  std::vector<double> eta(flux.mesh->num_elements());
  for (int K = 0; K < flux.mesh->num_elements(); ++K) eta[K] = eta_local(flux, u_h, K);
  return eta;
}

double trace_constant(const Mesh& mesh, int element) {
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const auto tag = mesh.edge_tag(mesh.element_edge(element, i));
    if (tag && *tag == BoundaryTag::Absorbing) ++n;
  }
  const ElementGeometry g = element_geometry(mesh, element);
  const double ratio = g.h / g.rho;
  return std::sqrt(n * 3.0 / (4.0 * kPi) * (1.0 + 1.0 / kPi) * ratio * ratio);
}

double osc_local(const HelmholtzProblem& problem, const ProjectedData& data, int element) {
  const Mesh& mesh = *problem.mesh;
  const int p = data.degree;
  const int degree = problem.data_quad_degree();
  const ElementGeometry geo = element_geometry(mesh, element);
  const AffineMap map = affine_map(mesh, element);
  double f2 = 0.0;
  if (problem.f) {
    const TriangleRule& rule = triangle_rule(degree);
    const LagrangeTable& lt = lagrange_table(p, degree);
    const Eigen::VectorXcd proj = lt.values.cast<Complex>() * data.f[element];
    for (std::size_t i = 0; i < rule.points.size(); ++i) {
      f2 += rule.weights[i] * map.det * std::norm(problem.f(map.map(rule.points[i])) - proj(i));
    }
  }
  double g2 = 0.0;
  if (problem.g) {
    const EdgeRule& er = edge_rule(degree);
    for (int le = 0; le < 3; ++le) {
      const int e = mesh.element_edge(element, le);
      const auto tag = mesh.edge_tag(e);
      if (!tag || *tag != BoundaryTag::Absorbing) continue;
      const Point& a = mesh.vertex(mesh.edge(e)[0]);
      const Point& b = mesh.vertex(mesh.edge(e)[1]);
      const Point n = outward_normal(mesh, element, le);
      const double len = (b - a).norm();
      for (std::size_t i = 0; i < er.points.size(); ++i) {
        const double s = er.points[i];
        const Complex proj = lagrange_1d(p, s).cast<Complex>().dot(data.g[e]);
        g2 += er.weights[i] * len * std::norm(problem.g(a + s * (b - a), n) - proj);
      }
    }
  }
  const double hk = geo.h / kPi;
  return hk * std::sqrt(f2) + trace_constant(mesh, element) * std::sqrt(hk) * std::sqrt(g2);
}

std::vector<double> osc_all(const HelmholtzProblem& problem, const ProjectedData& data) {
  std::vector<double> osc(problem.mesh->num_elements());
  for (int K = 0; K < problem.mesh->num_elements(); ++K) osc[K] = osc_local(problem, data, K);
  return osc;
}

std::vector<double> energy_norm2_local(const AnalyticField& v, const Mesh& mesh, double k,
                                       int quad_degree) {
  std::vector<double> out(mesh.num_elements(), 0.0);
  for_each_point(mesh, quad_degree,
                 [&](int K, const AffineMap& map, const Point& xi, double w, bool edge) {
                   const Point x = map.map(xi);
                   const double v2 = std::norm(v.value(x));
                   out[K] += edge ? w * k * v2 : w * (k * k * v2 + v.gradient(x).squaredNorm());
                 });
  return out;
}

std::vector<double> energy_norm2_local(const DiscreteField& v, double k) {
  const Mesh& mesh = v.space->mesh();
  const int p = v.space->degree();
  const LagrangeElement& el = lagrange_element(p);
  std::vector<double> out(mesh.num_elements(), 0.0);
  Eigen::VectorXd vals;
  Eigen::MatrixX2d grads;
  for_each_point(mesh, 2 * p, [&](int K, const AffineMap& map, const Point& xi, double w, bool edge) {
    el.evaluate(xi, vals, grads);
    const Eigen::VectorXcd c = v.local(K);
    const double v2 = std::norm(vals.cast<Complex>().dot(c));
    if (edge) {
      out[K] += w * k * v2;
    } else {
      const Vector2c g = physical_gradient(map, grads.col(0).cast<Complex>().dot(c),
                                           grads.col(1).cast<Complex>().dot(c));
      out[K] += w * (k * k * v2 + g.squaredNorm());
    }
  });
  return out;
}

std::vector<double> energy_error2_local(const AnalyticField& u, const DiscreteField& u_h, double k,
                                        int quad_degree) {
  const Mesh& mesh = u_h.space->mesh();
  const LagrangeElement& el = lagrange_element(u_h.space->degree());
  std::vector<double> out(mesh.num_elements(), 0.0);
  Eigen::VectorXd vals;
  Eigen::MatrixX2d grads;
  for_each_point(mesh, quad_degree,
                 [&](int K, const AffineMap& map, const Point& xi, double w, bool edge) {
                   el.evaluate(xi, vals, grads);
                   const Eigen::VectorXcd c = u_h.local(K);
                   const Point x = map.map(xi);
                   const double d2 = std::norm(u.value(x) - vals.cast<Complex>().dot(c));
                   if (edge) {
                     out[K] += w * k * d2;
                   } else {
                     const Vector2c g = physical_gradient(map, grads.col(0).cast<Complex>().dot(c),
                                                          grads.col(1).cast<Complex>().dot(c));
                     out[K] += w * (k * k * d2 + (u.gradient(x) - g).squaredNorm());
                   }
                 });
  return out;
}

std::vector<double> energy_error2_local(const DiscreteField& reference, const DiscreteField& u_h,
                                        double k) {
  const Mesh& mesh = u_h.space->mesh();
  if (&reference.space->mesh() != &mesh && !(reference.space->mesh() == mesh)) {
    throw ConfigError("reference and discrete solution live on different meshes");
  }
  const int pr = reference.space->degree();
  const LagrangeElement& er = lagrange_element(pr);
  const LagrangeElement& eh = lagrange_element(u_h.space->degree());
  std::vector<double> out(mesh.num_elements(), 0.0);
  Eigen::VectorXd vr, vh;
  Eigen::MatrixX2d gr, gh;
  for_each_point(mesh, std::min(2 * pr, kMaxQuadratureDegree),
                 [&](int K, const AffineMap& map, const Point& xi, double w, bool edge) {
                   er.evaluate(xi, vr, gr);
                   eh.evaluate(xi, vh, gh);
                   const Eigen::VectorXcd cr = reference.local(K);
                   const Eigen::VectorXcd ch = u_h.local(K);
                   const double d2 =
                       std::norm(vr.cast<Complex>().dot(cr) - vh.cast<Complex>().dot(ch));
                   if (edge) {
                     out[K] += w * k * d2;
                   } else {
                     const Complex dx = gr.col(0).cast<Complex>().dot(cr) - gh.col(0).cast<Complex>().dot(ch);
                     const Complex dy = gr.col(1).cast<Complex>().dot(cr) - gh.col(1).cast<Complex>().dot(ch);
                     out[K] += w * (k * k * d2 + physical_gradient(map, dx, dy).squaredNorm());
                   }
                 });
  return out;
}

double sum_sqrt(const std::vector<double>& squares) {
  return std::sqrt(std::accumulate(squares.begin(), squares.end(), 0.0));
}

double root_sum_squares(const std::vector<double>& values) {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

double energy_norm(const AnalyticField& v, const Mesh& mesh, double k, int quad_degree) {
  return sum_sqrt(energy_norm2_local(v, mesh, k, quad_degree));
}

double energy_norm(const DiscreteField& v, double k) { return sum_sqrt(energy_norm2_local(v, k)); }

std::optional<double> EstimateReport::e_fem() const {
  if (!error) return std::nullopt;
  return 100.0 * *error / reference_norm;
}

std::optional<double> EstimateReport::e_ba() const {
  if (!ba_error) return std::nullopt;
  return 100.0 * *ba_error / reference_norm;
}

std::optional<double> EstimateReport::effectivity() const {
  if (!error || !(*error > 0.0)) return std::nullopt;
  return eta / *error;
}

std::optional<double> EstimateReport::guaranteed_effectivity() const {
  const auto eff = effectivity();
  if (!eff) return std::nullopt;
  return c_up * *eff;
}

}  // namespace helm
