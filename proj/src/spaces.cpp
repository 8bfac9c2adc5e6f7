// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#include "helm/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "helm/quadrature.hpp"

namespace helm {
namespace {

const std::array<Point, 3> kRefVertices = {Point(0, 0), Point(1, 0), Point(0, 1)};

// Silvester factor prod_{j<n} (p*l - j)/(j+1) and its derivative in l.
void silvester(int n, int p, double l, double& value, double& derivative) {
  value = 1.0;
  derivative = 0.0;
  for (int j = 0; j < n; ++j) {
    const double factor = (p * l - j) / (j + 1);
    derivative = derivative * factor + value * p / (j + 1);
    value *= factor;
  }
}

template <class Key, class Value, class Make>
const Value& cached(std::map<Key, std::unique_ptr<Value>>& cache, std::mutex& mutex, const Key& key,
                    Make make) {
  std::lock_guard lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<Value>(make())).first;
  return *it->second;
}

}  // namespace

int lagrange_dim(int p) { return (p + 1) * (p + 2) / 2; }
int rt_dim(int q) { return (q + 1) * (q + 3); }

LagrangeElement::LagrangeElement(int p) : p_(p) {
  if (p < 0 || p > kMaxLagrangeDegree) {
    throw ConfigError("unsupported Lagrange degree " + std::to_string(p));
  }
  if (p == 0) {
    index_.push_back({0, 0, 0});
    nodes_.emplace_back(1.0 / 3.0, 1.0 / 3.0);
    return;
  }
  for (int i = 0; i < 3; ++i) {
    std::array<int, 3> a{0, 0, 0};
    a[i] = p;
    index_.push_back(a);
  }
  for (int e = 0; e < 3; ++e) {
    for (int j = 1; j < p; ++j) {
      std::array<int, 3> a{0, 0, 0};
      a[(e + 1) % 3] = p - j;
      a[(e + 2) % 3] = j;
      index_.push_back(a);
    }
  }
  for (int a1 = 1; a1 < p; ++a1) {
    for (int a2 = 1; a1 + a2 < p; ++a2) index_.push_back({p - a1 - a2, a1, a2});
  }
  for (const auto& a : index_) nodes_.emplace_back(double(a[1]) / p, double(a[2]) / p);
}

void LagrangeElement::evaluate(const Point& xhat, Eigen::VectorXd& values,
                               Eigen::MatrixX2d& gradients) const {
  const int n = size();
  values.resize(n);
  gradients.resize(n, 2);
  if (p_ == 0) {
    values(0) = 1.0;
    gradients.setZero();
    return;
  }
  const std::array<double, 3> l = {1.0 - xhat.x() - xhat.y(), xhat.x(), xhat.y()};
  std::array<std::array<double, kMaxLagrangeDegree + 1>, 3> s{};
  std::array<std::array<double, kMaxLagrangeDegree + 1>, 3> ds{};
  for (int i = 0; i < 3; ++i) {
    for (int m = 0; m <= p_; ++m) silvester(m, p_, l[i], s[i][m], ds[i][m]);
  }
  for (int b = 0; b < n; ++b) {
    const auto& a = index_[b];
    const double f0 = s[0][a[0]], f1 = s[1][a[1]], f2 = s[2][a[2]];
    values(b) = f0 * f1 * f2;
    const double d0 = ds[0][a[0]] * f1 * f2;
    gradients(b, 0) = ds[1][a[1]] * f0 * f2 - d0;
    gradients(b, 1) = ds[2][a[2]] * f0 * f1 - d0;
  }
}

Eigen::VectorXd LagrangeElement::values(const Point& xhat) const {
  Eigen::VectorXd v;
  Eigen::MatrixX2d g;
  evaluate(xhat, v, g);
  return v;
}

const LagrangeElement& lagrange_element(int p) {
  static std::map<int, std::unique_ptr<LagrangeElement>> cache;
  static std::mutex mutex;
  return cached(cache, mutex, p, [p] { return LagrangeElement(p); });
}

namespace {

LagrangeTable tabulate(const LagrangeElement& el, const std::vector<Point>& points) {
  LagrangeTable t;
  const int nq = static_cast<int>(points.size());
  t.values.resize(nq, el.size());
  t.dx.resize(nq, el.size());
  t.dy.resize(nq, el.size());
  Eigen::VectorXd v;
  Eigen::MatrixX2d g;
  for (int i = 0; i < nq; ++i) {
    el.evaluate(points[i], v, g);
    t.values.row(i) = v.transpose();
    t.dx.row(i) = g.col(0).transpose();
    t.dy.row(i) = g.col(1).transpose();
  }
  return t;
}

}  // namespace

const LagrangeTable& lagrange_table(int p, int quad_degree) {
  static std::map<std::pair<int, int>, std::unique_ptr<LagrangeTable>> cache;
  static std::mutex mutex;
  return cached(cache, mutex, std::pair{p, quad_degree}, [&] {
    return tabulate(lagrange_element(p), triangle_rule(quad_degree).points);
  });
}

Point reference_edge_point(int local_edge, double t) {
  const Point& a = kRefVertices[(local_edge + 1) % 3];
  const Point& b = kRefVertices[(local_edge + 2) % 3];
  return a + t * (b - a);
}

const LagrangeTable& lagrange_edge_table(int p, int quad_degree, int local_edge) {
  static std::map<std::tuple<int, int, int>, std::unique_ptr<LagrangeTable>> cache;
  static std::mutex mutex;
  return cached(cache, mutex, std::tuple{p, quad_degree, local_edge}, [&] {
    std::vector<Point> points;
    for (double t : edge_rule(quad_degree).points) {
      points.push_back(reference_edge_point(local_edge, t));
    }
    return tabulate(lagrange_element(p), points);
  });
}

Eigen::VectorXd legendre(int n, double t) {
  Eigen::VectorXd l(n + 1);
  const double x = 2.0 * t - 1.0;
  l(0) = 1.0;
  if (n >= 1) l(1) = x;
  for (int j = 2; j <= n; ++j) l(j) = ((2 * j - 1) * x * l(j - 1) - (j - 1) * l(j - 2)) / j;
  return l;
}

Eigen::VectorXd lagrange_1d(int n, double t) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n + 1);
  if (n == 0) return v;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      if (j != i) v(i) *= (t - double(j) / n) / (double(i - j) / n);
    }
  }
  return v;
}

// Spanning set: kind 0 (m,0), kind 1 (0,m), kind 2 (X m, Y m) with m the
// centered monomial X^a Y^b, X = x - 1/3, Y = y - 1/3.
RtElement::RtElement(int q) : q_(q), n_(rt_dim(q)) {
  if (q < 0 || q > kMaxRtDegree) {
    throw ConfigError("unsupported Raviart-Thomas degree " + std::to_string(q));
  }
  for (int d = 0; d <= q; ++d) {
    for (int b = 0; b <= d; ++b) {
      terms_.push_back({0, d - b, b});
      terms_.push_back({1, d - b, b});
    }
  }
  for (int b = 0; b <= q; ++b) terms_.push_back({2, q - b, b});

  Eigen::MatrixXd dofs(n_, n_);
  Eigen::MatrixX2d values;
  Eigen::VectorXd div;
  const EdgeRule& er = edge_rule(2 * q + 2);
  for (int e = 0; e < 3; ++e) {
    const Point tangent = kRefVertices[(e + 2) % 3] - kRefVertices[(e + 1) % 3];
    const Point scaled_normal(tangent.y(), -tangent.x());
    for (int j = 0; j <= q; ++j) dofs.row(edge_dof(e, j)).setZero();
    for (std::size_t i = 0; i < er.points.size(); ++i) {
      span(reference_edge_point(e, er.points[i]), values, div);
      const Eigen::VectorXd flux = values * scaled_normal;
      const Eigen::VectorXd leg = legendre(q, er.points[i]);
      for (int j = 0; j <= q; ++j) {
        dofs.row(edge_dof(e, j)) += er.weights[i] * leg(j) * flux.transpose();
      }
    }
  }
  const TriangleRule& tr = triangle_rule(2 * q);
  int row = 3 * (q + 1);
  for (int d = 0; d < q; ++d) {
    for (int b = 0; b <= d; ++b) {
      const int a = d - b;
      dofs.row(row).setZero();
      dofs.row(row + 1).setZero();
      for (std::size_t i = 0; i < tr.points.size(); ++i) {
        const Point& x = tr.points[i];
        span(x, values, div);
        const double m = std::pow(x.x() - 1.0 / 3.0, a) * std::pow(x.y() - 1.0 / 3.0, b);
        dofs.row(row) += tr.weights[i] * m * values.col(0).transpose();
        dofs.row(row + 1) += tr.weights[i] * m * values.col(1).transpose();
      }
      row += 2;
    }
  }
  coefficients_ = dofs.fullPivLu().inverse();
}

void RtElement::span(const Point& xhat, Eigen::MatrixX2d& values, Eigen::VectorXd& divergence) const {
  const double x = xhat.x() - 1.0 / 3.0;
  const double y = xhat.y() - 1.0 / 3.0;
  std::array<double, kMaxRtDegree + 2> px{}, py{};
  px[0] = py[0] = 1.0;
  for (int i = 1; i <= q_ + 1; ++i) {
    px[i] = px[i - 1] * x;
    py[i] = py[i - 1] * y;
  }
  values.resize(n_, 2);
  divergence.resize(n_);
  for (int k = 0; k < n_; ++k) {
    const auto [kind, a, b] = terms_[k];
    const double m = px[a] * py[b];
    switch (kind) {
      case 0:
        values(k, 0) = m;
        values(k, 1) = 0.0;
        divergence(k) = a > 0 ? a * px[a - 1] * py[b] : 0.0;
        break;
      case 1:
        values(k, 0) = 0.0;
        values(k, 1) = m;
        divergence(k) = b > 0 ? b * px[a] * py[b - 1] : 0.0;
        break;
      default:
        values(k, 0) = x * m;
        values(k, 1) = y * m;
        divergence(k) = (q_ + 2) * m;
        break;
    }
  }
}

void RtElement::evaluate(const Point& xhat, Eigen::MatrixX2d& values,
                         Eigen::VectorXd& divergence) const {
  Eigen::MatrixX2d s;
  Eigen::VectorXd sd;
  span(xhat, s, sd);
  values.noalias() = coefficients_.transpose() * s;
  divergence.noalias() = coefficients_.transpose() * sd;
}

const RtElement& rt_element(int q) {
  static std::map<int, std::unique_ptr<RtElement>> cache;
  static std::mutex mutex;
  return cached(cache, mutex, q, [q] { return RtElement(q); });
}

const RtTable& rt_table(int q, int quad_degree) {
  static std::map<std::pair<int, int>, std::unique_ptr<RtTable>> cache;
  static std::mutex mutex;
  return cached(cache, mutex, std::pair{q, quad_degree}, [&] {
    const RtElement& el = rt_element(q);
    const TriangleRule& rule = triangle_rule(quad_degree);
    const int nq = static_cast<int>(rule.points.size());
    RtTable t;
    t.vx.resize(nq, el.size());
    t.vy.resize(nq, el.size());
    t.div.resize(nq, el.size());
    Eigen::MatrixX2d v;
    Eigen::VectorXd d;
    for (int i = 0; i < nq; ++i) {
      el.evaluate(rule.points[i], v, d);
      t.vx.row(i) = v.col(0).transpose();
      t.vy.row(i) = v.col(1).transpose();
      t.div.row(i) = d.transpose();
    }
    return t;
  });
}

double rt_edge_sign(const Triangle& t, int local_edge, int j) {
  if (t[(local_edge + 1) % 3] < t[(local_edge + 2) % 3]) return 1.0;
  return (j % 2 == 0) ? -1.0 : 1.0;
}

std::array<Point, 3> barycentric_gradients(const AffineMap& map) {
  const Point g1 = map.inverse_transpose.col(0);
  const Point g2 = map.inverse_transpose.col(1);
  return {-(g1 + g2), g1, g2};
}

Point reference_coordinates(const AffineMap& map, const Point& x) {
  return map.inverse_transpose.transpose() * (x - map.origin);
}

HatValue hat_function(const Mesh& mesh, int vertex, const Point& x) {
  if (vertex < 0 || vertex >= mesh.num_vertices()) throw MeshError("vertex index out of range");
  constexpr double tol = 1e-12;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const AffineMap map = affine_map(mesh, k);
    const Point xi = reference_coordinates(map, x);
    const std::array<double, 3> l = {1.0 - xi.x() - xi.y(), xi.x(), xi.y()};
    if (l[0] < -tol || l[1] < -tol || l[2] < -tol) continue;
    const Triangle& t = mesh.triangle(k);
    for (int i = 0; i < 3; ++i) {
      if (t[i] == vertex) {
        return {std::clamp(l[i], 0.0, 1.0), barycentric_gradients(map)[i]};
      }
    }
    return {0.0, Point::Zero()};
  }
  throw MeshError("point outside the mesh");
}

LagrangeSpace::LagrangeSpace(std::shared_ptr<const Mesh> mesh, int degree)
    : mesh_(std::move(mesh)), p_(degree), nb_(lagrange_dim(degree)) {
  if (degree < 1 || degree > kMaxLagrangeDegree) {
    throw ConfigError("unsupported Lagrange space degree " + std::to_string(degree));
  }
  const Mesh& m = *mesh_;
  const int nv = m.num_vertices();
  const int ne = m.num_edges();
  const int nt = m.num_elements();
  const int per_edge = p_ - 1;
  const int per_cell = (p_ - 1) * (p_ - 2) / 2;
  num_dofs_ = nv + ne * per_edge + nt * per_cell;

  const LagrangeElement& el = lagrange_element(p_);
  element_dofs_.resize(static_cast<std::size_t>(nt) * nb_);
  coordinates_.resize(num_dofs_);
  for (int k = 0; k < nt; ++k) {
    const Triangle& t = m.triangle(k);
    int* dofs = element_dofs_.data() + static_cast<std::size_t>(k) * nb_;
    int local = 0;
    for (int i = 0; i < 3; ++i) dofs[local++] = t[i];
    for (int e = 0; e < 3; ++e) {
      const int ge = m.element_edge(k, e);
      const bool forward = t[(e + 1) % 3] < t[(e + 2) % 3];
      for (int j = 1; j < p_; ++j) {
        const int g = forward ? j : p_ - j;
        dofs[local++] = nv + ge * per_edge + (g - 1);
      }
    }
    for (int i = 0; i < per_cell; ++i) dofs[local++] = nv + ne * per_edge + k * per_cell + i;
    const AffineMap map = affine_map(m, k);
    for (int i = 0; i < nb_; ++i) coordinates_[dofs[i]] = map.map(el.nodes()[i]);
  }

  free_index_.assign(num_dofs_, 0);
  for (int v = 0; v < nv; ++v) {
    if (m.is_dirichlet_vertex(v)) free_index_[v] = -1;
  }
  for (int e = 0; e < ne; ++e) {
    const auto tag = m.edge_tag(e);
    if (tag && *tag == BoundaryTag::Dirichlet) {
      for (int j = 0; j < per_edge; ++j) free_index_[nv + e * per_edge + j] = -1;
    }
  }
  for (int d = 0; d < num_dofs_; ++d) {
    if (free_index_[d] < 0) {
      dirichlet_.push_back(d);
    } else {
      free_index_[d] = num_free_++;
    }
  }
}

Eigen::VectorXcd DiscreteField::local(int k) const {
  const auto dofs = space->element_dofs(k);
  Eigen::VectorXcd c(dofs.size());
  for (std::size_t i = 0; i < dofs.size(); ++i) c(i) = coefficients(dofs[i]);
  return c;
}

}  // namespace helm
