// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HELM_SPACES_HPP
#define HELM_SPACES_HPP

#include <array>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "helm/mesh.hpp"

namespace helm {

inline constexpr int kMaxLagrangeDegree = 7;
inline constexpr int kMaxRtDegree = 7;

int lagrange_dim(int p);
int rt_dim(int q);

/// Nodal P_p basis on the reference triangle.
///
/// Nodes are ordered vertices, then the p-1 nodes of each local edge i
/// (from vertex i+1 towards vertex i+2), then interior nodes.
class LagrangeElement {
 public:
  explicit LagrangeElement(int p);

  int degree() const { return p_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Point>& nodes() const { return nodes_; }

  /// Values and reference gradients (columns d/dx, d/dy) at `xhat`.
  void evaluate(const Point& xhat, Eigen::VectorXd& values, Eigen::MatrixX2d& gradients) const;
  Eigen::VectorXd values(const Point& xhat) const;

 private:
  int p_;
  std::vector<std::array<int, 3>> index_;
  std::vector<Point> nodes_;
};

const LagrangeElement& lagrange_element(int p);

/// Basis values at the points of a quadrature rule: rows are points.
struct LagrangeTable {
  Eigen::MatrixXd values;
  Eigen::MatrixXd dx;
  Eigen::MatrixXd dy;
};

const LagrangeTable& lagrange_table(int p, int quad_degree);
/// Same, at the edge-rule points of local edge `local_edge` (parametrized
/// from vertex local_edge+1 towards vertex local_edge+2).
const LagrangeTable& lagrange_edge_table(int p, int quad_degree, int local_edge);

/// Reference point of parameter t on local edge `local_edge`.
Point reference_edge_point(int local_edge, double t);

/// Shifted Legendre polynomials L_0..L_n on [0,1].
Eigen::VectorXd legendre(int n, double t);
/// Equispaced 1D nodal basis of degree n on [0,1] (nodes j/n).
Eigen::VectorXd lagrange_1d(int n, double t);

/// Raviart-Thomas RT_q = [P_q]^2 + x P_q on the reference triangle.
///
/// Degrees of freedom: for each local edge i, the moments
/// int_e (phi . n) L_j ds, j = 0..q, with the edge parametrized as for
/// Lagrange nodes and n the outward normal; then interior moments against
/// [P_{q-1}]^2. The basis is dual to these functionals.
class RtElement {
 public:
  explicit RtElement(int q);

  int degree() const { return q_; }
  int size() const { return n_; }
  int edge_dof(int local_edge, int j) const { return local_edge * (q_ + 1) + j; }

  /// Reference values (rows = basis functions) and divergences at `xhat`.
  void evaluate(const Point& xhat, Eigen::MatrixX2d& values, Eigen::VectorXd& divergence) const;

 private:
  void span(const Point& xhat, Eigen::MatrixX2d& values, Eigen::VectorXd& divergence) const;

  int q_;
  int n_;
  std::vector<std::array<int, 3>> terms_;  // (kind, a, b)
  Eigen::MatrixXd coefficients_;            // basis j = sum_k C(k,j) span_k
};

const RtElement& rt_element(int q);

struct RtTable {
  Eigen::MatrixXd vx;
  Eigen::MatrixXd vy;
  Eigen::MatrixXd div;
};

const RtTable& rt_table(int q, int quad_degree);

/// Sign relating local edge moment j of an element to the moment taken
/// along the global edge orientation (lower vertex index first, normal to
/// the right of that direction).
double rt_edge_sign(const Triangle& t, int local_edge, int j);

std::array<Point, 3> barycentric_gradients(const AffineMap& map);

struct HatValue {
  double value;
  Point gradient;
};

/// Hat function of `vertex` at a physical point; throws MeshError when the
/// point lies outside the mesh.
HatValue hat_function(const Mesh& mesh, int vertex, const Point& x);

/// Reference coordinates of `x` in `element`.
Point reference_coordinates(const AffineMap& map, const Point& x);

/// Continuous P_p space with homogeneous Dirichlet conditions on Gamma_D.
///
/// Global numbering: vertices, then p-1 dofs per edge ordered from the
/// lower to the higher vertex index, then interior dofs element by element.
class LagrangeSpace {
 public:
  LagrangeSpace(std::shared_ptr<const Mesh> mesh, int degree);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  int degree() const { return p_; }
  int num_dofs() const { return num_dofs_; }
  int dofs_per_element() const { return nb_; }
  std::span<const int> element_dofs(int k) const {
    return {element_dofs_.data() + static_cast<std::size_t>(k) * nb_, static_cast<std::size_t>(nb_)};
  }
  const std::vector<Point>& dof_coordinates() const { return coordinates_; }

  bool is_dirichlet(int dof) const { return free_index_[dof] < 0; }
  const std::vector<int>& dirichlet_dofs() const { return dirichlet_; }
  int num_free_dofs() const { return num_free_; }
  /// Index among unconstrained dofs, -1 for Dirichlet dofs.
  int free_index(int dof) const { return free_index_[dof]; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  int p_;
  int nb_;
  int num_dofs_ = 0;
  int num_free_ = 0;
  std::vector<int> element_dofs_;
  std::vector<Point> coordinates_;
  std::vector<int> free_index_;
  std::vector<int> dirichlet_;
};

/// Complex coefficient vector over a LagrangeSpace.
struct DiscreteField {
  std::shared_ptr<const LagrangeSpace> space;
  Eigen::VectorXcd coefficients;

  /// Element-local coefficients in LagrangeElement node order.
  Eigen::VectorXcd local(int k) const;
};

}  // namespace helm

#endif  // HELM_SPACES_HPP
