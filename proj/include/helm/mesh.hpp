// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HELM_MESH_HPP
#define HELM_MESH_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "helm/common.hpp"

namespace helm {

enum class BoundaryTag : std::uint8_t { Dirichlet, Absorbing };

struct BoundaryEdge {
  std::array<int, 2> vertices;
  BoundaryTag tag;

  bool operator==(const BoundaryEdge&) const = default;
};

using Triangle = std::array<int, 3>;

/// Describes the first invariant violation found in raw mesh data.
/// `triangle` / `boundary_edge` point at the offending record when one exists.
struct MeshDefect {
  std::string message;
  int triangle = -1;
  int boundary_edge = -1;
};

std::optional<MeshDefect> find_mesh_defect(std::span<const Point> vertices,
                                           std::span<const Triangle> triangles,
                                           std::span<const BoundaryEdge> boundary);

/// Conforming, positively oriented triangulation with a tagged boundary.
///
/// Local edge `i` of a triangle is the edge opposite its local vertex `i`,
/// running from vertex `i+1` to vertex `i+2` (indices mod 3). Global edges
/// are stored with the lower vertex index first; that ordering fixes the
/// reference orientation used by every edge-based degree of freedom.
///
/// A Mesh is immutable once built; `refine` returns a new one.
class Mesh {
 public:
  /// Validates the input and throws MeshError on any invariant violation.
  /// An empty `refinement_edge` selects the longest edge of every triangle.
  Mesh(std::vector<Point> vertices, std::vector<Triangle> triangles,
       std::vector<BoundaryEdge> boundary, std::vector<int> refinement_edge = {},
       std::vector<int> parent = {});

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_elements() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_; }
  const std::vector<int>& refinement_edge() const { return refinement_edge_; }
  /// Element of the mesh this one was refined from (identity for unrefined meshes).
  const std::vector<int>& parent() const { return parent_; }

  const Point& vertex(int v) const { return vertices_[v]; }
  const Triangle& triangle(int k) const { return triangles_[k]; }

  /// Global edge vertices, lower index first.
  const std::array<int, 2>& edge(int e) const { return edges_[e]; }
  /// Global edge index of local edge `i` of element `k`.
  int element_edge(int k, int i) const { return element_edges_[k][i]; }
  const std::array<int, 3>& element_edges(int k) const { return element_edges_[k]; }
  /// The one or two elements containing edge `e`; the second is -1 on the boundary.
  const std::array<int, 2>& edge_elements(int e) const { return edge_elements_[e]; }
  /// Tag of a boundary edge, nullopt for interior edges.
  std::optional<BoundaryTag> edge_tag(int e) const;
  bool is_boundary_edge(int e) const { return edge_elements_[e][1] < 0; }

  /// Elements sharing vertex `v`, ascending.
  std::span<const int> vertex_elements(int v) const;
  /// True when `v` lies on the closure of the Dirichlet boundary.
  bool is_dirichlet_vertex(int v) const { return dirichlet_vertex_[v]; }
  bool has_dirichlet_boundary() const;
  bool has_absorbing_boundary() const;

  /// Edge index of the vertex pair, -1 when the pair is not an edge.
  int find_edge(int a, int b) const;

  bool operator==(const Mesh& other) const;

 private:
  void build_topology();

  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<BoundaryEdge> boundary_;
  std::vector<int> refinement_edge_;
  std::vector<int> parent_;

  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> element_edges_;
  std::vector<std::array<int, 2>> edge_elements_;
  std::vector<std::int8_t> edge_tag_;  // -1 interior, else BoundaryTag
  std::vector<int> vertex_elements_offsets_;
  std::vector<int> vertex_elements_;
  std::vector<bool> dirichlet_vertex_;
};

struct ElementGeometry {
  double h;      // diameter
  double rho;    // inradius
  double kappa;  // rho / h
  double area;
};

/// Affine map from the reference triangle (0,0),(1,0),(0,1) onto an element.
struct AffineMap {
  Point origin;
  Eigen::Matrix2d jacobian;
  Eigen::Matrix2d inverse_transpose;
  double det;

  Point map(const Eigen::Vector2d& xhat) const { return origin + jacobian * xhat; }
};

AffineMap affine_map(const Mesh& mesh, int element);

/// Throws MeshError for zero-area elements.
ElementGeometry element_geometry(const Mesh& mesh, int element);

/// Unit outward normal of local edge `local_edge` of `element`.
Point outward_normal(const Mesh& mesh, int element, int local_edge);

/// Largest element diameter.
double mesh_size(const Mesh& mesh);
/// Largest distance between two mesh vertices.
double domain_diameter(const Mesh& mesh);

enum class PatchEdgeKind : std::uint8_t {
  InteriorFacing,       // edge of the patch boundary inside the domain
  DirichletSharing,     // on Gamma_D and incident to the patch vertex
  DirichletOpposite,    // on Gamma_D, not incident to the patch vertex
  Absorbing             // on Gamma_A
};

struct PatchEdge {
  int edge;
  int element;     // patch element containing the edge
  int local_edge;  // local index within that element
  PatchEdgeKind kind;

  /// Member of Gamma_a, where the normal trace is prescribed.
  bool essential() const { return kind != PatchEdgeKind::DirichletSharing; }
};

struct VertexPatch {
  int vertex;
  std::vector<int> elements;          // ascending
  std::vector<int> inner_edges;       // edges shared by two patch elements
  std::vector<PatchEdge> boundary;    // edges of the patch boundary
  double diameter;
  bool is_dirichlet_vertex;
};

VertexPatch vertex_patch(const Mesh& mesh, int vertex);

/// n x n grid of (-1,1)^2 split along lower-left to upper-right diagonals,
/// every boundary edge absorbing.
Mesh build_cartesian_mesh(int n);

/// Same construction on an arbitrary axis-aligned rectangle.
Mesh build_cartesian_mesh(int n, const Point& lower, const Point& upper, BoundaryTag tag);

/// Reads the ASCII format `NV NT NB`, NV lines `x y`, NT lines `v0 v1 v2`,
/// NB lines `v0 v1 TAG` (TAG D or A). Errors carry the offending line number.
Mesh load_mesh(const std::filesystem::path& path);
Mesh parse_mesh(const std::string& text);
void save_mesh(const Mesh& mesh, const std::filesystem::path& path);
std::string format_mesh(const Mesh& mesh);

/// Newest-vertex bisection of every marked element with conforming closure.
/// Children record their source element in `parent()`.
Mesh refine(const Mesh& mesh, std::span<const int> marked);

/// Geometric conformity check: no vertex inside an edge, areas positive,
/// tagged edges exactly the single-use edges. Returns a message on failure.
std::optional<std::string> check_conformity(const Mesh& mesh);

double total_area(const Mesh& mesh);

}  // namespace helm

#endif  // HELM_MESH_HPP
