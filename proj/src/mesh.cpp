// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#include "helm/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

#include <Eigen/Geometry>
#include <Eigen/LU>

namespace helm {
namespace {

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

int longest_edge(const std::vector<Point>& v, const Triangle& t) {
  int best = 0;
  double best_len = -1.0;
  for (int i = 0; i < 3; ++i) {
    const double len = (v[t[(i + 2) % 3]] - v[t[(i + 1) % 3]]).norm();
    if (len > best_len * (1.0 + 1e-12)) {
      best = i;
      best_len = len;
    }
  }
  return best;
}

}  // namespace

std::optional<MeshDefect> find_mesh_defect(std::span<const Point> vertices,
                                           std::span<const Triangle> triangles,
                                           std::span<const BoundaryEdge> boundary) {
  const int nv = static_cast<int>(vertices.size());
  for (int v = 0; v < nv; ++v) {
    if (!std::isfinite(vertices[v].x()) || !std::isfinite(vertices[v].y())) {
      return MeshDefect{"vertex " + std::to_string(v) + " has non-finite coordinates"};
    }
  }
  if (triangles.empty()) return MeshDefect{"mesh has no triangles"};

  struct Use {
    int count = 0;
    int first = -1;
    int from = -1;  // start vertex of the first traversal
  };
  std::unordered_map<std::uint64_t, Use> uses;
  uses.reserve(triangles.size() * 2);
  for (int k = 0; k < static_cast<int>(triangles.size()); ++k) {
    const Triangle& t = triangles[k];
    for (int i = 0; i < 3; ++i) {
      if (t[i] < 0 || t[i] >= nv) {
        return MeshDefect{"triangle " + std::to_string(k) + " references vertex " +
                              std::to_string(t[i]) + " out of range",
                          k};
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      return MeshDefect{"triangle " + std::to_string(k) + " repeats a vertex", k};
    }
    const double area = signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
    const double scale = std::max({(vertices[t[1]] - vertices[t[0]]).squaredNorm(),
                                   (vertices[t[2]] - vertices[t[1]]).squaredNorm(),
                                   (vertices[t[0]] - vertices[t[2]]).squaredNorm()});
    if (!(area > 1e-14 * scale)) {
      return MeshDefect{"triangle " + std::to_string(k) +
                            (area < 0 ? " is negatively oriented" : " is degenerate"),
                        k};
    }
    for (int i = 0; i < 3; ++i) {
      const int a = t[(i + 1) % 3];
      const int b = t[(i + 2) % 3];
      Use& u = uses[edge_key(a, b)];
      ++u.count;
      if (u.count == 1) {
        u.first = k;
        u.from = a;
      } else if (u.count == 2 && u.from == a) {
        return MeshDefect{"triangles " + std::to_string(u.first) + " and " + std::to_string(k) +
                              " overlap along edge (" + std::to_string(a) + "," +
                              std::to_string(b) + ")",
                          k};
      } else if (u.count > 2) {
        return MeshDefect{"edge (" + std::to_string(a) + "," + std::to_string(b) +
                              ") is shared by more than two triangles",
                          k};
      }
    }
  }

  std::unordered_map<std::uint64_t, int> tagged;
  for (int j = 0; j < static_cast<int>(boundary.size()); ++j) {
    const auto [a, b] = boundary[j].vertices;
    if (a < 0 || a >= nv || b < 0 || b >= nv || a == b) {
      return MeshDefect{"boundary edge " + std::to_string(j) + " has invalid vertices", -1, j};
    }
    const auto it = uses.find(edge_key(a, b));
    if (it == uses.end()) {
      return MeshDefect{"boundary edge (" + std::to_string(a) + "," + std::to_string(b) +
                            ") is not an edge of the mesh",
                        -1, j};
    }
    if (it->second.count != 1) {
      return MeshDefect{"boundary edge (" + std::to_string(a) + "," + std::to_string(b) +
                            ") is an interior edge",
                        -1, j};
    }
    if (!tagged.emplace(edge_key(a, b), j).second) {
      return MeshDefect{"boundary edge (" + std::to_string(a) + "," + std::to_string(b) +
                            ") is tagged twice",
                        -1, j};
    }
  }
  // Single-use edges in deterministic order: scan triangles again.
  for (int k = 0; k < static_cast<int>(triangles.size()); ++k) {
    const Triangle& t = triangles[k];
    for (int i = 0; i < 3; ++i) {
      const int a = t[(i + 1) % 3];
      const int b = t[(i + 2) % 3];
      const auto key = edge_key(a, b);
      if (uses[key].count == 1 && !tagged.contains(key)) {
        return MeshDefect{"boundary edge (" + std::to_string(a) + "," + std::to_string(b) +
                              ") of triangle " + std::to_string(k) + " carries no tag",
                          k};
      }
    }
  }
  return std::nullopt;
}

Mesh::Mesh(std::vector<Point> vertices, std::vector<Triangle> triangles,
           std::vector<BoundaryEdge> boundary, std::vector<int> refinement_edge,
           std::vector<int> parent)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      boundary_(std::move(boundary)),
      refinement_edge_(std::move(refinement_edge)),
      parent_(std::move(parent)) {
  if (auto defect = find_mesh_defect(vertices_, triangles_, boundary_)) {
    throw MeshError(defect->message);
  }
  if (refinement_edge_.empty()) {
    refinement_edge_.resize(triangles_.size());
    for (std::size_t k = 0; k < triangles_.size(); ++k) {
      refinement_edge_[k] = longest_edge(vertices_, triangles_[k]);
    }
  } else if (refinement_edge_.size() != triangles_.size()) {
    throw MeshError("refinement edge array has the wrong length");
  }
  for (int r : refinement_edge_) {
    if (r < 0 || r > 2) throw MeshError("refinement edge index out of range");
  }
  if (parent_.empty()) {
    parent_.resize(triangles_.size());
    for (std::size_t k = 0; k < triangles_.size(); ++k) parent_[k] = static_cast<int>(k);
  } else if (parent_.size() != triangles_.size()) {
    throw MeshError("parent array has the wrong length");
  }
  build_topology();
}

void Mesh::build_topology() {
  const int nt = num_elements();
  struct Entry {
    std::uint64_t key;
    int element;
    int local;
  };
  std::vector<Entry> entries;
  entries.reserve(3 * nt);
  for (int k = 0; k < nt; ++k) {
    for (int i = 0; i < 3; ++i) {
      entries.push_back({edge_key(triangles_[k][(i + 1) % 3], triangles_[k][(i + 2) % 3]), k, i});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.key != b.key ? a.key < b.key : a.element < b.element;
  });
  element_edges_.assign(nt, {-1, -1, -1});
  edges_.clear();
  edge_elements_.clear();
  for (std::size_t i = 0; i < entries.size();) {
    const auto key = entries[i].key;
    const int e = static_cast<int>(edges_.size());
    edges_.push_back({static_cast<int>(key >> 32), static_cast<int>(key & 0xffffffffu)});
    std::array<int, 2> owners{-1, -1};
    int n = 0;
    for (; i < entries.size() && entries[i].key == key; ++i) {
      owners[n++] = entries[i].element;
      element_edges_[entries[i].element][entries[i].local] = e;
    }
    edge_elements_.push_back(owners);
  }

  edge_tag_.assign(edges_.size(), -1);
  dirichlet_vertex_.assign(vertices_.size(), false);
  for (const auto& b : boundary_) {
    const int e = find_edge(b.vertices[0], b.vertices[1]);
    edge_tag_[e] = static_cast<std::int8_t>(b.tag);
    if (b.tag == BoundaryTag::Dirichlet) {
      dirichlet_vertex_[b.vertices[0]] = true;
      dirichlet_vertex_[b.vertices[1]] = true;
    }
  }

  const int nv = num_vertices();
  vertex_elements_offsets_.assign(nv + 1, 0);
  for (const auto& t : triangles_) {
    for (int v : t) ++vertex_elements_offsets_[v + 1];
  }
  for (int v = 0; v < nv; ++v) vertex_elements_offsets_[v + 1] += vertex_elements_offsets_[v];
  vertex_elements_.assign(vertex_elements_offsets_[nv], -1);
  std::vector<int> fill(vertex_elements_offsets_.begin(), vertex_elements_offsets_.end() - 1);
  for (int k = 0; k < nt; ++k) {
    for (int v : triangles_[k]) vertex_elements_[fill[v]++] = k;
  }
}

std::optional<BoundaryTag> Mesh::edge_tag(int e) const {
  if (edge_tag_[e] < 0) return std::nullopt;
  return static_cast<BoundaryTag>(edge_tag_[e]);
}

std::span<const int> Mesh::vertex_elements(int v) const {
  return {vertex_elements_.data() + vertex_elements_offsets_[v],
          static_cast<std::size_t>(vertex_elements_offsets_[v + 1] - vertex_elements_offsets_[v])};
}

bool Mesh::has_dirichlet_boundary() const {
  return std::any_of(boundary_.begin(), boundary_.end(),
                     [](const BoundaryEdge& b) { return b.tag == BoundaryTag::Dirichlet; });
}

bool Mesh::has_absorbing_boundary() const {
  return std::any_of(boundary_.begin(), boundary_.end(),
                     [](const BoundaryEdge& b) { return b.tag == BoundaryTag::Absorbing; });
}

int Mesh::find_edge(int a, int b) const {
  const int lo = std::min(a, b);
  const int hi = std::max(a, b);
  const auto it = std::lower_bound(edges_.begin(), edges_.end(), std::array<int, 2>{lo, hi});
  if (it == edges_.end() || (*it)[0] != lo || (*it)[1] != hi) return -1;
  return static_cast<int>(it - edges_.begin());
}

bool Mesh::operator==(const Mesh& other) const {
  return vertices_ == other.vertices_ && triangles_ == other.triangles_ &&
         boundary_ == other.boundary_ && refinement_edge_ == other.refinement_edge_;
}

AffineMap affine_map(const Mesh& mesh, int element) {
  const Triangle& t = mesh.triangle(element);
  const Point& p0 = mesh.vertex(t[0]);
  AffineMap m;
  m.origin = p0;
  m.jacobian.col(0) = mesh.vertex(t[1]) - p0;
  m.jacobian.col(1) = mesh.vertex(t[2]) - p0;
  m.det = m.jacobian.determinant();
  m.inverse_transpose = m.jacobian.inverse().transpose();
  return m;
}

ElementGeometry element_geometry(const Mesh& mesh, int element) {
  const Triangle& t = mesh.triangle(element);
  const Point& a = mesh.vertex(t[0]);
  const Point& b = mesh.vertex(t[1]);
  const Point& c = mesh.vertex(t[2]);
  const double ab = (b - a).norm();
  const double bc = (c - b).norm();
  const double ca = (a - c).norm();
  const double area = std::abs(signed_area(a, b, c));
  const double h = std::max({ab, bc, ca});
  if (!(area > 1e-14 * h * h)) {
    throw MeshError("element " + std::to_string(element) + " is degenerate");
  }
  const double rho = 2.0 * area / (ab + bc + ca);
  return {h, rho, rho / h, area};
}

Point outward_normal(const Mesh& mesh, int element, int local_edge) {
  const Triangle& t = mesh.triangle(element);
  const Point tangent = mesh.vertex(t[(local_edge + 2) % 3]) - mesh.vertex(t[(local_edge + 1) % 3]);
  return Point(tangent.y(), -tangent.x()).normalized();
}

double mesh_size(const Mesh& mesh) {
  double h = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k) h = std::max(h, element_geometry(mesh, k).h);
  return h;
}

double domain_diameter(const Mesh& mesh) {
  // The diameter of a polygon is attained between two boundary vertices.
  std::vector<int> bv;
  for (const auto& b : mesh.boundary_edges()) {
    bv.push_back(b.vertices[0]);
    bv.push_back(b.vertices[1]);
  }
  std::sort(bv.begin(), bv.end());
  bv.erase(std::unique(bv.begin(), bv.end()), bv.end());
  double d = 0.0;
  for (std::size_t i = 0; i < bv.size(); ++i) {
    for (std::size_t j = i + 1; j < bv.size(); ++j) {
      d = std::max(d, (mesh.vertex(bv[i]) - mesh.vertex(bv[j])).norm());
    }
  }
  return d;
}

double total_area(const Mesh& mesh) {
  double area = 0.0;
  for (const auto& t : mesh.triangles()) {
    area += signed_area(mesh.vertex(t[0]), mesh.vertex(t[1]), mesh.vertex(t[2]));
  }
  return area;
}

VertexPatch vertex_patch(const Mesh& mesh, int vertex) {
  if (vertex < 0 || vertex >= mesh.num_vertices()) {
    throw MeshError("vertex index out of range");
  }
  VertexPatch patch;
  patch.vertex = vertex;
  const auto elems = mesh.vertex_elements(vertex);
  patch.elements.assign(elems.begin(), elems.end());
  patch.is_dirichlet_vertex = mesh.is_dirichlet_vertex(vertex);

  auto in_patch = [&](int k) {
    return k >= 0 && std::binary_search(patch.elements.begin(), patch.elements.end(), k);
  };
  std::vector<int> seen;
  std::vector<int> patch_vertices;
  for (int k : patch.elements) {
    for (int i = 0; i < 3; ++i) {
      patch_vertices.push_back(mesh.triangle(k)[i]);
      const int e = mesh.element_edge(k, i);
      if (std::find(seen.begin(), seen.end(), e) != seen.end()) continue;
      seen.push_back(e);
      const auto& owners = mesh.edge_elements(e);
      if (in_patch(owners[0]) && in_patch(owners[1])) {
        patch.inner_edges.push_back(e);
        continue;
      }
      const auto& ev = mesh.edge(e);
      const bool shares = ev[0] == vertex || ev[1] == vertex;
      PatchEdgeKind kind = PatchEdgeKind::InteriorFacing;
      if (const auto tag = mesh.edge_tag(e)) {
        if (*tag == BoundaryTag::Absorbing) {
          kind = PatchEdgeKind::Absorbing;
        } else {
          kind = shares ? PatchEdgeKind::DirichletSharing : PatchEdgeKind::DirichletOpposite;
        }
      }
      patch.boundary.push_back({e, k, i, kind});
    }
  }
  std::sort(patch.inner_edges.begin(), patch.inner_edges.end());
  std::sort(patch.boundary.begin(), patch.boundary.end(),
            [](const PatchEdge& a, const PatchEdge& b) { return a.edge < b.edge; });
  std::sort(patch_vertices.begin(), patch_vertices.end());
  patch_vertices.erase(std::unique(patch_vertices.begin(), patch_vertices.end()),
                       patch_vertices.end());
  patch.diameter = 0.0;
  for (std::size_t i = 0; i < patch_vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < patch_vertices.size(); ++j) {
      patch.diameter = std::max(
          patch.diameter, (mesh.vertex(patch_vertices[i]) - mesh.vertex(patch_vertices[j])).norm());
    }
  }
  return patch;
}

Mesh build_cartesian_mesh(int n, const Point& lower, const Point& upper, BoundaryTag tag) {
  if (n < 1) throw MeshError("cartesian mesh needs n >= 1");
  std::vector<Point> vertices;
  vertices.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      vertices.emplace_back(lower.x() + (upper.x() - lower.x()) * i / n,
                            lower.y() + (upper.y() - lower.y()) * j / n);
    }
  }
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<Triangle> triangles;
  triangles.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      // Right-angle vertex first: the diagonal is the refinement edge (local 0).
      triangles.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j)});
      triangles.push_back({id(i, j + 1), id(i, j), id(i + 1, j + 1)});
    }
  }
  std::vector<BoundaryEdge> boundary;
  for (int i = 0; i < n; ++i) boundary.push_back({{id(i, 0), id(i + 1, 0)}, tag});
  for (int j = 0; j < n; ++j) boundary.push_back({{id(n, j), id(n, j + 1)}, tag});
  for (int i = n; i > 0; --i) boundary.push_back({{id(i, n), id(i - 1, n)}, tag});
  for (int j = n; j > 0; --j) boundary.push_back({{id(0, j), id(0, j - 1)}, tag});
  return Mesh(std::move(vertices), std::move(triangles), std::move(boundary));
}

Mesh build_cartesian_mesh(int n) {
  return build_cartesian_mesh(n, Point(-1.0, -1.0), Point(1.0, 1.0), BoundaryTag::Absorbing);
}

namespace {

struct LineReader {
  std::istringstream in;
  int line = 0;

  explicit LineReader(const std::string& text) : in(text) {}

  // Next non-blank line split into tokens.
  std::vector<std::string> next(const char* what) {
    std::string s;
    while (std::getline(in, s)) {
      ++line;
      std::istringstream ls(s);
      std::vector<std::string> tokens;
      for (std::string tok; ls >> tok;) tokens.push_back(tok);
      if (!tokens.empty()) return tokens;
    }
    throw MeshError("line " + std::to_string(line + 1) + ": unexpected end of file, expected " +
                    what);
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw MeshError("line " + std::to_string(line) + ": " + msg);
  }
};

long parse_int(LineReader& r, const std::string& tok) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(tok, &pos);
  } catch (const std::exception&) {
    r.fail("expected an integer, got '" + tok + "'");
  }
  if (pos != tok.size()) r.fail("expected an integer, got '" + tok + "'");
  return v;
}

double parse_double(LineReader& r, const std::string& tok) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    r.fail("expected a number, got '" + tok + "'");
  }
  if (pos != tok.size()) r.fail("expected a number, got '" + tok + "'");
  return v;
}

}  // namespace

Mesh parse_mesh(const std::string& text) {
  LineReader r(text);
  auto header = r.next("the header `NV NT NB`");
  if (header.size() != 3) r.fail("header must hold exactly three counts");
  const long nv = parse_int(r, header[0]);
  const long nt = parse_int(r, header[1]);
  const long nb = parse_int(r, header[2]);
  if (nv < 3 || nt < 1 || nb < 3) r.fail("malformed counts");

  std::vector<Point> vertices(nv);
  for (long i = 0; i < nv; ++i) {
    auto tok = r.next("a vertex line");
    if (tok.size() != 2) r.fail("vertex line must hold two coordinates");
    vertices[i] = Point(parse_double(r, tok[0]), parse_double(r, tok[1]));
  }
  std::vector<int> triangle_lines(nt);
  std::vector<Triangle> triangles(nt);
  for (long k = 0; k < nt; ++k) {
    auto tok = r.next("a triangle line");
    if (tok.size() != 3) r.fail("triangle line must hold three vertex indices");
    for (int i = 0; i < 3; ++i) {
      const long v = parse_int(r, tok[i]);
      if (v < 0 || v >= nv) r.fail("vertex index " + std::to_string(v) + " out of range");
      triangles[k][i] = static_cast<int>(v);
    }
    triangle_lines[k] = r.line;
  }
  std::vector<int> boundary_lines(nb);
  std::vector<BoundaryEdge> boundary(nb);
  for (long j = 0; j < nb; ++j) {
    auto tok = r.next("a boundary line");
    if (tok.size() != 3) r.fail("boundary line must hold `v0 v1 TAG`");
    for (int i = 0; i < 2; ++i) {
      const long v = parse_int(r, tok[i]);
      if (v < 0 || v >= nv) r.fail("vertex index " + std::to_string(v) + " out of range");
      boundary[j].vertices[i] = static_cast<int>(v);
    }
    if (tok[2] == "D") {
      boundary[j].tag = BoundaryTag::Dirichlet;
    } else if (tok[2] == "A") {
      boundary[j].tag = BoundaryTag::Absorbing;
    } else {
      r.fail("unknown boundary tag '" + tok[2] + "'");
    }
    boundary_lines[j] = r.line;
  }
  if (auto defect = find_mesh_defect(vertices, triangles, boundary)) {
    int line = r.line;
    if (defect->triangle >= 0) line = triangle_lines[defect->triangle];
    if (defect->boundary_edge >= 0) line = boundary_lines[defect->boundary_edge];
    throw MeshError("line " + std::to_string(line) + ": " + defect->message);
  }
  return Mesh(std::move(vertices), std::move(triangles), std::move(boundary));
}

Mesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_mesh(buffer.str());
}

std::string format_mesh(const Mesh& mesh) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << mesh.num_vertices() << ' ' << mesh.num_elements() << ' ' << mesh.boundary_edges().size()
      << '\n';
  for (const auto& v : mesh.vertices()) out << v.x() << ' ' << v.y() << '\n';
  for (const auto& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& b : mesh.boundary_edges()) {
    out << b.vertices[0] << ' ' << b.vertices[1] << ' '
        << (b.tag == BoundaryTag::Dirichlet ? 'D' : 'A') << '\n';
  }
  return out.str();
}

void save_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write mesh file " + path.string());
  out << format_mesh(mesh);
}

Mesh refine(const Mesh& mesh, std::span<const int> marked) {
  if (marked.empty()) return mesh;
  const int nt = mesh.num_elements();
  std::vector<char> edge_marked(mesh.num_edges(), 0);
  std::vector<int> work;
  auto mark_edge = [&](int e) {
    if (edge_marked[e]) return;
    edge_marked[e] = 1;
    for (int k : mesh.edge_elements(e)) {
      if (k >= 0) work.push_back(k);
    }
  };
  for (int k : marked) {
    if (k < 0 || k >= nt) throw MeshError("marked element index out of range");
    mark_edge(mesh.element_edge(k, mesh.refinement_edge()[k]));
  }
  // Closure: an element with any marked edge must bisect its refinement edge.
  while (!work.empty()) {
    const int k = work.back();
    work.pop_back();
    mark_edge(mesh.element_edge(k, mesh.refinement_edge()[k]));
  }

  std::vector<Point> vertices = mesh.vertices();
  std::unordered_map<std::uint64_t, int> midpoint;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (!edge_marked[e]) continue;
    const auto& ev = mesh.edge(e);
    midpoint.emplace(edge_key(ev[0], ev[1]), static_cast<int>(vertices.size()));
    vertices.push_back(0.5 * (mesh.vertex(ev[0]) + mesh.vertex(ev[1])));
  }

  std::vector<Triangle> triangles;
  std::vector<int> ref_edge;
  std::vector<int> parent;
  triangles.reserve(2 * nt);
  // Bisect along the refinement edge; the children inherit the parent's two
  // other edges as refinement edges, so marked parent edges get split next.
  auto split = [&](auto&& self, const Triangle& t, int r, int source) -> void {
    const int a = t[r];
    const int b = t[(r + 1) % 3];
    const int c = t[(r + 2) % 3];
    const auto it = midpoint.find(edge_key(b, c));
    if (it == midpoint.end()) {
      triangles.push_back(t);
      ref_edge.push_back(r);
      parent.push_back(source);
      return;
    }
    const int m = it->second;
    self(self, Triangle{a, b, m}, 2, source);
    self(self, Triangle{a, m, c}, 1, source);
  };
  for (int k = 0; k < nt; ++k) split(split, mesh.triangle(k), mesh.refinement_edge()[k], k);

  std::vector<BoundaryEdge> boundary;
  boundary.reserve(mesh.boundary_edges().size() + midpoint.size());
  for (const auto& b : mesh.boundary_edges()) {
    const auto it = midpoint.find(edge_key(b.vertices[0], b.vertices[1]));
    if (it == midpoint.end()) {
      boundary.push_back(b);
    } else {
      boundary.push_back({{b.vertices[0], it->second}, b.tag});
      boundary.push_back({{it->second, b.vertices[1]}, b.tag});
    }
  }
  return Mesh(std::move(vertices), std::move(triangles), std::move(boundary), std::move(ref_edge),
              std::move(parent));
}

std::optional<std::string> check_conformity(const Mesh& mesh) {
  if (auto defect = find_mesh_defect(mesh.vertices(), mesh.triangles(), mesh.boundary_edges())) {
    return defect->message;
  }
  // A hanging node sits strictly inside some single-use edge.
  Eigen::AlignedBox2d box;
  for (const auto& v : mesh.vertices()) box.extend(v);
  const int cells = std::max(1, static_cast<int>(std::sqrt(mesh.num_vertices())));
  const Eigen::Vector2d size = box.sizes().cwiseMax(1e-300);
  auto cell_of = [&](const Point& p) {
    Eigen::Vector2i c = ((p - box.min()).cwiseQuotient(size) * cells).cast<int>();
    return c.cwiseMax(0).cwiseMin(cells - 1).eval();
  };
  std::vector<std::vector<int>> grid(cells * cells);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const auto c = cell_of(mesh.vertex(v));
    grid[c.y() * cells + c.x()].push_back(v);
  }
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (!mesh.is_boundary_edge(e)) continue;
    const auto [a, b] = mesh.edge(e);
    const Point& pa = mesh.vertex(a);
    const Point& pb = mesh.vertex(b);
    const auto lo = cell_of(pa.cwiseMin(pb));
    const auto hi = cell_of(pa.cwiseMax(pb));
    const double len2 = (pb - pa).squaredNorm();
    for (int cy = lo.y(); cy <= hi.y(); ++cy) {
      for (int cx = lo.x(); cx <= hi.x(); ++cx) {
        for (int v : grid[cy * cells + cx]) {
          if (v == a || v == b) continue;
          const Point d = mesh.vertex(v) - pa;
          const double t = d.dot(pb - pa) / len2;
          const double cross = d.x() * (pb - pa).y() - d.y() * (pb - pa).x();
          if (t > 1e-12 && t < 1 - 1e-12 && std::abs(cross) < 1e-12 * len2) {
            return "vertex " + std::to_string(v) + " hangs on edge (" + std::to_string(a) + "," +
                   std::to_string(b) + ")";
          }
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace helm
