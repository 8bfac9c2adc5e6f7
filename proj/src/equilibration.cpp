// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#include "helm/equilibration.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include <Eigen/LU>

#include "helm/parallel.hpp"
#include "helm/quadrature.hpp"

namespace helm {
namespace {

constexpr Complex kI(0.0, 1.0);

int local_index(const Triangle& t, int vertex) {
  for (int i = 0; i < 3; ++i) {
    if (t[i] == vertex) return i;
  }
  return -1;
}

int local_edge_of(const Mesh& mesh, int element, int edge) {
  for (int i = 0; i < 3; ++i) {
    if (mesh.element_edge(element, i) == edge) return i;
  }
  return -1;
}

double edge_length(const Mesh& mesh, int element, int local_edge) {
  const Triangle& t = mesh.triangle(element);
  return (mesh.vertex(t[(local_edge + 2) % 3]) - mesh.vertex(t[(local_edge + 1) % 3])).norm();
}

bool forward_edge(const Triangle& t, int local_edge) {
  return t[(local_edge + 1) % 3] < t[(local_edge + 2) % 3];
}

// 1D equispaced nodal mass matrix and integrals on [0,1].
struct Nodal1d {
  Eigen::MatrixXd mass;
  Eigen::VectorXd integrals;
};

const Nodal1d& nodal_1d(int n) {
  static std::map<int, Nodal1d> cache;
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  const EdgeRule& rule = edge_rule(2 * n);
  Nodal1d m{Eigen::MatrixXd::Zero(n + 1, n + 1), Eigen::VectorXd::Zero(n + 1)};
  for (std::size_t i = 0; i < rule.points.size(); ++i) {
    const Eigen::VectorXd l = lagrange_1d(n, rule.points[i]);
    m.mass.noalias() += rule.weights[i] * l * l.transpose();
    m.integrals += rule.weights[i] * l;
  }
  return cache.emplace(n, std::move(m)).first->second;
}

// Reference P_q mass matrix and basis integrals.
struct NodalTriangle {
  Eigen::MatrixXd mass;
  Eigen::VectorXd integrals;
  Eigen::PartialPivLU<Eigen::MatrixXd> mass_lu;
};

const NodalTriangle& nodal_triangle(int p) {
  static std::map<int, NodalTriangle> cache;
  static std::mutex mutex;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(p);
    if (it != cache.end()) return it->second;
  }
  const int degree = 2 * p;
  const TriangleRule& rule = triangle_rule(degree);
  const LagrangeTable& tab = lagrange_table(p, degree);
  const int n = lagrange_dim(p);
  NodalTriangle m;
  m.mass = Eigen::MatrixXd::Zero(n, n);
  m.integrals = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < rule.points.size(); ++i) {
    m.mass.noalias() += rule.weights[i] * tab.values.row(i).transpose() * tab.values.row(i);
    m.integrals += rule.weights[i] * tab.values.row(i).transpose();
  }
  m.mass_lu.compute(m.mass);
  std::lock_guard lock(mutex);
  return cache.emplace(p, std::move(m)).first->second;
}

// P_p basis values and reference gradients at the P_q nodes.
const LagrangeTable& basis_at_nodes(int p, int q) {
  static std::map<std::pair<int, int>, LagrangeTable> cache;
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  auto it = cache.find({p, q});
  if (it != cache.end()) return it->second;
  const LagrangeElement& el = lagrange_element(p);
  const auto& nodes = lagrange_element(q).nodes();
  LagrangeTable t;
  t.values.resize(nodes.size(), el.size());
  t.dx.resize(nodes.size(), el.size());
  t.dy.resize(nodes.size(), el.size());
  Eigen::VectorXd v;
  Eigen::MatrixX2d g;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    el.evaluate(nodes[i], v, g);
    t.values.row(i) = v.transpose();
    t.dx.row(i) = g.col(0).transpose();
    t.dy.row(i) = g.col(1).transpose();
  }
  return cache.emplace(std::pair{p, q}, std::move(t)).first->second;
}

// Reference-element matrices of the patch saddle-point system.
struct RtMatrices {
  Eigen::MatrixXd m00, m11, m01;  // int phi_x phi_x, phi_y phi_y, phi_x phi_y
  Eigen::MatrixXd b;              // int r_m div phi_j
  Eigen::MatrixXd px, py;         // int phi_x r_m, int phi_y r_m
};

const RtMatrices& rt_matrices(int q) {
  static std::map<int, RtMatrices> cache;
  static std::mutex mutex;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(q);
    if (it != cache.end()) return it->second;
  }
  const int degree = 2 * q + 2;
  const TriangleRule& rule = triangle_rule(degree);
  const RtTable& rt = rt_table(q, degree);
  const LagrangeTable& lt = lagrange_table(q, degree);
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(rule.weights.data(), rule.weights.size());
  RtMatrices m;
  m.m00 = rt.vx.transpose() * w.asDiagonal() * rt.vx;
  m.m11 = rt.vy.transpose() * w.asDiagonal() * rt.vy;
  m.m01 = rt.vx.transpose() * w.asDiagonal() * rt.vy;
  m.b = lt.values.transpose() * w.asDiagonal() * rt.div;
  m.px = rt.vx.transpose() * w.asDiagonal() * lt.values;
  m.py = rt.vy.transpose() * w.asDiagonal() * lt.values;
  std::lock_guard lock(mutex);
  return cache.emplace(q, std::move(m)).first->second;
}

}  // namespace

ProjectedData project_data(const HelmholtzProblem& problem) {
  problem.validate();
  const Mesh& mesh = *problem.mesh;
  const int p = problem.degree;
  const int degree = problem.data_quad_degree();
  ProjectedData data;
  data.degree = p;
  data.f.assign(mesh.num_elements(), Eigen::VectorXcd::Zero(lagrange_dim(p)));
  data.g.assign(mesh.num_edges(), Eigen::VectorXcd());

  if (problem.f) {
    const NodalTriangle& nt = nodal_triangle(p);
    const TriangleRule& rule = triangle_rule(degree);
    const LagrangeTable& tab = lagrange_table(p, degree);
    for (int k = 0; k < mesh.num_elements(); ++k) {
      const AffineMap map = affine_map(mesh, k);
      Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(lagrange_dim(p));
      for (std::size_t i = 0; i < rule.points.size(); ++i) {
        rhs += (rule.weights[i] * problem.f(map.map(rule.points[i]))) *
               tab.values.row(i).transpose().cast<Complex>();
      }
      data.f[k] = nt.mass_lu.solve(rhs);
    }
  }

  const Nodal1d& n1 = nodal_1d(p);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(n1.mass);
  const EdgeRule& rule = edge_rule(degree);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto tag = mesh.edge_tag(e);
    if (!tag || *tag != BoundaryTag::Absorbing) continue;
    if (!problem.g) {
      data.g[e] = Eigen::VectorXcd::Zero(p + 1);
      continue;
    }
    const int k = mesh.edge_elements(e)[0];
    const Point n = outward_normal(mesh, k, local_edge_of(mesh, k, e));
    const Point& a = mesh.vertex(mesh.edge(e)[0]);
    const Point& b = mesh.vertex(mesh.edge(e)[1]);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(p + 1);
    for (std::size_t i = 0; i < rule.points.size(); ++i) {
      const double s = rule.points[i];
      rhs += (rule.weights[i] * problem.g(a + s * (b - a), n)) * lagrange_1d(p, s).cast<Complex>();
    }
    data.g[e] = lu.solve(rhs);
  }
  return data;
}

PatchProblem build_patch_problem(int vertex, const DiscreteField& u_h, const ProjectedData& data,
                                 double k, const EquilibrationOptions& options) {
  const Mesh& mesh = u_h.space->mesh();
  const int p = u_h.space->degree();
  const int q = p + 1;
  PatchProblem pp;
  pp.patch = vertex_patch(mesh, vertex);
  pp.degree = q;
  const LagrangeTable& at_nodes = basis_at_nodes(p, q);
  const auto& nodes = lagrange_element(q).nodes();
  const int nn = static_cast<int>(nodes.size());

  for (int K : pp.patch.elements) {
    const AffineMap map = affine_map(mesh, K);
    pp.maps.push_back(map);
    pp.triangles.push_back(mesh.triangle(K));
    pp.element_edges.push_back(mesh.element_edges(K));
    const int ia = local_index(mesh.triangle(K), vertex);
    const Point grad_psi = barycentric_gradients(map)[ia];
    const Eigen::VectorXcd u = u_h.local(K);
    const Eigen::VectorXcd uv = at_nodes.values.cast<Complex>() * u;
    const Eigen::VectorXcd gx = at_nodes.dx.cast<Complex>() * u;
    const Eigen::VectorXcd gy = at_nodes.dy.cast<Complex>() * u;
    const Eigen::VectorXcd fv = at_nodes.values.cast<Complex>() * data.f[K];
    Eigen::VectorXcd d(nn);
    MatrixX2c target(nn, 2);
    for (int m = 0; m < nn; ++m) {
      const std::array<double, 3> l = {1.0 - nodes[m].x() - nodes[m].y(), nodes[m].x(),
                                       nodes[m].y()};
      const double psi = l[ia];
      const Vector2c grad_u = map.inverse_transpose.cast<Complex>() * Vector2c(gx(m), gy(m));
      d(m) = psi * (fv(m) + k * k * uv(m)) - (grad_psi.x() * grad_u.x() + grad_psi.y() * grad_u.y());
      target.row(m) = psi * grad_u.transpose();
    }
    pp.d.push_back(std::move(d));
    pp.target.push_back(std::move(target));
  }

  const LagrangeElement& pel = lagrange_element(p);
  for (const PatchEdge& pe : pp.patch.boundary) {
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(q + 1);
    if (pe.kind == PatchEdgeKind::Absorbing) {
      const Triangle& t = mesh.triangle(pe.element);
      const int ia = local_index(t, vertex);
      const bool forward = forward_edge(t, pe.local_edge);
      const Eigen::VectorXcd u = u_h.local(pe.element);
      for (int j = 0; j <= q; ++j) {
        const double s = double(j) / q;
        const Point xi = reference_edge_point(pe.local_edge, s);
        const std::array<double, 3> l = {1.0 - xi.x() - xi.y(), xi.x(), xi.y()};
        const Complex uval = pel.values(xi).cast<Complex>().dot(u);
        const Complex gval =
            lagrange_1d(p, forward ? s : 1.0 - s).cast<Complex>().dot(data.g[pe.edge]);
        b(j) = -options.boundary_sign * l[ia] * (gval + kI * k * uval);
      }
    }
    pp.b.push_back(std::move(b));
  }

  if (!pp.patch.is_dirichlet_vertex) {
    const NodalTriangle& nt = nodal_triangle(q);
    const Nodal1d& n1 = nodal_1d(q);
    Complex int_d = 0.0, int_b = 0.0;
    double norm_d = 0.0, norm_b = 0.0, area = 0.0, perimeter = 0.0;
    for (std::size_t e = 0; e < pp.maps.size(); ++e) {
      const double det = pp.maps[e].det;
      int_d += det * nt.integrals.cast<Complex>().dot(pp.d[e]);
      norm_d += det * std::real(pp.d[e].dot(nt.mass.cast<Complex>() * pp.d[e]));
      area += 0.5 * det;
    }
    for (std::size_t j = 0; j < pp.b.size(); ++j) {
      const PatchEdge& pe = pp.patch.boundary[j];
      const double len = edge_length(mesh, pe.element, pe.local_edge);
      int_b += len * n1.integrals.cast<Complex>().dot(pp.b[j]);
      norm_b += len * std::real(pp.b[j].dot(n1.mass.cast<Complex>() * pp.b[j]));
      perimeter += len;
    }
    const Complex residual = int_d - int_b;
    const double scale = std::sqrt(std::max(norm_d, 0.0) * area) +
                         std::sqrt(std::max(norm_b, 0.0) * perimeter);
    pp.compatibility_residual =
        scale > 0.0 ? std::abs(residual) / scale : (std::abs(residual) > 0.0 ? INFINITY : 0.0);
    if (!(pp.compatibility_residual <= options.rebalance_tolerance)) {
      throw CompatibilityError("patch data of vertex " + std::to_string(vertex) +
                                   " violate (d,1) = (b,1): relative residual " +
                                   std::to_string(pp.compatibility_residual),
                               vertex, pp.compatibility_residual);
    }
    pp.offset = residual / area;
    for (auto& d : pp.d) d.array() -= pp.offset;
  }
  return pp;
}

PatchFlux solve_patch(const PatchProblem& pp) {
  const VertexPatch& patch = pp.patch;
  const int q = pp.degree;
  const int ne = static_cast<int>(patch.elements.size());
  const int nrt = rt_dim(q);
  const int nm = lagrange_dim(q);
  const int ni = q * (q + 1);
  const int per_edge = q + 1;
  const RtMatrices& ref = rt_matrices(q);
  const NodalTriangle& nt = nodal_triangle(q);
  const EdgeRule& er = edge_rule(2 * q);

  std::vector<int> slots(patch.inner_edges);
  for (const PatchEdge& pe : patch.boundary) slots.push_back(pe.edge);
  const int n_flux = static_cast<int>(slots.size()) * per_edge + ne * ni;
  const int n_mult = ne * nm;

  // Patch dof and orientation sign of every element-local RT dof.
  std::vector<std::vector<int>> dof(ne, std::vector<int>(nrt));
  std::vector<Eigen::VectorXd> sign(ne, Eigen::VectorXd::Ones(nrt));
  for (int e = 0; e < ne; ++e) {
    for (int i = 0; i < 3; ++i) {
      const int slot = static_cast<int>(
          std::find(slots.begin(), slots.end(), pp.element_edges[e][i]) - slots.begin());
      for (int j = 0; j < per_edge; ++j) {
        dof[e][i * per_edge + j] = slot * per_edge + j;
        sign[e](i * per_edge + j) = rt_edge_sign(pp.triangles[e], i, j);
      }
    }
    const int base = static_cast<int>(slots.size()) * per_edge + e * ni;
    for (int i = 0; i < ni; ++i) dof[e][3 * per_edge + i] = base + i;
  }

  // Essential normal-trace values, in global edge orientation.
  std::vector<char> essential(n_flux, 0);
  Eigen::MatrixXd fixed = Eigen::MatrixXd::Zero(n_flux, 2);
  for (std::size_t j = 0; j < patch.boundary.size(); ++j) {
    const PatchEdge& pe = patch.boundary[j];
    if (!pe.essential()) continue;
    const int e = static_cast<int>(
        std::find(patch.elements.begin(), patch.elements.end(), pe.element) - patch.elements.begin());
    const Point tangent = pp.maps[e].jacobian * (reference_edge_point(pe.local_edge, 1.0) -
                                                 reference_edge_point(pe.local_edge, 0.0));
    const double len = tangent.norm();
    for (std::size_t i = 0; i < er.points.size(); ++i) {
      const Complex bval = lagrange_1d(q, er.points[i]).cast<Complex>().dot(pp.b[j]);
      const Eigen::VectorXd leg = legendre(q, er.points[i]);
      for (int jj = 0; jj < per_edge; ++jj) {
        const int local = pe.local_edge * per_edge + jj;
        const int d = dof[e][local];
        const Complex v = sign[e](local) * er.weights[i] * len * bval * leg(jj);
        fixed(d, 0) += v.real();
        fixed(d, 1) += v.imag();
      }
    }
    for (int jj = 0; jj < per_edge; ++jj) essential[dof[e][pe.local_edge * per_edge + jj]] = 1;
  }

  // Full patch matrices before eliminating essential dofs.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_flux, n_flux);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n_mult, n_flux);
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n_flux, 2);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n_mult, 2);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n_mult);
  const Eigen::MatrixXd m01_sym = ref.m01 + ref.m01.transpose();
  for (int e = 0; e < ne; ++e) {
    const AffineMap& map = pp.maps[e];
    const Eigen::Matrix2d gm = map.jacobian.transpose() * map.jacobian;
    const Eigen::MatrixXd ak = (gm(0, 0) * ref.m00 + gm(1, 1) * ref.m11 + gm(0, 1) * m01_sym) / map.det;
    const Eigen::Matrix2d& jac = map.jacobian;
    const Eigen::MatrixXcd tx = pp.target[e].col(0);
    const Eigen::MatrixXcd ty = pp.target[e].col(1);
    const Eigen::VectorXcd fk =
        -(jac(0, 0) * ref.px.cast<Complex>() * tx + jac(0, 1) * ref.py.cast<Complex>() * tx +
          jac(1, 0) * ref.px.cast<Complex>() * ty + jac(1, 1) * ref.py.cast<Complex>() * ty);
    const Eigen::VectorXcd dk = map.det * nt.mass.cast<Complex>() * pp.d[e];
    const auto& de = dof[e];
    const auto& se = sign[e];
    for (int i = 0; i < nrt; ++i) {
      for (int j = 0; j < nrt; ++j) a(de[i], de[j]) += se(i) * se(j) * ak(i, j);
      f(de[i], 0) += se(i) * fk(i).real();
      f(de[i], 1) += se(i) * fk(i).imag();
    }
    for (int m = 0; m < nm; ++m) {
      const int row = e * nm + m;
      for (int j = 0; j < nrt; ++j) b(row, de[j]) += se(j) * ref.b(m, j);
      g(row, 0) = dk(m).real();
      g(row, 1) = dk(m).imag();
      c(row) = map.det * nt.integrals(m);
    }
  }

  std::vector<int> free_index(n_flux, -1);
  int n_free = 0;
  for (int i = 0; i < n_flux; ++i) {
    if (!essential[i]) free_index[i] = n_free++;
  }
  const bool mean_zero = !patch.is_dirichlet_vertex;
  const int n = n_free + n_mult + (mean_zero ? 1 : 0);
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, 2);
  const Eigen::MatrixXd a_fixed = a * fixed;
  const Eigen::MatrixXd b_fixed = b * fixed;
  for (int i = 0; i < n_flux; ++i) {
    const int fi = free_index[i];
    if (fi < 0) continue;
    for (int j = 0; j < n_flux; ++j) {
      if (free_index[j] >= 0) kkt(fi, free_index[j]) = a(i, j);
    }
    for (int m = 0; m < n_mult; ++m) {
      kkt(fi, n_free + m) = -b(m, i);
      kkt(n_free + m, fi) = -b(m, i);
    }
    rhs.row(fi) = f.row(i) - a_fixed.row(i);
  }
  for (int m = 0; m < n_mult; ++m) rhs.row(n_free + m) = -g.row(m) + b_fixed.row(m);
  if (mean_zero) {
    for (int m = 0; m < n_mult; ++m) {
      kkt(n - 1, n_free + m) = -c(m);
      kkt(n_free + m, n - 1) = -c(m);
    }
  }

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(kkt);
  const Eigen::MatrixXd x = lu.solve(rhs);
  const double residual = (kkt * x - rhs).norm();
  const double scale = kkt.norm() * x.norm() + rhs.norm();
  if (!x.allFinite() || residual > 1e-10 * std::max(scale, 1e-300)) {
    throw SolverError("singular saddle-point system on the patch of vertex " +
                          std::to_string(patch.vertex),
                      1.0 / std::max(lu.rcond(), 1e-300));
  }

  Eigen::MatrixXd sigma = fixed;
  for (int i = 0; i < n_flux; ++i) {
    if (free_index[i] >= 0) sigma.row(i) = x.row(free_index[i]);
  }
  PatchFlux out;
  out.vertex = patch.vertex;
  out.elements = patch.elements;
  for (int e = 0; e < ne; ++e) {
    Eigen::VectorXcd coeff(nrt);
    for (int i = 0; i < nrt; ++i) {
      const int d = dof[e][i];
      coeff(i) = sign[e](i) * Complex(sigma(d, 0), sigma(d, 1));
    }
    out.coefficients.push_back(std::move(coeff));
  }
  return out;
}

Vector2c FluxField::value(int k, const Point& xhat) const {
  const AffineMap map = affine_map(*mesh, k);
  Eigen::MatrixX2d v;
  Eigen::VectorXd d;
  rt_element(degree).evaluate(xhat, v, d);
  const Vector2c ref(v.col(0).cast<Complex>().dot(coefficients[k]),
                     v.col(1).cast<Complex>().dot(coefficients[k]));
  return map.jacobian.cast<Complex>() * ref / map.det;
}

Complex FluxField::divergence(int k, const Point& xhat) const {
  const AffineMap map = affine_map(*mesh, k);
  Eigen::MatrixX2d v;
  Eigen::VectorXd d;
  rt_element(degree).evaluate(xhat, v, d);
  return d.cast<Complex>().dot(coefficients[k]) / map.det;
}

FluxField assemble_global_flux(std::shared_ptr<const Mesh> mesh, int degree,
                               const std::vector<PatchFlux>& patches) {
  FluxField flux;
  flux.degree = degree;
  flux.coefficients.assign(mesh->num_elements(), Eigen::VectorXcd::Zero(rt_dim(degree)));
  std::vector<const PatchFlux*> by_vertex(mesh->num_vertices(), nullptr);
  for (const PatchFlux& pf : patches) {
    if (pf.vertex >= 0 && pf.vertex < mesh->num_vertices()) by_vertex[pf.vertex] = &pf;
  }
  for (int k = 0; k < mesh->num_elements(); ++k) {
    for (int v : mesh->triangle(k)) {
      const PatchFlux* pf = by_vertex[v];
      if (!pf) continue;
      const auto it = std::lower_bound(pf->elements.begin(), pf->elements.end(), k);
      if (it == pf->elements.end() || *it != k) continue;
      flux.coefficients[k] += pf->coefficients[it - pf->elements.begin()];
    }
  }
  flux.mesh = std::move(mesh);
  return flux;
}

FluxField equilibrate(const HelmholtzProblem& problem, const DiscreteField& u_h,
                      const ProjectedData& data, const EquilibrationOptions& options) {
  const Mesh& mesh = u_h.space->mesh();
  std::vector<PatchFlux> patches(mesh.num_vertices());
  parallel_for(mesh.num_vertices(), [&](int a) {
    patches[a] = solve_patch(build_patch_problem(a, u_h, data, problem.k, options));
  });
  return assemble_global_flux(u_h.space->mesh_ptr(), u_h.space->degree() + 1, patches);
}

FluxDefects flux_defects(const FluxField& flux, const DiscreteField& u_h, const ProjectedData& data,
                         double k) {
  const Mesh& mesh = *flux.mesh;
  const int p = u_h.space->degree();
  const int q = flux.degree;
  const int degree = 2 * q + 2;
  const TriangleRule& rule = triangle_rule(degree);
  const RtTable& rt = rt_table(q, degree);
  const LagrangeTable& lt = lagrange_table(p, degree);
  FluxDefects out;

  double div_norm2 = 0.0;
  std::vector<double> defect2(mesh.num_elements(), 0.0);
  for (int K = 0; K < mesh.num_elements(); ++K) {
    const AffineMap map = affine_map(mesh, K);
    const Eigen::VectorXcd div = rt.div.cast<Complex>() * flux.coefficients[K] / map.det;
    const Eigen::VectorXcd target =
        lt.values.cast<Complex>() * (data.f[K] + k * k * u_h.local(K));
    for (std::size_t i = 0; i < rule.points.size(); ++i) {
      const double w = rule.weights[i] * map.det;
      div_norm2 += w * std::norm(div(i));
      defect2[K] += w * std::norm(div(i) - target(i));
    }
  }
  const double div_norm = std::sqrt(div_norm2);
  for (double d2 : defect2) {
    out.divergence = std::max(out.divergence, div_norm > 0 ? std::sqrt(d2) / div_norm : std::sqrt(d2));
  }

  const EdgeRule& er = edge_rule(degree);
  const LagrangeElement& pel = lagrange_element(p);
  double trace_norm2 = 0.0;
  double max_trace = 0.0;
  std::vector<double> boundary_defect2;
  std::vector<double> jumps;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto [K, L] = mesh.edge_elements(e);
    const int le = local_edge_of(mesh, K, e);
    const Point n = outward_normal(mesh, K, le);
    const Triangle& t = mesh.triangle(K);
    const double len = edge_length(mesh, K, le);
    const bool forward = forward_edge(t, le);
    const auto tag = mesh.edge_tag(e);
    const bool absorbing = tag && *tag == BoundaryTag::Absorbing;
    double d2 = 0.0;
    for (std::size_t i = 0; i < er.points.size(); ++i) {
      const double s = er.points[i];
      const Point xi = reference_edge_point(le, s);
      const Vector2c sv = flux.value(K, xi);
      const Complex sn = sv.x() * n.x() + sv.y() * n.y();
      max_trace = std::max(max_trace, std::abs(sn));
      if (L >= 0) {
        const Point x = affine_map(mesh, K).map(xi);
        const Point xl = reference_coordinates(affine_map(mesh, L), x);
        const Vector2c other = flux.value(L, xl);
        jumps.push_back(std::abs(sn - (other.x() * n.x() + other.y() * n.y())));
      } else if (absorbing) {
        const Complex uval = pel.values(xi).cast<Complex>().dot(u_h.local(K));
        const Complex gval = lagrange_1d(p, forward ? s : 1.0 - s).cast<Complex>().dot(data.g[e]);
        trace_norm2 += er.weights[i] * len * std::norm(sn);
        d2 += er.weights[i] * len * std::norm(sn + gval + Complex(0.0, k) * uval);
      }
    }
    if (absorbing) boundary_defect2.push_back(d2);
  }
  const double trace_norm = std::sqrt(trace_norm2);
  for (double d2 : boundary_defect2) {
    out.boundary = std::max(out.boundary, trace_norm > 0 ? std::sqrt(d2) / trace_norm : std::sqrt(d2));
  }
  for (double j : jumps) out.jump = std::max(out.jump, max_trace > 0 ? j / max_trace : j);
  return out;
}

}  // namespace helm
