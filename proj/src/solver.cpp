// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#include "helm/solver.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "helm/quadrature.hpp"

namespace helm {

int HelmholtzProblem::data_quad_degree() const {
  if (quad_degree >= 0) return quad_degree;
  return std::min(std::max(2 * degree + 2, 12), kMaxQuadratureDegree);
}

void HelmholtzProblem::validate() const {
  if (!mesh) throw ConfigError("problem has no mesh");
  if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("wavenumber must be positive");
  if (degree < 1 || degree > kMaxLagrangeDegree) {
    throw ConfigError("polynomial degree must lie in [1, " + std::to_string(kMaxLagrangeDegree) + "]");
  }
}

AnalyticField plane_wave(double k, double nu) {
  const Point d(std::cos(nu), std::sin(nu));
  AnalyticField u;
  u.value = [k, d](const Point& x) { return std::exp(Complex(0.0, k * d.dot(x))); };
  u.gradient = [k, d](const Point& x) {
    const Complex v = Complex(0.0, k) * std::exp(Complex(0.0, k * d.dot(x)));
    return Vector2c(v * d.x(), v * d.y());
  };
  return u;
}

BoundaryField impedance_datum(const AnalyticField& u, double k) {
  return [u, k](const Point& x, const Point& n) {
    const Vector2c g = u.gradient(x);
    return g.x() * n.x() + g.y() * n.y() - Complex(0.0, k) * u.value(x);
  };
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void add_block(Triplets& t, std::span<const int> dofs, const Eigen::MatrixXd& block) {
  for (int i = 0; i < block.rows(); ++i) {
    for (int j = 0; j < block.cols(); ++j) t.emplace_back(dofs[i], dofs[j], block(i, j));
  }
}

Eigen::SparseMatrix<double> from_triplets(int n, const Triplets& t) {
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// Free-dof restriction operator R with R * full = free.
Eigen::SparseMatrix<Complex> restrict_free(const Eigen::SparseMatrix<double>& m,
                                           const LagrangeSpace& space) {
  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(m.nonZeros());
  for (int c = 0; c < m.outerSize(); ++c) {
    const int fc = space.free_index(c);
    if (fc < 0) continue;
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, c); it; ++it) {
      const int fr = space.free_index(static_cast<int>(it.row()));
      if (fr >= 0) t.emplace_back(fr, fc, it.value());
    }
  }
  Eigen::SparseMatrix<Complex> out(space.num_free_dofs(), space.num_free_dofs());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

// Integrates a callback against basis functions: element volume terms and
// Gamma_A edge terms, accumulated over all dofs.
template <class Volume, class Boundary>
Eigen::VectorXcd integrate_load(const LagrangeSpace& space, int degree, Volume volume,
                                Boundary boundary) {
  const Mesh& mesh = space.mesh();
  const int p = space.degree();
  Eigen::VectorXcd load = Eigen::VectorXcd::Zero(space.num_dofs());
  const TriangleRule& rule = triangle_rule(degree);
  const LagrangeTable& tab = lagrange_table(p, degree);
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const AffineMap map = affine_map(mesh, k);
    const auto dofs = space.element_dofs(k);
    Eigen::VectorXcd local = Eigen::VectorXcd::Zero(dofs.size());
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Point x = map.map(rule.points[q]);
      const double w = rule.weights[q] * map.det;
      Eigen::RowVectorXd gx = tab.dx.row(q), gy = tab.dy.row(q);
      const Eigen::RowVectorXd px =
          map.inverse_transpose(0, 0) * gx + map.inverse_transpose(0, 1) * gy;
      const Eigen::RowVectorXd py =
          map.inverse_transpose(1, 0) * gx + map.inverse_transpose(1, 1) * gy;
      volume(x, w, tab.values.row(q), px, py, local);
    }
    for (std::size_t i = 0; i < dofs.size(); ++i) load(dofs[i]) += local(i);
  }
  const EdgeRule& er = edge_rule(degree);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto tag = mesh.edge_tag(e);
    if (!tag || *tag != BoundaryTag::Absorbing) continue;
    const int k = mesh.edge_elements(e)[0];
    int le = 0;
    while (mesh.element_edge(k, le) != e) ++le;
    const AffineMap map = affine_map(mesh, k);
    const Triangle& t = mesh.triangle(k);
    const double len = (mesh.vertex(t[(le + 2) % 3]) - mesh.vertex(t[(le + 1) % 3])).norm();
    const Point n = outward_normal(mesh, k, le);
    const LagrangeTable& et = lagrange_edge_table(p, degree, le);
    const auto dofs = space.element_dofs(k);
    Eigen::VectorXcd local = Eigen::VectorXcd::Zero(dofs.size());
    for (std::size_t q = 0; q < er.points.size(); ++q) {
      const Point x = map.map(reference_edge_point(le, er.points[q]));
      boundary(x, n, er.weights[q] * len, et.values.row(q), local);
    }
    for (std::size_t i = 0; i < dofs.size(); ++i) load(dofs[i]) += local(i);
  }
  return load;
}

}  // namespace

FormMatrices assemble_forms(const LagrangeSpace& space) {
  const Mesh& mesh = space.mesh();
  const int p = space.degree();
  const int degree = 2 * p;
  const TriangleRule& rule = triangle_rule(degree);
  const LagrangeTable& tab = lagrange_table(p, degree);
  const int nb = space.dofs_per_element();

  // Reference mass and gradient products; element matrices follow by scaling.
  Eigen::MatrixXd m0 = Eigen::MatrixXd::Zero(nb, nb);
  Eigen::MatrixXd sxx = m0, syy = m0, sxy = m0;
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const double w = rule.weights[q];
    const auto v = tab.values.row(q);
    const auto dx = tab.dx.row(q);
    const auto dy = tab.dy.row(q);
    m0.noalias() += w * v.transpose() * v;
    sxx.noalias() += w * dx.transpose() * dx;
    syy.noalias() += w * dy.transpose() * dy;
    sxy.noalias() += w * dx.transpose() * dy;
  }
  const Eigen::MatrixXd sxy_sym = sxy + sxy.transpose();

  Triplets tm, ts, tb;
  tm.reserve(static_cast<std::size_t>(mesh.num_elements()) * nb * nb);
  ts.reserve(tm.capacity());
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const AffineMap map = affine_map(mesh, k);
    const Eigen::Matrix2d g = map.inverse_transpose.transpose() * map.inverse_transpose;
    const auto dofs = space.element_dofs(k);
    add_block(tm, dofs, map.det * m0);
    add_block(ts, dofs, map.det * (g(0, 0) * sxx + g(1, 1) * syy + g(0, 1) * sxy_sym));
  }

  const EdgeRule& er = edge_rule(degree);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto tag = mesh.edge_tag(e);
    if (!tag || *tag != BoundaryTag::Absorbing) continue;
    const int k = mesh.edge_elements(e)[0];
    int le = 0;
    while (mesh.element_edge(k, le) != e) ++le;
    const Triangle& t = mesh.triangle(k);
    const double len = (mesh.vertex(t[(le + 2) % 3]) - mesh.vertex(t[(le + 1) % 3])).norm();
    const LagrangeTable& et = lagrange_edge_table(p, degree, le);
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(nb, nb);
    for (std::size_t q = 0; q < er.points.size(); ++q) {
      block.noalias() += er.weights[q] * len * et.values.row(q).transpose() * et.values.row(q);
    }
    add_block(tb, space.element_dofs(k), block);
  }
  const int n = space.num_dofs();
  return {from_triplets(n, tm), from_triplets(n, ts), from_triplets(n, tb)};
}

Eigen::VectorXcd assemble_load(const HelmholtzProblem& problem, const LagrangeSpace& space) {
  const auto& f = problem.f;
  const auto& g = problem.g;
  if (!f && !g) return Eigen::VectorXcd::Zero(space.num_dofs());
  return integrate_load(
      space, problem.data_quad_degree(),
      [&](const Point& x, double w, const auto& v, const auto&, const auto&,
          Eigen::VectorXcd& local) {
        if (f) local += (w * f(x)) * v.transpose().template cast<Complex>();
      },
      [&](const Point& x, const Point& n, double w, const auto& v, Eigen::VectorXcd& local) {
        if (g) local += (w * g(x, n)) * v.transpose().template cast<Complex>();
      });
}

LinearSystem assemble(const HelmholtzProblem& problem, const LagrangeSpace& space) {
  problem.validate();
  const FormMatrices forms = assemble_forms(space);
  const double k = problem.k;
  Eigen::SparseMatrix<double> re = forms.stiffness - k * k * forms.mass;
  Eigen::SparseMatrix<Complex> a = restrict_free(re, space);
  a -= Complex(0.0, k) * restrict_free(forms.boundary_mass, space);
  a.makeCompressed();

  const Eigen::VectorXcd load = assemble_load(problem, space);
  LinearSystem sys;
  sys.matrix = std::move(a);
  sys.rhs.resize(space.num_free_dofs(), 1);
  for (int d = 0; d < space.num_dofs(); ++d) {
    const int fi = space.free_index(d);
    if (fi >= 0) sys.rhs(fi, 0) = load(d);
  }
  return sys;
}

double condition_estimate(const Eigen::SparseMatrix<Complex>& matrix) {
  const int n = static_cast<int>(matrix.rows());
  if (n == 0) return 1.0;
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(matrix);
  if (lu.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  double norm_a = 0.0;
  for (int c = 0; c < matrix.outerSize(); ++c) {
    double col = 0.0;
    for (Eigen::SparseMatrix<Complex>::InnerIterator it(matrix, c); it; ++it) col += std::abs(it.value());
    norm_a = std::max(norm_a, col);
  }
  // Hager-Higham power iteration for ||A^{-1}||_1.
  Eigen::VectorXcd x = Eigen::VectorXcd::Constant(n, 1.0 / n);
  double estimate = 0.0;
  int last = -1;
  for (int it = 0; it < 5; ++it) {
    const Eigen::VectorXcd y = lu.solve(x);
    if (!y.allFinite()) return std::numeric_limits<double>::infinity();
    estimate = y.lpNorm<1>();
    Eigen::VectorXcd s(n);
    for (int i = 0; i < n; ++i) s(i) = std::abs(y(i)) > 0 ? y(i) / std::abs(y(i)) : Complex(1.0);
    const Eigen::VectorXcd z = lu.adjoint().solve(s);
    int j = 0;
    z.cwiseAbs().maxCoeff(&j);
    if (j == last) break;
    last = j;
    x.setZero();
    x(j) = 1.0;
  }
  return norm_a * estimate;
}

Eigen::MatrixXcd solve_linear(const Eigen::SparseMatrix<Complex>& matrix,
                              const Eigen::MatrixXcd& rhs) {
  if (matrix.rows() != matrix.cols() || matrix.rows() != rhs.rows()) {
    throw SolverError("dimension mismatch in linear solve", std::numeric_limits<double>::quiet_NaN());
  }
  if (matrix.rows() == 0) return Eigen::MatrixXcd(0, rhs.cols());
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(matrix);
  if (lu.info() != Eigen::Success) {
    throw SolverError("sparse factorization failed: " + lu.lastErrorMessage(),
                      std::numeric_limits<double>::infinity());
  }
  Eigen::MatrixXcd x = lu.solve(rhs);
  for (int c = 0; c < rhs.cols(); ++c) {
    const double bn = rhs.col(c).norm();
    const double r = (matrix * x.col(c) - rhs.col(c)).norm();
    if (!std::isfinite(r) || r > 1e-10 * std::max(bn, std::numeric_limits<double>::min())) {
      if (bn == 0.0 && r == 0.0) continue;
      throw SolverError("linear solve missed the residual target (relative residual " +
                            std::to_string(bn > 0 ? r / bn : r) + ")",
                        condition_estimate(matrix));
    }
  }
  return x;
}

DiscreteField expand(std::shared_ptr<const LagrangeSpace> space, const Eigen::VectorXcd& free) {
  DiscreteField u{std::move(space), {}};
  u.coefficients = Eigen::VectorXcd::Zero(u.space->num_dofs());
  for (int d = 0; d < u.space->num_dofs(); ++d) {
    const int fi = u.space->free_index(d);
    if (fi >= 0) u.coefficients(d) = free(fi);
  }
  return u;
}

DiscreteField solve_helmholtz(const HelmholtzProblem& problem,
                              std::shared_ptr<const LagrangeSpace> space) {
  const LinearSystem sys = assemble(problem, *space);
  const Eigen::MatrixXcd x = solve_linear(sys.matrix, sys.rhs);
  return expand(std::move(space), x.col(0));
}

DiscreteField solve_helmholtz(const HelmholtzProblem& problem) {
  problem.validate();
  return solve_helmholtz(problem, std::make_shared<const LagrangeSpace>(problem.mesh, problem.degree));
}

DiscreteField best_approximation(const AnalyticField& u, std::shared_ptr<const LagrangeSpace> space,
                                 double k, int quad_degree) {
  const int p = space->degree();
  const int degree =
      quad_degree >= 0 ? quad_degree : std::min(std::max(2 * p + 2, 12), kMaxQuadratureDegree);
  const FormMatrices forms = assemble_forms(*space);
  const Eigen::SparseMatrix<double> full = k * k * forms.mass + k * forms.boundary_mass + forms.stiffness;

  const Eigen::VectorXcd load = integrate_load(
      *space, degree,
      [&](const Point& x, double w, const auto& v, const auto& px, const auto& py,
          Eigen::VectorXcd& local) {
        const Complex val = u.value(x);
        const Vector2c grad = u.gradient(x);
        local += (w * k * k * val) * v.transpose().template cast<Complex>() +
                 (w * grad.x()) * px.transpose().template cast<Complex>() +
                 (w * grad.y()) * py.transpose().template cast<Complex>();
      },
      [&](const Point& x, const Point&, double w, const auto& v, Eigen::VectorXcd& local) {
        local += (w * k * u.value(x)) * v.transpose().template cast<Complex>();
      });

  const Eigen::SparseMatrix<Complex> a = restrict_free(full, *space);
  Eigen::SparseMatrix<double> ar = a.real();
  Eigen::MatrixXd rhs(space->num_free_dofs(), 2);
  for (int d = 0; d < space->num_dofs(); ++d) {
    const int fi = space->free_index(d);
    if (fi >= 0) {
      rhs(fi, 0) = load(d).real();
      rhs(fi, 1) = load(d).imag();
    }
  }
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(ar);
  if (ldlt.info() != Eigen::Success) {
    throw SolverError("energy-norm factorization failed", std::numeric_limits<double>::infinity());
  }
  const Eigen::MatrixXd x = ldlt.solve(rhs);
  Eigen::VectorXcd free(space->num_free_dofs());
  for (int i = 0; i < free.size(); ++i) free(i) = Complex(x(i, 0), x(i, 1));
  return expand(std::move(space), free);
}

DiscreteField interpolate(const AnalyticField& u, std::shared_ptr<const LagrangeSpace> space) {
  DiscreteField out{space, Eigen::VectorXcd::Zero(space->num_dofs())};
  for (int d = 0; d < space->num_dofs(); ++d) {
    if (!space->is_dirichlet(d)) out.coefficients(d) = u.value(space->dof_coordinates()[d]);
  }
  return out;
}

}  // namespace helm
