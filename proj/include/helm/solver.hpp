// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HELM_SOLVER_HPP
#define HELM_SOLVER_HPP

#include <functional>
#include <memory>

#include <Eigen/Sparse>

#include "helm/spaces.hpp"

namespace helm {

using ScalarField = std::function<Complex(const Point&)>;
/// Boundary datum evaluated with the unit outward normal at the point.
using BoundaryField = std::function<Complex(const Point&, const Point&)>;

/// -k^2 u - Laplace u = f in the domain, u = 0 on Gamma_D,
/// grad u . n - i k u = g on Gamma_A.
struct HelmholtzProblem {
  std::shared_ptr<const Mesh> mesh;
  int degree = 1;
  double k = 1.0;
  ScalarField f;    // empty means zero
  BoundaryField g;  // empty means zero
  /// Quadrature degree for f and g integrals; -1 selects max(2p+2, 12).
  int quad_degree = -1;

  int data_quad_degree() const;
  void validate() const;
};

/// Analytic field with value and gradient, used as exact solution or reference.
struct AnalyticField {
  std::function<Complex(const Point&)> value;
  std::function<Vector2c(const Point&)> gradient;
};

/// xi(x) = exp(i k d.x) with d = (cos nu, sin nu).
AnalyticField plane_wave(double k, double nu);

/// grad u . n - i k u for the given field.
BoundaryField impedance_datum(const AnalyticField& u, double k);

/// Real symmetric matrices over all dofs of a space:
/// mass (u,v), stiffness (grad u, grad v), boundary mass (u,v) on Gamma_A.
struct FormMatrices {
  Eigen::SparseMatrix<double> mass;
  Eigen::SparseMatrix<double> stiffness;
  Eigen::SparseMatrix<double> boundary_mass;
};

FormMatrices assemble_forms(const LagrangeSpace& space);

struct LinearSystem {
  Eigen::SparseMatrix<Complex> matrix;  // free dofs only
  Eigen::MatrixXcd rhs;
  bool symmetric = true;  // complex symmetric, not Hermitian
};

/// b(phi_j, phi_i) and (f, phi_i) + (g, phi_i)_{Gamma_A}, Dirichlet dofs removed.
LinearSystem assemble(const HelmholtzProblem& problem, const LagrangeSpace& space);

/// (f, phi_i) + (g, phi_i)_{Gamma_A} over all dofs.
Eigen::VectorXcd assemble_load(const HelmholtzProblem& problem, const LagrangeSpace& space);

/// Direct sparse solve of every column of `rhs` with one factorization.
/// Throws SolverError when the factorization fails or the relative residual
/// exceeds 1e-10.
Eigen::MatrixXcd solve_linear(const Eigen::SparseMatrix<Complex>& matrix,
                              const Eigen::MatrixXcd& rhs);

/// Estimate of the 1-norm condition number of a square sparse matrix.
double condition_estimate(const Eigen::SparseMatrix<Complex>& matrix);

/// Embeds a free-dof vector into a field with zero Dirichlet values.
DiscreteField expand(std::shared_ptr<const LagrangeSpace> space, const Eigen::VectorXcd& free);

DiscreteField solve_helmholtz(const HelmholtzProblem& problem);
DiscreteField solve_helmholtz(const HelmholtzProblem& problem,
                              std::shared_ptr<const LagrangeSpace> space);

/// Projection onto the space orthogonal in the energy inner product
/// k^2 (u,v) + k (u,v)_{Gamma_A} + (grad u, grad v).
DiscreteField best_approximation(const AnalyticField& u, std::shared_ptr<const LagrangeSpace> space,
                                 double k, int quad_degree = -1);

/// Nodal interpolant of an analytic field.
DiscreteField interpolate(const AnalyticField& u, std::shared_ptr<const LagrangeSpace> space);

}  // namespace helm

#endif  // HELM_SOLVER_HPP
