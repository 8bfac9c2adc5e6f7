// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HELM_EQUILIBRATION_HPP
#define HELM_EQUILIBRATION_HPP

#include <vector>

#include "helm/solver.hpp"

namespace helm {

using MatrixX2c = Eigen::Matrix<Complex, Eigen::Dynamic, 2>;

/// Elementwise and edgewise L2 projections of the data onto degree p.
struct ProjectedData {
  int degree = 1;
  /// Per element, P_p nodal coefficients of the projected source.
  std::vector<Eigen::VectorXcd> f;
  /// Per edge, values of the projected impedance datum at the p+1
  /// equispaced points from the lower to the higher vertex index.
  /// Empty for edges off Gamma_A.
  std::vector<Eigen::VectorXcd> g;
};

ProjectedData project_data(const HelmholtzProblem& problem);

/// Data of the constrained minimization on the patch of one vertex, all
/// polynomials of degree q = p + 1 stored by nodal values.
struct PatchProblem {
  VertexPatch patch;
  int degree = 2;                       // q
  std::vector<AffineMap> maps;          // per patch element
  std::vector<Triangle> triangles;      // vertex indices per patch element
  std::vector<std::array<int, 3>> element_edges;  // global edge indices
  std::vector<Eigen::VectorXcd> d;      // divergence target, P_q nodal
  std::vector<MatrixX2c> target;        // psi_a grad u_h, P_q nodal
  /// Per patch.boundary entry: normal trace at q+1 equispaced points along
  /// the element-local edge direction (zero off Gamma_A).
  std::vector<Eigen::VectorXcd> b;
  /// |(d,1) - (b,1)| relative to the data scale; zero for Dirichlet vertices.
  double compatibility_residual = 0.0;
  /// Constant subtracted from d to restore exact compatibility.
  Complex offset = 0.0;
};

struct EquilibrationOptions {
  /// Multiplies the boundary datum b_a; -1 is a deliberate fault for self-checks.
  double boundary_sign = 1.0;
  /// Relative compatibility residual up to which d_a is rebalanced.
  double rebalance_tolerance = 1e-8;
};

/// Throws CompatibilityError when (d_a,1) != (b_a,1) beyond the tolerance
/// for a vertex off the Dirichlet boundary.
PatchProblem build_patch_problem(int vertex, const DiscreteField& u_h, const ProjectedData& data,
                                 double k, const EquilibrationOptions& options = {});

/// Local Raviart-Thomas coefficients (element-local dof orientation) of the
/// patch flux, one block per patch element.
struct PatchFlux {
  int vertex = -1;
  std::vector<int> elements;
  std::vector<Eigen::VectorXcd> coefficients;
};

/// Solves the saddle-point system of the patch minimization.
PatchFlux solve_patch(const PatchProblem& problem);

/// Broken RT_q field; H(div)-conforming when built from patch fluxes.
struct FluxField {
  std::shared_ptr<const Mesh> mesh;
  int degree = 2;
  std::vector<Eigen::VectorXcd> coefficients;  // per element

  /// Physical value and divergence at the reference point `xhat` of element k.
  Vector2c value(int k, const Point& xhat) const;
  Complex divergence(int k, const Point& xhat) const;
};

/// Sums the patch fluxes element by element in local vertex order.
FluxField assemble_global_flux(std::shared_ptr<const Mesh> mesh, int degree,
                               const std::vector<PatchFlux>& patches);

/// Builds and solves every patch problem concurrently and sums the result.
FluxField equilibrate(const HelmholtzProblem& problem, const DiscreteField& u_h,
                      const ProjectedData& data, const EquilibrationOptions& options = {});

/// Largest relative violations of the flux identities.
struct FluxDefects {
  double divergence = 0.0;  // ||div s - pi f - k^2 u_h||_K / ||div s||
  double boundary = 0.0;    // ||s.n + pi g + i k u_h||_e / ||s.n||_{Gamma_A}
  double jump = 0.0;        // |[s.n]| at quadrature points / max |s.n|
};

FluxDefects flux_defects(const FluxField& flux, const DiscreteField& u_h, const ProjectedData& data,
                         double k);

}  // namespace helm

#endif  // HELM_EQUILIBRATION_HPP
