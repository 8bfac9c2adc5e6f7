// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HELM_BOUNDS_HPP
#define HELM_BOUNDS_HPP

#include <cmath>
#include <vector>

#include "helm/mesh.hpp"

namespace helm {

/// Interpolation constant for meshes of right isosceles triangles.
inline const double kDefaultCi = 0.493 / std::sqrt(2.0);

enum class BoundCase { Scattering1a, FreeSpace1b, Interior2a, InteriorConvex2b };

/// True when (x - x0).n <= 0 on Gamma_D and > 0 on Gamma_A at every
/// boundary vertex (sufficient for affine edges).
bool star_point_admissible(const Mesh& mesh, const Point& x0);

/// Stability constant of the star-shaped geometry, normalized by the domain
/// diameter. Throws BoundsError for an inadmissible x0.
double c_stab(const Mesh& mesh, const Point& x0);

struct BoundContext {
  BoundCase kind = BoundCase::FreeSpace1b;
  double k = 1.0;
  double h_omega = 0.0;  // domain diameter
  double h = 0.0;        // mesh size
  int p = 1;
  double c_stab = 0.0;
  double c_i = kDefaultCi;
  double beta = 0.0;
  std::vector<double> eigenvalues;  // Dirichlet Laplace eigenvalues (cases 2a/2b)
};

/// Computable upper bound on the approximation factor for the given case.
double sigma_ba_bound(const BoundContext& context);

/// pi^2 (m^2/a^2 + n^2/b^2), m, n >= 1, ascending with multiplicity.
std::vector<double> rectangle_eigenvalues(double a, double b, int count);

double theta_1(double t);
double theta_2(double t, double t_tilde);
double theta_tilde_1(double t);
double theta_tilde_2(double t, double t_tilde);
/// sqrt(2) + theta_tilde_1(t).
double c_up_from(double t);
/// min(sqrt(2) + theta_tilde_1(t), 1 + theta_tilde_2(t, t_tilde)).
double c_up_from(double t, double t_tilde);

}  // namespace helm

#endif  // HELM_BOUNDS_HPP
