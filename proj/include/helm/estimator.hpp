// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HELM_ESTIMATOR_HPP
#define HELM_ESTIMATOR_HPP

#include <optional>
#include <vector>

#include "helm/equilibration.hpp"

namespace helm {

/// eta_K = ||sigma_h + grad u_h||_{0,K}.
double eta_local(const FluxField& flux, const DiscreteField& u_h, int element);
std::vector<double> eta_all(const FluxField& flux, const DiscreteField& u_h);

/// Trace constant of an element: sqrt(N (3/(4 pi)) (1 + 1/pi) (h/rho)^2),
/// N the number of its edges on Gamma_A.
double trace_constant(const Mesh& mesh, int element);

/// (h/pi)||f - pi f||_K + C_tr (h/pi)^(1/2) ||g - pi g||_{dK cap Gamma_A}.
double osc_local(const HelmholtzProblem& problem, const ProjectedData& data, int element);
std::vector<double> osc_all(const HelmholtzProblem& problem, const ProjectedData& data);

/// Squared local energy norms k^2||v||_K^2 + |v|_{1,K}^2 + k||v||^2_{dK cap Gamma_A};
/// their sum is the squared global energy norm.
std::vector<double> energy_norm2_local(const AnalyticField& v, const Mesh& mesh, double k,
                                       int quad_degree);
std::vector<double> energy_norm2_local(const DiscreteField& v, double k);
/// Local energy norms of u - u_h against an analytic field.
std::vector<double> energy_error2_local(const AnalyticField& u, const DiscreteField& u_h, double k,
                                        int quad_degree);
/// Local energy norms of reference - u_h, both on the same mesh.
std::vector<double> energy_error2_local(const DiscreteField& reference, const DiscreteField& u_h,
                                        double k);

double energy_norm(const AnalyticField& v, const Mesh& mesh, double k, int quad_degree);
double energy_norm(const DiscreteField& v, double k);

double sum_sqrt(const std::vector<double>& squares);
double root_sum_squares(const std::vector<double>& values);

struct EstimateReport {
  std::vector<double> eta_k;
  std::vector<double> osc_k;
  std::vector<double> error_k;  // empty without a reference
  double eta = 0.0;
  double osc = 0.0;
  double reference_norm = 0.0;
  std::optional<double> error;     // ||u - u_h||_{1,k}
  std::optional<double> ba_error;  // ||u - P_h u||_{1,k}
  double c_ba = 0.0;
  double c_up = 0.0;

  /// Percentages relative to the reference energy norm.
  double e_est() const { return 100.0 * eta / reference_norm; }
  double e_est_guaranteed() const { return c_up * e_est(); }
  std::optional<double> e_fem() const;
  std::optional<double> e_ba() const;
  /// eta / error; absent when the error vanishes or is unknown.
  std::optional<double> effectivity() const;
  std::optional<double> guaranteed_effectivity() const;
};

}  // namespace helm

#endif  // HELM_ESTIMATOR_HPP
