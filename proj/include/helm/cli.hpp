// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HELM_CLI_HPP
#define HELM_CLI_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "helm/adaptivity.hpp"

namespace helm {

/// Accepts plain numbers and multiples of pi: "pi", "2pi", "10*pi", "3.5".
double parse_wavenumber(const std::string& text);

struct RunConfig {
  std::string command;
  double k = kPi;
  int p = 1;
  std::vector<int> n{8, 16, 32, 64, 128};
  std::string mesh;
  int iterations = 15;
  std::string out;
  int p_ref = -1;
  int quad_degree = -1;
  double nu = kPi / 3.0;
  std::string snapshots;
  std::string inject;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// One line of the plane-wave sweep on the n x n Cartesian mesh of (-1,1)^2.
struct PlaneWaveRow {
  int n = 0;
  double h = 0.0;
  int p = 1;
  double k = 0.0;
  EstimateReport report;
  FluxDefects defects;
  double max_compatibility_residual = 0.0;
};

PlaneWaveRow run_plane_wave(double k, int p, int n, double nu = kPi / 3.0, int quad_degree = -1);

std::string plane_wave_header();
std::string plane_wave_csv_row(const PlaneWaveRow& row);

/// c_up of the scattering geometry with star point (0,0).
double scattering_c_up(const Mesh& mesh, double k);

struct VerifyCheck {
  std::string name;
  bool passed;
  std::string detail;
};

/// Self-check suite; `inject` selects a deliberate fault
/// ("", "boundary-sign" or "non-galerkin").
std::vector<VerifyCheck> run_verify(const std::string& inject = "");

/// Parses arguments and dispatches; returns the process exit status.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace helm

#endif  // HELM_CLI_HPP
