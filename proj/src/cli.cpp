// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#include "helm/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "helm/bounds.hpp"
#include "helm/quadrature.hpp"

#ifndef HELM_ASSET_DIR
#define HELM_ASSET_DIR "assets"
#endif

namespace helm {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + text + "'");
  }
  if (used != text.size()) throw ConfigError("not a number: '" + text + "'");
  return value;
}

std::string format_value(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

std::string format_optional(const std::optional<double>& v) {
  if (!v.has_value()) return "nan";
  return format_value(*v);
}

}  // namespace

double parse_wavenumber(const std::string& text) {
  std::string s = trim(text);
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    s = trim(s.substr(0, s.size() - 2));
    if (!s.empty() && s.back() == '*') s = trim(s.substr(0, s.size() - 1));
    if (s.empty() || s == "+") return kPi;
    if (s == "-") return -kPi;
    return parse_number(s) * kPi;
  }
  return parse_number(s);
}

void RunConfig::validate() const {
  if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("k must be positive");
  if (p < 1 || p > 6) throw ConfigError("p must lie in [1, 6]");
  if (n.empty()) throw ConfigError("at least one mesh size n is required");
  for (int v : n) {
    if (v < 1) throw ConfigError("n must be at least 1");
  }
  if (iterations < 0) throw ConfigError("iterations must be nonnegative");
  if (p_ref != -1 && (p_ref <= p || p_ref > 7)) {
    throw ConfigError("reference degree must lie in (p, 7]");
  }
  if (quad_degree != -1 && (quad_degree < 0 || quad_degree > kMaxQuadratureDegree)) {
    throw ConfigError("quadrature degree must lie in [0, 30]");
  }
  if (!inject.empty() && inject != "boundary-sign" && inject != "non-galerkin") {
    throw ConfigError("unknown fault '" + inject + "'");
  }
}

PlaneWaveRow run_plane_wave(double k, int p, int n, double nu, int quad_degree) {
  auto mesh = std::make_shared<const Mesh>(build_cartesian_mesh(n));
  const AnalyticField u = plane_wave(k, nu);
  HelmholtzProblem problem{mesh, p, k, {}, impedance_datum(u, k), quad_degree};
  const DiscreteField u_h = solve_helmholtz(problem);
  const ProjectedData data = project_data(problem);
  const FluxField flux = equilibrate(problem, u_h, data);

  const int qd = problem.data_quad_degree();
  PlaneWaveRow row;
  row.n = n;
  row.h = mesh_size(*mesh);
  row.p = p;
  row.k = k;
  EstimateReport& r = row.report;
  r.eta_k = eta_all(flux, u_h);
  r.osc_k = osc_all(problem, data);
  r.error_k = energy_error2_local(u, u_h, k, qd);
  for (double& e : r.error_k) e = std::sqrt(e);
  r.eta = root_sum_squares(r.eta_k);
  r.osc = root_sum_squares(r.osc_k);
  r.error = root_sum_squares(r.error_k);
  r.reference_norm = energy_norm(u, *mesh, k, qd);
  const DiscreteField ba = best_approximation(u, u_h.space, k, qd);
  r.ba_error = sum_sqrt(energy_error2_local(u, ba, k, qd));

  BoundContext context;
  context.kind = BoundCase::FreeSpace1b;
  context.k = k;
  context.h_omega = domain_diameter(*mesh);
  context.h = row.h;
  context.p = p;
  context.c_stab = c_stab(*mesh, Point(0.0, 0.0));
  r.c_ba = sigma_ba_bound(context);
  r.c_up = c_up_from(r.c_ba);

  row.defects = flux_defects(flux, u_h, data, k);
  return row;
}

std::string plane_wave_header() {
  return "n,h,p,k,E_fem,E_ba,E_est,E_est_guar,eff_est,eff_guar,eta,osc,c_ba,c_up";
}

std::string plane_wave_csv_row(const PlaneWaveRow& row) {
  const EstimateReport& r = row.report;
  std::ostringstream s;
  s << row.n << ',' << format_value(row.h) << ',' << row.p << ',' << format_value(row.k) << ','
    << format_optional(r.e_fem()) << ',' << format_optional(r.e_ba()) << ','
    << format_value(r.e_est()) << ',' << format_value(r.e_est_guaranteed()) << ','
    << format_optional(r.effectivity()) << ',' << format_optional(r.guaranteed_effectivity())
    << ',' << format_value(r.eta) << ',' << format_value(r.osc) << ',' << format_value(r.c_ba)
    << ',' << format_value(r.c_up);
  return s.str();
}

double scattering_c_up(const Mesh& mesh, double k) {
  BoundContext context;
  context.kind = BoundCase::Scattering1a;
  context.k = k;
  context.h_omega = domain_diameter(mesh);
  context.h = mesh_size(mesh);
  context.c_stab = c_stab(mesh, Point(0.0, 0.0));
  return c_up_from(sigma_ba_bound(context));
}

namespace {

VerifyCheck check_quadrature() {
  double worst = 0.0;
  for (int d = 0; d <= 20; ++d) {
    const TriangleRule& rule = triangle_rule(d);
    for (int a = 0; a <= d; ++a) {
      for (int b = 0; a + b <= d; ++b) {
        double sum = 0.0;
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
          sum += rule.weights[q] * std::pow(rule.points[q].x(), a) * std::pow(rule.points[q].y(), b);
        }
        const double exact = std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3);
        worst = std::max(worst, std::abs(sum - exact) / exact);
      }
    }
  }
  return {"quadrature exactness", worst <= 1e-12, "max relative error " + format_value(worst)};
}

VerifyCheck check_partition_of_unity() {
  double worst = 0.0;
  for (int p = 1; p <= 6; ++p) {
    const LagrangeTable& t = lagrange_table(p, 2 * p);
    worst = std::max(worst, (t.values.rowwise().sum().array() - 1.0).abs().maxCoeff());
    worst = std::max(worst, t.dx.rowwise().sum().cwiseAbs().maxCoeff());
    worst = std::max(worst, t.dy.rowwise().sum().cwiseAbs().maxCoeff());
  }
  const Mesh mesh = build_cartesian_mesh(3);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Point x(coord(rng), coord(rng));
    double sum = 0.0;
    for (int v = 0; v < mesh.num_vertices(); ++v) sum += hat_function(mesh, v, x).value;
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return {"partition of unity", worst <= 1e-12, "max deviation " + format_value(worst)};
}

struct Manufactured {
  HelmholtzProblem problem;
  AnalyticField u;
};

// u = x^2 y on (-1,1)^2 with absorbing boundary.
Manufactured manufactured_problem(int p, int n, double k) {
  Manufactured m;
  m.u.value = [](const Point& x) { return Complex(x.x() * x.x() * x.y()); };
  m.u.gradient = [](const Point& x) {
    return Vector2c(2.0 * x.x() * x.y(), x.x() * x.x());
  };
  auto mesh = std::make_shared<const Mesh>(build_cartesian_mesh(n));
  m.problem = HelmholtzProblem{mesh, p, k,
                               [k](const Point& x) {
                                 return Complex(-k * k * x.x() * x.x() * x.y() - 2.0 * x.y());
                               },
                               impedance_datum(m.u, k)};
  return m;
}

VerifyCheck check_manufactured() {
  const Manufactured m = manufactured_problem(3, 4, 2.0);
  const DiscreteField u_h = solve_helmholtz(m.problem);
  const ProjectedData data = project_data(m.problem);
  const FluxField flux = equilibrate(m.problem, u_h, data);
  const double eta = root_sum_squares(eta_all(flux, u_h));
  const double norm = energy_norm(u_h, m.problem.k);
  const double error = sum_sqrt(energy_error2_local(m.u, u_h, m.problem.k, 12));
  const double rel_eta = eta / norm;
  const double rel_error = error / norm;
  return {"manufactured solution", rel_eta <= 1e-8 && rel_error <= 1e-8,
          "eta " + format_value(rel_eta) + ", error " + format_value(rel_error)};
}

VerifyCheck check_projection() {
  const Manufactured m = manufactured_problem(2, 3, 3.0);
  HelmholtzProblem problem = m.problem;
  problem.f = [](const Point& x) { return std::exp(Complex(x.x(), 2.0 * x.y())); };
  problem.g = impedance_datum(plane_wave(5.0, 0.3), 5.0);
  const int p = problem.degree;
  const ProjectedData data = project_data(problem);
  const Mesh& mesh = *problem.mesh;
  const int qd = problem.data_quad_degree();
  double worst = 0.0;

  const TriangleRule& rule = triangle_rule(qd);
  const LagrangeTable& table = lagrange_table(p, qd);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const AffineMap map = affine_map(mesh, e);
    Eigen::VectorXcd moments = Eigen::VectorXcd::Zero(table.values.cols());
    double scale = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Complex f = problem.f(map.map(rule.points[q]));
      const Eigen::VectorXd phi = table.values.row(q).transpose();
      const Complex pf = phi.dot(data.f[e]);
      moments += rule.weights[q] * (f - pf) * phi;
      scale += rule.weights[q] * std::norm(f);
    }
    worst = std::max(worst, moments.cwiseAbs().maxCoeff() / std::sqrt(scale));
  }

  const EdgeRule& edge = edge_rule(qd);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (data.g[e].size() == 0) continue;
    const Point a = mesh.vertex(mesh.edge(e)[0]);
    const Point b = mesh.vertex(mesh.edge(e)[1]);
    const int element = mesh.edge_elements(e)[0];
    int local = 0;
    while (mesh.element_edge(element, local) != e) ++local;
    const Point normal = outward_normal(mesh, element, local);
    Eigen::VectorXcd moments = Eigen::VectorXcd::Zero(p + 1);
    double scale = 0.0;
    for (std::size_t q = 0; q < edge.points.size(); ++q) {
      const double t = edge.points[q];
      const Eigen::VectorXd phi = lagrange_1d(p, t);
      const Complex g = problem.g(a + t * (b - a), normal);
      const Complex pg = phi.dot(data.g[e]);
      moments += edge.weights[q] * (g - pg) * phi;
      scale += edge.weights[q] * std::norm(g);
    }
    worst = std::max(worst, moments.cwiseAbs().maxCoeff() / std::sqrt(scale));
  }
  return {"projection orthogonality", worst <= 1e-12, "max relative moment " + format_value(worst)};
}

struct PlaneWaveSetup {
  HelmholtzProblem problem;
  DiscreteField u_h;
  ProjectedData data;
};

PlaneWaveSetup plane_wave_setup(const std::string& inject) {
  const double k = 2.0 * kPi;
  auto mesh = std::make_shared<const Mesh>(build_cartesian_mesh(6));
  PlaneWaveSetup s;
  s.problem = HelmholtzProblem{mesh, 2, k, {}, impedance_datum(plane_wave(k, kPi / 3.0), k)};
  s.u_h = solve_helmholtz(s.problem);
  s.data = project_data(s.problem);
  if (inject == "non-galerkin") {
    const int centre = s.u_h.space->num_dofs() / 2;
    s.u_h.coefficients[centre] += Complex(0.05, -0.02);
  }
  return s;
}

VerifyCheck check_identities(const PlaneWaveSetup& s, const std::string& inject) {
  EquilibrationOptions options;
  options.rebalance_tolerance = std::numeric_limits<double>::infinity();
  if (inject == "boundary-sign") options.boundary_sign = -1.0;
  const FluxField flux = equilibrate(s.problem, s.u_h, s.data, options);
  const FluxDefects d = flux_defects(flux, s.u_h, s.data, s.problem.k);
  const double worst = std::max({d.divergence, d.boundary, d.jump});
  return {"flux identities", worst <= 1e-10,
          "divergence " + format_value(d.divergence) + ", trace " + format_value(d.boundary) +
              ", jump " + format_value(d.jump)};
}

VerifyCheck check_compatibility(const PlaneWaveSetup& s) {
  double worst = 0.0;
  for (int v = 0; v < s.problem.mesh->num_vertices(); ++v) {
    EquilibrationOptions options;
    options.rebalance_tolerance = std::numeric_limits<double>::infinity();
    const PatchProblem patch = build_patch_problem(v, s.u_h, s.data, s.problem.k, options);
    worst = std::max(worst, patch.compatibility_residual);
  }
  return {"patch compatibility", worst <= 1e-10, "max relative residual " + format_value(worst)};
}

template <class Check>
VerifyCheck guarded(const std::string& name, Check&& check) {
  try {
    return check();
  } catch (const std::exception& e) {
    return {name, false, std::string("error: ") + e.what()};
  }
}

}  // namespace

std::vector<VerifyCheck> run_verify(const std::string& inject) {
  std::vector<VerifyCheck> checks;
  checks.push_back(guarded("quadrature exactness", check_quadrature));
  checks.push_back(guarded("partition of unity", check_partition_of_unity));
  checks.push_back(guarded("manufactured solution", check_manufactured));
  checks.push_back(guarded("projection orthogonality", check_projection));
  const PlaneWaveSetup setup = plane_wave_setup(inject);
  checks.push_back(guarded("flux identities", [&] { return check_identities(setup, inject); }));
  checks.push_back(guarded("patch compatibility", [&] { return check_compatibility(setup); }));
  return checks;
}

namespace {

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ConfigError("cannot open '" + path + "' for writing");
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

int cmd_plane_wave(const RunConfig& config, std::ostream& out) {
  Output csv(config.out, out);
  *csv << plane_wave_header() << '\n';
  for (int n : config.n) {
    *csv << plane_wave_csv_row(run_plane_wave(config.k, config.p, n, config.nu, config.quad_degree))
         << '\n'
         << std::flush;
  }
  return 0;
}

void write_snapshot(const std::filesystem::path& dir, const AdaptState& state) {
  std::ostringstream stem;
  stem << "iter_" << std::setw(2) << std::setfill('0') << state.iteration;
  save_mesh(*state.mesh, dir / (stem.str() + ".mesh"));
  std::ofstream values(dir / (stem.str() + ".csv"));
  if (!values) throw ConfigError("cannot write snapshot to '" + dir.string() + "'");
  values << "elem,eta_K,e_K\n";
  const EstimateReport& r = state.report;
  for (std::size_t e = 0; e < r.eta_k.size(); ++e) {
    values << e << ',' << format_value(r.eta_k[e]) << ','
           << (e < r.error_k.size() ? format_value(r.error_k[e]) : std::string("nan")) << '\n';
  }
}

int cmd_scattering(const RunConfig& config, std::ostream& out) {
  const std::string path =
      config.mesh.empty() ? std::string(HELM_ASSET_DIR) + "/scattering.mesh" : config.mesh;
  auto mesh = std::make_shared<const Mesh>(load_mesh(path));
  const double k = config.k;
  HelmholtzProblem problem{mesh, config.p, k, {},
                           impedance_datum(plane_wave(k, config.nu), k), config.quad_degree};

  AdaptOptions options;
  options.iterations = config.iterations;
  options.reference_degree = config.p_ref;
  options.c_up = scattering_c_up(*mesh, k);
  if (!config.snapshots.empty()) std::filesystem::create_directories(config.snapshots);

  Output csv(config.out, out);
  *csv << "# mesh=" << path << '\n'
       << "# k=" << format_value(k) << " p=" << config.p
       << " p_ref=" << (config.p_ref > 0 ? config.p_ref : std::max(std::min(config.p + 3, 6), config.p + 1))
       << " nu=" << format_value(config.nu) << '\n'
       << "# c_stab=" << format_value(c_stab(*mesh, Point(0.0, 0.0)))
       << " c_up=" << format_value(options.c_up) << '\n'
       << "iter,n_elem,h_min,h_max,E_fem,E_est,eff,E_est_guar\n";
  options.on_iteration = [&](const AdaptState& state) {
    const EstimateReport& r = state.report;
    const auto e_fem = r.e_fem();
    const double eff = e_fem.value_or(0.0) > 0.0 ? r.e_est() / e_fem.value_or(1.0)
                                                 : std::numeric_limits<double>::quiet_NaN();
    *csv << state.iteration << ',' << state.mesh->num_elements() << ','
         << format_value(state.h_min) << ',' << format_value(state.h_max) << ','
         << format_optional(e_fem) << ',' << format_value(r.e_est()) << ','
         << format_value(eff) << ',' << format_value(r.e_est_guaranteed()) << '\n'
         << std::flush;
    if (!config.snapshots.empty()) write_snapshot(config.snapshots, state);
  };
  adapt_loop(problem, options);
  return 0;
}

int cmd_verify(const RunConfig& config, std::ostream& out) {
  bool ok = true;
  for (const VerifyCheck& c : run_verify(config.inject)) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
    ok = ok && c.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite element Helmholtz solver with equilibrated-flux error estimates"};
  app.require_subcommand(1);
  RunConfig config;
  std::string k_text;
  std::string nu_text;

  auto common = [&](CLI::App* sub, const std::string& k_default) {
    sub->add_option("--k", k_text, "wavenumber, e.g. 3.5, pi, 10pi")->default_str(k_default);
    sub->add_option("--p", config.p, "polynomial degree (1-6)")->capture_default_str();
    sub->add_option("--out", config.out, "CSV output file (default: stdout)");
    sub->add_option("--quad-degree", config.quad_degree, "quadrature degree for the data integrals");
    sub->add_option("--nu", nu_text, "incidence angle of the plane wave")->default_str("pi/3");
  };

  CLI::App* plane = app.add_subcommand("plane-wave", "plane-wave sweep on Cartesian meshes of (-1,1)^2");
  common(plane, "pi");
  plane->add_option("--n", config.n, "mesh subdivisions per side")->delimiter(',')->capture_default_str();

  CLI::App* scatter = app.add_subcommand("scattering", "adaptive run on the scattering geometry");
  common(scatter, "2pi");
  scatter->add_option("--mesh", config.mesh, "initial mesh (default: bundled asset)");
  scatter->add_option("--iters", config.iterations, "refinement iterations")->capture_default_str();
  scatter->add_option("--pref", config.p_ref, "reference degree (default max(min(p+3,6),p+1))");
  scatter->add_option("--snapshots", config.snapshots, "directory for per-iteration mesh and element data");

  CLI::App* verify = app.add_subcommand("verify", "run the self-check suite");
  verify->add_option("--inject", config.inject, "deliberate fault: boundary-sign or non-galerkin");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (plane->parsed()) config.command = "plane-wave";
    if (scatter->parsed()) config.command = "scattering";
    if (verify->parsed()) config.command = "verify";
    if (!k_text.empty()) config.k = parse_wavenumber(k_text);
    else if (config.command == "scattering") config.k = 2.0 * kPi;
    if (!nu_text.empty()) {
      const auto slash = nu_text.find('/');
      config.nu = slash == std::string::npos
                      ? parse_wavenumber(nu_text)
                      : parse_wavenumber(nu_text.substr(0, slash)) /
                            parse_number(trim(nu_text.substr(slash + 1)));
    }
    config.validate();
    if (config.command == "plane-wave") return cmd_plane_wave(config, out);
    if (config.command == "scattering") return cmd_scattering(config, out);
    return cmd_verify(config, out);
  } catch (const std::exception& e) {
    err << "helm: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace helm
