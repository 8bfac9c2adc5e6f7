// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#include "helm/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace helm {
namespace {

struct EdgeFrame {
  Point a, b, n;
  BoundaryTag tag;
};

std::vector<EdgeFrame> boundary_frames(const Mesh& mesh) {
  std::vector<EdgeFrame> out;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto tag = mesh.edge_tag(e);
    if (!tag) continue;
    const int k = mesh.edge_elements(e)[0];
    int le = 0;
    while (mesh.element_edge(k, le) != e) ++le;
    out.push_back({mesh.vertex(mesh.edge(e)[0]), mesh.vertex(mesh.edge(e)[1]),
                   outward_normal(mesh, k, le), *tag});
  }
  return out;
}

void check_nonnegative(double t) {
  if (!(t >= 0.0)) throw BoundsError("argument must be nonnegative");
}

double s_of(double t) { return 0.5 + std::sqrt(0.25 + t * t); }

}  // namespace

bool star_point_admissible(const Mesh& mesh, const Point& x0) {
  for (const EdgeFrame& f : boundary_frames(mesh)) {
    for (const Point& x : {f.a, f.b}) {
      const double dn = (x - x0).dot(f.n);
      if (f.tag == BoundaryTag::Dirichlet ? dn > 0.0 : !(dn > 0.0)) return false;
    }
  }
  return true;
}

double c_stab(const Mesh& mesh, const Point& x0) {
  if (!star_point_admissible(mesh, x0)) {
    throw BoundsError("star point (" + std::to_string(x0.x()) + ", " + std::to_string(x0.y()) +
                      ") violates (x - x0).n <= 0 on Gamma_D or > 0 on Gamma_A");
  }
  double radius = 0.0;
  for (const Point& v : mesh.vertices()) radius = std::max(radius, (v - x0).norm());
  double boundary = 0.0;
  for (const EdgeFrame& f : boundary_frames(mesh)) {
    if (f.tag != BoundaryTag::Absorbing) continue;
    for (const Point& x : {f.a, f.b}) {
      const Point r = x - x0;
      const double dn = r.dot(f.n);
      const double cross = r.x() * f.n.y() - r.y() * f.n.x();
      boundary = std::max(boundary, 2.0 * dn + cross * cross / dn);
    }
  }
  return (radius + boundary) / domain_diameter(mesh);
}

double sigma_ba_bound(const BoundContext& c) {
  constexpr int d = 2;
  if (!(c.k > 0.0)) throw BoundsError("wavenumber must be positive");
  const double scale = c.beta == 0.0 ? 1.0 : std::pow(static_cast<double>(c.p), c.beta);
  switch (c.kind) {
    case BoundCase::Scattering1a: {
      const double a = (d - 1) + c.c_stab * c.k * c.h_omega;
      return std::sqrt(a + a * a);
    }
    case BoundCase::FreeSpace1b:
      return c.c_i * (d + c.c_stab * c.k * c.h_omega) * c.k * c.h / scale;
    case BoundCase::Interior2a:
    case BoundCase::InteriorConvex2b: {
      if (c.eigenvalues.empty()) throw BoundsError("interior bounds need Dirichlet eigenvalues");
      const double k2 = c.k * c.k;
      double max_ratio = 0.0;
      double min_gap = std::numeric_limits<double>::infinity();
      for (double lambda : c.eigenvalues) {
        const double gap = std::abs(lambda - k2);
        if (gap <= 1e-12 * std::max(lambda, k2)) {
          throw BoundsError("k^2 coincides with a Dirichlet eigenvalue; the bound is unbounded");
        }
        max_ratio = std::max(max_ratio, std::sqrt(lambda) / gap);
        min_gap = std::min(min_gap, gap);
      }
      if (c.kind == BoundCase::Interior2a) return c.k * max_ratio;
      return c.c_i * (1.0 + k2 / min_gap) * c.k * c.h / scale;
    }
  }
  return 0.0;
}

std::vector<double> rectangle_eigenvalues(double a, double b, int count) {
  if (!(a > 0.0) || !(b > 0.0)) throw BoundsError("rectangle sides must be positive");
  if (count <= 0) return {};
  // The count-th eigenvalue is at most that of the first `count` modes of
  // either family, which bounds the index range to enumerate.
  const double bound = kPi * kPi * (double(count) * count / (a * a) + 1.0 / (b * b));
  const int mmax = static_cast<int>(std::ceil(a * std::sqrt(bound) / kPi)) + 1;
  const int nmax = static_cast<int>(std::ceil(b * std::sqrt(bound) / kPi)) + 1;
  std::vector<double> values;
  for (int m = 1; m <= mmax; ++m) {
    for (int n = 1; n <= nmax; ++n) {
      const double l = kPi * kPi * (double(m) * m / (a * a) + double(n) * n / (b * b));
      if (l <= bound * (1.0 + 1e-12)) values.push_back(l);
    }
  }
  std::sort(values.begin(), values.end());
  if (static_cast<int>(values.size()) > count) values.resize(count);
  return values;
}

double theta_1(double t) {
  check_nonnegative(t);
  return std::sqrt(2.0 * t + 2.0 * t * t);
}

double theta_2(double t, double t_tilde) {
  check_nonnegative(t);
  check_nonnegative(t_tilde);
  return std::sqrt(t + 2.0 * t * t + t_tilde * t_tilde);
}

double theta_tilde_1(double t) {
  check_nonnegative(t);
  const double s = s_of(t);
  return std::sqrt(s + s * s + t * t) - std::sqrt(2.0);
}

double theta_tilde_2(double t, double t_tilde) {
  check_nonnegative(t);
  check_nonnegative(t_tilde);
  const double s = s_of(t);
  return std::sqrt(s * s + t * t + t_tilde * t_tilde) - 1.0;
}

double c_up_from(double t) { return std::sqrt(2.0) + theta_tilde_1(t); }

double c_up_from(double t, double t_tilde) {
  return std::min(c_up_from(t), 1.0 + theta_tilde_2(t, t_tilde));
}

}  // namespace helm
