// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#include "helm/quadrature.hpp"

#include <array>
#include <cmath>

namespace helm {
namespace {

// Gauss-Legendre nodes and weights on [0,1] by Newton iteration on P_n.
EdgeRule gauss_legendre(int n) {
  EdgeRule rule;
  rule.exact_degree = 2 * n - 1;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.points[n - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

struct SymmetricBuilder {
  TriangleRule rule;

  // Barycentric (l0, l1, l2) maps to reference (l1, l2).
  void add(double l1, double l2, double w) {
    rule.points.emplace_back(l1, l2);
    rule.weights.push_back(0.5 * w);
  }
  void centroid(double w) { add(1.0 / 3.0, 1.0 / 3.0, w); }
  void orbit3(double a, double w) {
    const double c = 1.0 - 2.0 * a;
    add(a, a, w);
    add(c, a, w);
    add(a, c, w);
  }
  void orbit6(double a, double b, double w) {
    const double c = 1.0 - a - b;
    add(a, b, w);
    add(b, a, w);
    add(a, c, w);
    add(c, a, w);
    add(b, c, w);
    add(c, b, w);
  }
};

// Symmetric rules with positive weights and interior points (Dunavant 1985).
// Weights below are normalized to sum to 1 and halved on insertion.
bool symmetric_rule(int degree, TriangleRule& out) {
  SymmetricBuilder b;
  switch (degree) {
    case 1:
      b.centroid(1.0);
      break;
    case 2:
      b.orbit3(1.0 / 6.0, 1.0 / 3.0);
      break;
    case 4:
      b.orbit3(0.44594849091596488631832925388305, 0.22338158967801146569500700843312);
      b.orbit3(0.09157621350977074345957146340220, 0.10995174365532186763832632490021);
      break;
    case 5:
      b.centroid(0.225);
      b.orbit3(0.47014206410511508977044120951345, 0.13239415278850618073764938783315);
      b.orbit3(0.10128650732345633880098736191512, 0.12593918054482715259568394550018);
      break;
    case 6:
      b.orbit3(0.24928674517091042129163855310702, 0.11678627572637936602528961138558);
      b.orbit3(0.06308901449150222834033160287082, 0.05084490637020681692093680910686);
      b.orbit6(0.31035245103378440541660773395655, 0.63650249912139864723014259441205,
               0.08285107561837357519355345642044);
      break;
    case 8:
      b.centroid(0.14431560767778716825109111048906);
      b.orbit3(0.17056930775176020662229350149146, 0.10321737053471825028179155029212);
      b.orbit3(0.05054722831703097545842355059660, 0.03245849762319808031092592834178);
      b.orbit3(0.45929258829272315602881551449417, 0.09509163426728462479389610438858);
      b.orbit6(0.26311282963463811342178578628464, 0.72849239295540428124100037917606,
               0.02723031417443499426484469007390);
      break;
    case 9:
      b.centroid(0.09713579628279609890744676309485);
      b.orbit3(0.48968251919873762778370692483619, 0.03133470022713983234393199080984);
      b.orbit3(0.43708959149293663726993036443535, 0.07782754100477543338465495857972);
      b.orbit3(0.18820353561903273024096128046733, 0.07964773892720910288013526957424);
      b.orbit3(0.04472951339445297061024247196780, 0.02557767565869810438673914467637);
      b.orbit6(0.22196298916076569567510252769319, 0.74119859878449802069007987352342,
               0.04328353937728937728937728937729);
      break;
    default:
      return false;
  }
  b.rule.exact_degree = degree;
  out = std::move(b.rule);
  return true;
}

// Collapsed tensor Gauss rule; the Duffy Jacobian adds one degree in the
// collapsed direction.
TriangleRule duffy_rule(int degree) {
  const int n = (degree + 2 + 1) / 2;
  const EdgeRule g = gauss_legendre(n);
  TriangleRule rule;
  rule.exact_degree = 2 * n - 2;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double u = g.points[i];
      const double v = g.points[j];
      rule.points.emplace_back(u, v * (1.0 - u));
      rule.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - u));
    }
  }
  return rule;
}

struct Tables {
  std::array<TriangleRule, kMaxQuadratureDegree + 1> triangle;
  std::array<EdgeRule, kMaxQuadratureDegree + 1> edge;

  Tables() {
    for (int d = 0; d <= kMaxQuadratureDegree; ++d) {
      int sym = d;
      if (sym == 0) sym = 1;
      if (sym == 3) sym = 4;
      if (sym == 7) sym = 8;
      if (!symmetric_rule(sym, triangle[d])) triangle[d] = duffy_rule(d);
      edge[d] = gauss_legendre(d / 2 + 1);
    }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

void check_degree(int degree) {
  if (degree < 0 || degree > kMaxQuadratureDegree) {
    throw QuadratureError("unsupported quadrature degree " + std::to_string(degree));
  }
}

}  // namespace

const TriangleRule& triangle_rule(int degree) {
  check_degree(degree);
  return tables().triangle[degree];
}

const EdgeRule& edge_rule(int degree) {
  check_degree(degree);
  return tables().edge[degree];
}

}  // namespace helm
