// Copyright 2026 The helm Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <numeric>

#include "helm/quadrature.hpp"

using namespace helm;

namespace {

// a! b! / (a+b+2)! as an exact fraction reduced before conversion.
double monomial_integral(int a, int b) {
  // Compute with exact binomials: 1 / ((a+b+2)(a+b+1) C(a+b, a)).
  long double binom = 1.0L;
  for (int i = 1; i <= a; ++i) binom = binom * (b + i) / i;
  return static_cast<double>(1.0L / ((a + b + 2.0L) * (a + b + 1.0L) * binom));
}

double evaluate(const TriangleRule& rule, int a, int b) {
  long double sum = 0.0L;
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    sum += rule.weights[q] * std::pow(static_cast<long double>(rule.points[q].x()), a) *
           std::pow(static_cast<long double>(rule.points[q].y()), b);
  }
  return static_cast<double>(sum);
}

}  // namespace

TEST_CASE("monomial oracle matches hand values") {
  CHECK(monomial_integral(0, 0) == doctest::Approx(0.5));
  CHECK(monomial_integral(1, 0) == doctest::Approx(1.0 / 6.0));
  CHECK(monomial_integral(1, 1) == doctest::Approx(1.0 / 24.0));
  CHECK(monomial_integral(2, 3) == doctest::Approx(2.0 * 6.0 / 5040.0));
}

TEST_CASE("triangle rules integrate every monomial up to their degree") {
  for (int d = 0; d <= kMaxQuadratureDegree; ++d) {
    const TriangleRule& rule = triangle_rule(d);
    CHECK(rule.exact_degree >= d);
    double weight_sum = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
    CHECK(weight_sum == doctest::Approx(0.5).epsilon(1e-14));
    for (int a = 0; a <= d; ++a) {
      for (int b = 0; a + b <= d; ++b) {
        const double exact = monomial_integral(a, b);
        INFO("degree " << d << " monomial x^" << a << " y^" << b);
        CHECK(std::abs(evaluate(rule, a, b) - exact) <= 1e-12 * exact);
      }
    }
  }
}

TEST_CASE("triangle rule points lie in the reference triangle with positive weights") {
  for (int d = 0; d <= kMaxQuadratureDegree; ++d) {
    const TriangleRule& rule = triangle_rule(d);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      CHECK(rule.weights[q] > 0.0);
      CHECK(rule.points[q].x() >= 0.0);
      CHECK(rule.points[q].y() >= 0.0);
      CHECK(rule.points[q].sum() <= 1.0 + 1e-15);
    }
  }
}

TEST_CASE("edge rules integrate powers exactly") {
  for (int d = 0; d <= kMaxQuadratureDegree; ++d) {
    const EdgeRule& rule = edge_rule(d);
    for (int a = 0; a <= d; ++a) {
      double sum = 0.0;
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        sum += rule.weights[q] * std::pow(rule.points[q], a);
      }
      CHECK(sum == doctest::Approx(1.0 / (a + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("out-of-range degrees are rejected") {
  CHECK_THROWS_AS(triangle_rule(-1), QuadratureError);
  CHECK_THROWS_AS(triangle_rule(kMaxQuadratureDegree + 1), QuadratureError);
  CHECK_THROWS_AS(edge_rule(kMaxQuadratureDegree + 1), QuadratureError);
}

TEST_CASE("rules are cached") {
  CHECK(&triangle_rule(7) == &triangle_rule(7));
  CHECK(&edge_rule(4) == &edge_rule(4));
}
