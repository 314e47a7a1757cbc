#include <doctest.h>

#include "mhdk/quadrature.hpp"

#include <cmath>

using namespace mhdk;

namespace {

double factorial(int k) { return std::tgamma(k + 1.0); }

// Exact monomial integrals over the reference simplices.
double tet_monomial(int a, int b, int c) {
  return factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3);
}
double triangle_monomial(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

double integrate(const QuadratureRule& rule, int a, int b, int c) {
  double s = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Vec3& x = rule.points[q];
    s += rule.weights[q] * std::pow(x.x(), a) * std::pow(x.y(), b) * std::pow(x.z(), c);
  }
  return s;
}

}  // namespace

TEST_CASE("tetrahedral rules integrate monomials up to their degree") {
  for (int deg : {1, 2, 4, 6}) {
    CAPTURE(deg);
    const QuadratureRule rule = tet_rule(deg);
    CHECK(rule.degree == deg);
    for (int a = 0; a <= deg; ++a) {
      for (int b = 0; a + b <= deg; ++b) {
        for (int c = 0; a + b + c <= deg; ++c) {
          CAPTURE(a);
          CAPTURE(b);
          CAPTURE(c);
          CHECK(std::abs(integrate(rule, a, b, c) - tet_monomial(a, b, c)) < 1e-14);
        }
      }
    }
  }
}

TEST_CASE("degree six rule is not exact beyond its degree") {
  const QuadratureRule rule = tet_rule(6);
  double worst = 0.0;
  for (int a = 0; a <= 10; ++a) {
    for (int b = 0; a + b <= 10; ++b) {
      const int c = 10 - a - b;
      worst = std::max(worst, std::abs(integrate(rule, a, b, c) - tet_monomial(a, b, c)));
    }
  }
  CHECK(worst > 1e-12);
}

TEST_CASE("tetrahedral rules have positive weights inside the cell") {
  for (int deg : {1, 2, 4, 6}) {
    const QuadratureRule rule = tet_rule(deg);
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      CHECK(rule.weights[q] > 0.0);
      const Vec3& x = rule.points[q];
      CHECK(x.minCoeff() > 0.0);
      CHECK(x.sum() < 1.0);
      sum += rule.weights[q];
    }
    CHECK(sum == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  }
  CHECK_THROWS_AS(tet_rule(3), InvalidArgument);
  CHECK_THROWS_AS(tet_rule(0), InvalidArgument);
  CHECK(&default_tet_rule() == &default_tet_rule());
  CHECK(default_tet_rule().degree == 6);
}

TEST_CASE("triangle and segment rules") {
  for (int deg : {1, 3, 5, 11}) {
    const QuadratureRule tri = triangle_rule(deg);
    for (int a = 0; a <= deg; ++a) {
      for (int b = 0; a + b <= deg; ++b) {
        CHECK(std::abs(integrate(tri, a, b, 0) - triangle_monomial(a, b)) < 1e-14);
      }
    }
    const QuadratureRule seg = segment_rule(deg);
    for (int a = 0; a <= deg; ++a) CHECK(std::abs(integrate(seg, a, 0, 0) - 1.0 / (a + 1)) < 1e-14);
  }
  CHECK(default_triangle_rule().degree == 11);
  CHECK(default_segment_rule().degree == 11);
  CHECK_THROWS_AS(triangle_rule(-1), InvalidArgument);
}

TEST_CASE("gauss jacobi nodes are distinct and lie in the open interval") {
  for (int alpha : {0, 1, 2}) {
    for (int m : {1, 2, 5, 8}) {
      std::vector<double> x, w;
      gauss_jacobi_unit(m, alpha, x, w);
      REQUIRE(x.size() == static_cast<std::size_t>(m));
      double moment0 = 0.0;
      for (int i = 0; i < m; ++i) {
        CHECK(x[i] > 0.0);
        CHECK(x[i] < 1.0);
        for (int k = 0; k < i; ++k) CHECK(std::abs(x[i] - x[k]) > 1e-8);
        moment0 += w[i];
      }
      // integral of (1-u)^alpha over [0,1]
      CHECK(moment0 == doctest::Approx(1.0 / (alpha + 1)).epsilon(1e-14));
    }
  }
}
