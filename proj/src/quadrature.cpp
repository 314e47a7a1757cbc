#include "mhdk/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mhdk {

namespace {

// Jacobi polynomial P_n^{(alpha,0)} and its derivative on [-1,1].
void jacobi(int n, double alpha, double x, double& p, double& dp) {
  double p0 = 1.0;
  double p1 = 0.5 * (alpha + 2.0) * x + 0.5 * alpha;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double a = alpha;
    const double c = 2.0 * k + a;
    const double a1 = 2.0 * k * (k + a) * (c - 2.0);
    const double a2 = (c - 1.0) * a * a;
    const double a3 = (c - 2.0) * (c - 1.0) * c;
    const double a4 = 2.0 * (k + a - 1.0) * (k - 1.0) * c;
    const double p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  // (2n+a)(1-x^2) P_n' = n(a - (2n+a)x) P_n + 2n(n+a) P_{n-1}
  const double a = alpha;
  const double nn = n;
  const double c = 2.0 * nn + a;
  dp = (nn * (a - c * x) * p1 + 2.0 * (nn + a) * nn * p0) / (c * (1.0 - x * x));
}

int points_for(int degree) { return (degree + 2) / 2; }

}  // namespace

void gauss_jacobi_unit(int m, int alpha, std::vector<double>& nodes,
                       std::vector<double>& weights) {
  nodes.assign(m, 0.0);
  weights.assign(m, 0.0);
  const double a = alpha;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-like initial guess, then Newton with deflation of found roots.
    double x = -std::cos((2.0 * i + 1.0) * std::numbers::pi / (2.0 * m));
    for (int it = 0; it < 100; ++it) {
      double p = 0.0;
      double dp = 0.0;
      jacobi(m, a, x, p, dp);
      double deflate = 0.0;
      for (int j = 0; j < i; ++j) deflate += 1.0 / (x - nodes[j]);
      const double dx = p / (dp - deflate * p);
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = x;
  }
  // Weight formula for P_m^{(a,0)}: 2^{a+1} Gamma(m+a+1) Gamma(m+1) /
  // (Gamma(m+a+1) m!) / ((1-x^2) P'(x)^2) = 2^{a+1} / ((1-x^2) P'(x)^2).
  for (int i = 0; i < m; ++i) {
    double p = 0.0;
    double dp = 0.0;
    jacobi(m, a, nodes[i], p, dp);
    const double w = std::pow(2.0, a + 1.0) / ((1.0 - nodes[i] * nodes[i]) * dp * dp);
    // map [-1,1] with (1-x)^a to [0,1] with (1-u)^a
    weights[i] = w / std::pow(2.0, a + 1.0);
    nodes[i] = 0.5 * (nodes[i] + 1.0);
  }
}

QuadratureRule tet_rule(int degree) {
  if (degree != 1 && degree != 2 && degree != 4 && degree != 6) {
    throw InvalidArgument("tet_rule: unsupported degree " + std::to_string(degree));
  }
  const int m = points_for(degree);
  std::vector<double> u, wu, v, wv, w, ww;
  gauss_jacobi_unit(m, 2, u, wu);
  gauss_jacobi_unit(m, 1, v, wv);
  gauss_jacobi_unit(m, 0, w, ww);
  QuadratureRule rule;
  rule.degree = degree;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        const double x = u[i];
        const double y = (1.0 - u[i]) * v[j];
        const double z = (1.0 - u[i]) * (1.0 - v[j]) * w[k];
        rule.points.emplace_back(x, y, z);
        rule.weights.push_back(wu[i] * wv[j] * ww[k]);
      }
    }
  }
  return rule;
}

QuadratureRule triangle_rule(int degree) {
  if (degree < 0) throw InvalidArgument("triangle_rule: negative degree");
  const int m = points_for(degree);
  std::vector<double> u, wu, v, wv;
  gauss_jacobi_unit(m, 1, u, wu);
  gauss_jacobi_unit(m, 0, v, wv);
  QuadratureRule rule;
  rule.degree = degree;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      rule.points.emplace_back(u[i], (1.0 - u[i]) * v[j], 0.0);
      rule.weights.push_back(wu[i] * wv[j]);
    }
  }
  return rule;
}

QuadratureRule segment_rule(int degree) {
  if (degree < 0) throw InvalidArgument("segment_rule: negative degree");
  const int m = points_for(degree);
  std::vector<double> u, wu;
  gauss_jacobi_unit(m, 0, u, wu);
  QuadratureRule rule;
  rule.degree = degree;
  for (int i = 0; i < m; ++i) {
    rule.points.emplace_back(u[i], 0.0, 0.0);
    rule.weights.push_back(wu[i]);
  }
  return rule;
}

const QuadratureRule& default_tet_rule() {
  static const QuadratureRule rule = tet_rule(6);
  return rule;
}

const QuadratureRule& default_triangle_rule() {
  static const QuadratureRule rule = triangle_rule(11);
  return rule;
}

const QuadratureRule& default_segment_rule() {
  static const QuadratureRule rule = segment_rule(11);
  return rule;
}

}  // namespace mhdk
