#pragma once

#include "mhdk/types.hpp"

#include <random>

namespace mhdk::test {

// Uniform random point in the unit cube (deterministic seed per caller).
inline Vec3 random_point(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {u(rng), u(rng), u(rng)};
}

inline Eigen::VectorXd random_vector(std::mt19937& rng, Index n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

// Point of the reference tetrahedron from barycentric-ish random weights.
inline Vec3 random_reference_point(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
  const double s = a + b + c + d;
  return {b / s, c / s, d / s};
}

}  // namespace mhdk::test
