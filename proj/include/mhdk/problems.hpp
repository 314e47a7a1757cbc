#pragma once

#include "mhdk/types.hpp"

#include <optional>
#include <string>

namespace mhdk {

struct ExactSolution {
  VectorField J;
  ScalarField phi;
  VectorField A;
  ScalarField r;
  VectorField curl_A;  // B = curl A
};

// Steady kinematics problem in current / potential / vector-potential form:
//   sigma^{-1} J + grad phi - w x curl A = f,   div J = 0,
//   -J + Rm^{-1} curl curl A + grad r = g,      div A = 0,
// with phi = phi_w and A x n = A_w x n on the boundary.
struct ProblemSpec {
  std::string name;
  double sigma = 1.0;
  double rm = 1.0;
  VectorField w;
  VectorField f;
  VectorField g;
  ScalarField phi_w;
  VectorField A_w;
  std::optional<ExactSolution> exact;

  double eta() const { return 1.0 / sigma; }
  double nu_m() const { return 1.0 / rm; }
};

// Manufactured test without flow: J = (sin y, 0, x^2), phi = z,
// A = (0, cos x, 0), r = 0, w = 0.
ProblemSpec example1(double sigma = 1.0, double rm = 1.0);
// Same exact fields with w = (x, y, z).
ProblemSpec example2(double sigma = 1.0, double rm = 1.0);
// Swirling flow in an applied field B_s = (1,0,0), already lifted:
// f = w x B_s, g = 0, homogeneous boundary data, no exact solution.
ProblemSpec example3(double rm, double sigma = 1.0);

ProblemSpec example_by_id(int id, double sigma, double rm);

// Velocity of example 3, defined as zero on the z-axis.
Vec3 swirl_velocity(const Vec3& x);

struct AppliedFieldLifting {
  VectorField A_s;
  // Source corrections for a given velocity: f += w x B_s, g += 0.
  VectorField f_add;
  VectorField g_add;
};

// Closed-form vector potential A_s = (b2 z, b3 x, b1 y) with curl A_s = B_s.
AppliedFieldLifting lift_applied_field(const Vec3& b_s, const VectorField& w);
// Rejects fields that are not constant over the unit cube.
AppliedFieldLifting lift_applied_field(const VectorField& b_s, const VectorField& w);

}  // namespace mhdk
