#include "mhdk/problems.hpp"

#include <array>
#include <cmath>
#include <string>

namespace mhdk {

namespace {

ExactSolution manufactured_fields() {
  ExactSolution e;
  e.J = [](const Vec3& x) { return Vec3(std::sin(x.y()), 0.0, x.x() * x.x()); };
  e.phi = [](const Vec3& x) { return x.z(); };
  e.A = [](const Vec3& x) { return Vec3(0.0, std::cos(x.x()), 0.0); };
  e.r = [](const Vec3&) { return 0.0; };
  e.curl_A = [](const Vec3& x) { return Vec3(0.0, 0.0, -std::sin(x.x())); };
  return e;
}

// Builds f and g from the exact fields so that both strong equations hold.
ProblemSpec manufactured(std::string name, double sigma, double rm, VectorField w) {
  if (!(sigma > 0.0) || !(rm > 0.0)) throw InvalidArgument("sigma and Rm must be positive");
  ProblemSpec p;
  p.name = std::move(name);
  p.sigma = sigma;
  p.rm = rm;
  p.w = std::move(w);
  p.exact = manufactured_fields();
  const double eta = 1.0 / sigma;
  const double nu = 1.0 / rm;
  auto wf = p.w;
  p.f = [eta, wf](const Vec3& x) {
    const Vec3 j(std::sin(x.y()), 0.0, x.x() * x.x());
    const Vec3 grad_phi(0.0, 0.0, 1.0);
    const Vec3 b(0.0, 0.0, -std::sin(x.x()));
    return Vec3(eta * j + grad_phi - wf(x).cross(b));
  };
  // curl curl (0, cos x, 0) = (0, cos x, 0)
  p.g = [nu](const Vec3& x) {
    const Vec3 j(std::sin(x.y()), 0.0, x.x() * x.x());
    return Vec3(-j + nu * Vec3(0.0, std::cos(x.x()), 0.0));
  };
  p.phi_w = p.exact->phi;
  p.A_w = p.exact->A;
  return p;
}

}  // namespace

ProblemSpec example1(double sigma, double rm) {
  return manufactured("example1", sigma, rm, [](const Vec3&) { return Vec3::Zero().eval(); });
}

ProblemSpec example2(double sigma, double rm) {
  return manufactured("example2", sigma, rm, [](const Vec3& x) { return x; });
}

Vec3 swirl_velocity(const Vec3& x) {
  const double r2 = x.x() * x.x() + x.y() * x.y();
  if (r2 < 1e-28) return Vec3::Zero();
  const double r = std::sqrt(r2);
  const double amp = 16.0 * x.x() * (1.0 - x.x()) * x.y() * (1.0 - x.y());
  const double cos_t = x.x() / r;
  const double sin_t = x.y() / r;
  return {-amp * sin_t, amp * cos_t, 0.0};
}

ProblemSpec example3(double rm, double sigma) {
  if (!(sigma > 0.0) || !(rm > 0.0)) throw InvalidArgument("sigma and Rm must be positive");
  ProblemSpec p;
  p.name = "example3";
  p.sigma = sigma;
  p.rm = rm;
  p.w = swirl_velocity;
  const AppliedFieldLifting lift = lift_applied_field(Vec3(1.0, 0.0, 0.0), p.w);
  p.f = lift.f_add;
  p.g = lift.g_add;
  p.phi_w = [](const Vec3&) { return 0.0; };
  p.A_w = [](const Vec3&) { return Vec3::Zero().eval(); };
  return p;
}

ProblemSpec example_by_id(int id, double sigma, double rm) {
  switch (id) {
    case 1: return example1(sigma, rm);
    case 2: return example2(sigma, rm);
    case 3: return example3(rm, sigma);
    default: throw InvalidArgument("unknown example id " + std::to_string(id) + " (expected 1, 2 or 3)");
  }
}

AppliedFieldLifting lift_applied_field(const Vec3& b_s, const VectorField& w) {
  AppliedFieldLifting out;
  out.A_s = [b_s](const Vec3& x) { return Vec3(b_s.y() * x.z(), b_s.z() * x.x(), b_s.x() * x.y()); };
  out.f_add = [b_s, w](const Vec3& x) { return Vec3(w(x).cross(b_s)); };
  // -Rm^{-1} curl B_s vanishes for constant B_s.
  out.g_add = [](const Vec3&) { return Vec3::Zero().eval(); };
  return out;
}

AppliedFieldLifting lift_applied_field(const VectorField& b_s, const VectorField& w) {
  const Vec3 b0 = b_s(Vec3::Zero());
  for (int i = 0; i <= 4; ++i) {
    for (int j = 0; j <= 4; ++j) {
      for (int k = 0; k <= 4; ++k) {
        const Vec3 x(0.25 * i, 0.25 * j, 0.25 * k);
        if ((b_s(x) - b0).norm() > 1e-14 * (1.0 + b0.norm())) {
          throw InvalidArgument("lift_applied_field: applied field must be constant");
        }
      }
    }
  }
  return lift_applied_field(b0, w);
}

}  // namespace mhdk
