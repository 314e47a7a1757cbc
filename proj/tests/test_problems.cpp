#include <doctest.h>

#include "mhdk/problems.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace mhdk;

namespace {

// Fourth-order central differences.
constexpr double kStep = 1e-3;

template <class Field>
auto partial(const Field& u, const Vec3& x, int d) {
  Vec3 e = Vec3::Zero();
  e[d] = kStep;
  return (8.0 * (u(x + e) - u(x - e)) - (u(x + 2 * e) - u(x - 2 * e))) / (12.0 * kStep);
}

Vec3 fd_grad(const ScalarField& u, const Vec3& x) { return {partial(u, x, 0), partial(u, x, 1), partial(u, x, 2)}; }

Vec3 fd_curl(const VectorField& u, const Vec3& x) {
  const Vec3 dx = partial(u, x, 0), dy = partial(u, x, 1), dz = partial(u, x, 2);
  return {dy.z() - dz.y(), dz.x() - dx.z(), dx.y() - dy.x()};
}

double fd_div(const VectorField& u, const Vec3& x) {
  return partial(u, x, 0).x() + partial(u, x, 1).y() + partial(u, x, 2).z();
}

Vec3 interior_point(std::mt19937& rng) { return Vec3::Constant(0.05) + 0.9 * test::random_point(rng); }

}  // namespace

TEST_CASE("example 1 sources") {
  const ProblemSpec p = example1();
  CHECK((p.f(Vec3::Zero()) - Vec3(0, 0, 1)).norm() < 1e-15);
  CHECK((p.g(Vec3::Zero()) - Vec3(0, 1, 0)).norm() < 1e-15);
  CHECK(p.sigma == 1.0);
  CHECK(p.rm == 1.0);
  REQUIRE(p.exact);
  CHECK(p.w(Vec3(0.3, 0.2, 0.9)).norm() == 0.0);
  std::mt19937 rng(1);
  for (int k = 0; k < 20; ++k) {
    const Vec3 x = test::random_point(rng);
    const Vec3 expected_f(std::sin(x.y()), 0.0, x.x() * x.x() + 1.0);
    const Vec3 expected_g(-std::sin(x.y()), std::cos(x.x()), -x.x() * x.x());
    CHECK((p.f(x) - expected_f).norm() < 1e-15);
    CHECK((p.g(x) - expected_g).norm() < 1e-15);
    CHECK(p.phi_w(x) == x.z());
    CHECK((p.A_w(x) - Vec3(0.0, std::cos(x.x()), 0.0)).norm() == 0.0);
  }
}

TEST_CASE("example 2 sources") {
  const ProblemSpec p = example2();
  const Vec3 f = p.f(Vec3(1, 0, 0));
  CHECK(f.x() == doctest::Approx(0.0));
  CHECK(f.y() == doctest::Approx(-0.8415).epsilon(1e-4));
  CHECK(f.z() == doctest::Approx(2.0));
  std::mt19937 rng(2);
  for (int k = 0; k < 20; ++k) {
    const Vec3 x = test::random_point(rng);
    const Vec3 wxb = p.w(x).cross(p.exact->curl_A(x));
    CHECK((wxb - Vec3(-x.y() * std::sin(x.x()), x.x() * std::sin(x.x()), 0.0)).norm() < 1e-15);
    const Vec3 expected_f(std::sin(x.y()) + x.y() * std::sin(x.x()), -x.x() * std::sin(x.x()), x.x() * x.x() + 1.0);
    CHECK((p.f(x) - expected_f).norm() < 1e-14);
    CHECK((p.g(x) - example1().g(x)).norm() == 0.0);
  }
}

TEST_CASE("manufactured solutions satisfy the strong equations") {
  for (double sigma : {1.0, 3.0}) {
    for (double rm : {1.0, 20.0}) {
      for (const ProblemSpec& p : {example1(sigma, rm), example2(sigma, rm)}) {
        CAPTURE(p.name);
        const ExactSolution& e = *p.exact;
        std::mt19937 rng(3);
        for (int k = 0; k < 100; ++k) {
          const Vec3 x = interior_point(rng);
          // closed-form derivatives: grad phi = e_z, curl curl A = (0, cos x, 0), grad r = 0
          const Vec3 grad_phi(0.0, 0.0, 1.0);
          const Vec3 curlcurl_a(0.0, std::cos(x.x()), 0.0);
          const Vec3 res1 = p.eta() * e.J(x) + grad_phi - p.w(x).cross(e.curl_A(x)) - p.f(x);
          const Vec3 res2 = -e.J(x) + p.nu_m() * curlcurl_a - p.g(x);
          CHECK(res1.norm() < 1e-12);
          CHECK(res2.norm() < 1e-12);
          // the same with numerical derivatives of the exact callables
          const Vec3 fd1 = p.eta() * e.J(x) + fd_grad(e.phi, x) - p.w(x).cross(fd_curl(e.A, x)) - p.f(x);
          const VectorField curl_a = [&](const Vec3& y) { return fd_curl(e.A, y); };
          const Vec3 fd2 = -e.J(x) + p.nu_m() * fd_curl(curl_a, x) + fd_grad(e.r, x) - p.g(x);
          CHECK(fd1.norm() < 1e-9);
          CHECK(fd2.norm() < 1e-6);
          CHECK((fd_curl(e.A, x) - e.curl_A(x)).norm() < 1e-10);
          CHECK(std::abs(fd_div(e.J, x)) < 1e-10);
          CHECK(std::abs(fd_div(e.A, x)) < 1e-10);
        }
      }
    }
  }
}

TEST_CASE("example 3 velocity and source") {
  const ProblemSpec p = example3(20.0);
  CHECK(p.rm == 20.0);
  CHECK_FALSE(p.exact);
  const Vec3 w = p.w(Vec3(0.5, 0.5, 0.3));
  CHECK(w.x() == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-14));
  CHECK(w.y() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(w.z() == 0.0);
  const Vec3 f = p.f(Vec3(0.5, 0.5, 0.3));
  CHECK(f.x() == 0.0);
  CHECK(f.y() == 0.0);
  CHECK(f.z() == doctest::Approx(-0.70710678).epsilon(1e-7));
  CHECK(p.w(Vec3(0.0, 0.0, 0.4)).norm() == 0.0);
  CHECK(p.w(Vec3(1e-16, 0.0, 0.4)).norm() < 1e-14);

  std::mt19937 rng(4);
  for (int k = 0; k < 100; ++k) {
    const Vec3 x = test::random_point(rng);
    CHECK(p.g(x).norm() == 0.0);
    CHECK(p.phi_w(x) == 0.0);
    CHECK(p.A_w(x).norm() == 0.0);
    const double amp = 16.0 * x.x() * (1.0 - x.x()) * x.y() * (1.0 - x.y());
    const double rho = std::hypot(x.x(), x.y());
    CHECK((p.f(x) - Vec3(0.0, 0.0, -amp * x.x() / rho)).norm() < 1e-14);
  }
  for (int k = 0; k < 100; ++k) {
    Vec3 x = test::random_point(rng);
    const int axis = k % 3;
    x[axis] = (k / 3) % 2;
    Vec3 n = Vec3::Zero();
    n[axis] = 1.0;
    CHECK(std::abs(p.w(x).dot(n)) < 1e-14);
  }
}

TEST_CASE("applied field lifting") {
  const VectorField w = swirl_velocity;
  const AppliedFieldLifting ex = lift_applied_field(Vec3(1, 0, 0), w);
  std::mt19937 rng(5);
  for (int k = 0; k < 10; ++k) {
    const Vec3 x = test::random_point(rng);
    CHECK((ex.A_s(x) - Vec3(0.0, 0.0, x.y())).norm() == 0.0);
    CHECK((fd_curl(ex.A_s, x) - Vec3(1, 0, 0)).norm() < 1e-12);
    CHECK((ex.f_add(x) - w(x).cross(Vec3(1, 0, 0))).norm() == 0.0);
    CHECK(ex.g_add(x).norm() == 0.0);
  }
  const AppliedFieldLifting none = lift_applied_field(Vec3(0, 0, 0), w);
  const Vec3 x(0.3, 0.6, 0.2);
  CHECK(none.A_s(x).norm() == 0.0);
  CHECK(none.f_add(x).norm() == 0.0);
  CHECK(none.g_add(x).norm() == 0.0);
  const AppliedFieldLifting vertical = lift_applied_field(Vec3(0, 0, 1), w);
  CHECK((vertical.A_s(x) - Vec3(0.0, x.x(), 0.0)).norm() == 0.0);
  CHECK((fd_curl(vertical.A_s, x) - Vec3(0, 0, 1)).norm() < 1e-12);
  const Vec3 general(0.3, -2.0, 0.7);
  CHECK((fd_curl(lift_applied_field(general, w).A_s, x) - general).norm() < 1e-12);

  CHECK_NOTHROW(lift_applied_field(VectorField([](const Vec3&) { return Vec3(1, 0, 0); }), w));
  CHECK_THROWS_AS(lift_applied_field(VectorField([](const Vec3& y) { return Vec3(y.x(), 0, 0); }), w), InvalidArgument);
}

TEST_CASE("invalid parameters") {
  CHECK_THROWS_AS(example1(0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(example2(1.0, -1.0), InvalidArgument);
  CHECK_THROWS_AS(example3(0.0), InvalidArgument);
  CHECK_THROWS_AS(example_by_id(4, 1.0, 1.0), InvalidArgument);
  CHECK(example_by_id(3, 1.0, 50.0).rm == 50.0);
  CHECK(example_by_id(2, 2.0, 1.0).sigma == 2.0);
}
