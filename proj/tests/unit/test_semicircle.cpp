#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rmtlab/errors.hpp"
#include "rmtlab/semicircle.hpp"

using namespace rmt;

namespace {

// Root of m^2 + z m + 1 = 0 with Im m > 0.
cplx quadratic_root(cplx z) {
  const cplx d = std::sqrt(z * z - 4.0);
  const cplx r1 = (-z + d) / 2.0, r2 = (-z - d) / 2.0;
  return r1.imag() > r2.imag() ? r1 : r2;
}

// Simpson on the semicircle density after x = 2 sin(theta), which removes
// the square-root endpoints.
double n_sc_quadrature(double e) {
  if (e <= -2) return 0;
  if (e >= 2) return 1;
  const double top = std::asin(e / 2);
  const int steps = 20000;
  const double lo = -std::numbers::pi / 2, h = (top - lo) / steps;
  double s = 0;
  for (int k = 0; k <= steps; ++k) {
    const double th = lo + k * h;
    const double f = 2 * std::cos(th) * std::sqrt(4 - 4 * std::sin(th) * std::sin(th)) / (2 * std::numbers::pi);
    s += (k == 0 || k == steps) ? f : (k % 2 ? 4 * f : 2 * f);
  }
  return s * h / 3;
}

}  // namespace

TEST_SUITE("semicircle") {
  TEST_CASE("m_sc at reference points") {
    CHECK(std::abs(msc({0, 1}) - cplx(0, (std::sqrt(5.0) - 1) / 2)) < 1e-15);
    CHECK(std::abs(msc({0, 2}) - cplx(0, std::sqrt(2.0) - 1)) < 1e-15);
    CHECK(std::abs(msc({0, 1e-12}) - cplx(0, 1)) < 1e-11);
    CHECK_THROWS_AS(msc({0.3, 0}), DomainError);
  }

  TEST_CASE("m_sc matches the quadratic root and the defining equation") {
    for (double e = -5; e <= 5; e += 0.37)
      for (double eta : {1e-6, 1e-3, 0.1, 1.0, 7.0}) {
        const cplx z(e, eta);
        const cplx m = msc(z);
        CHECK(std::abs(m - quadratic_root(z)) < 1e-12 * (1 + std::abs(m)));
        CHECK(std::abs(m + 1.0 / (z + m)) < 1e-13);
        CHECK(std::abs(m) <= 1 + 1e-15);
        CHECK(m.imag() > 0);
      }
  }

  TEST_CASE("density and counting function") {
    CHECK(rho_sc(0) == doctest::Approx(1 / std::numbers::pi).epsilon(1e-15));
    CHECK(rho_sc(2) == 0);
    CHECK(rho_sc(-2) == 0);
    CHECK(rho_sc(3) == 0);
    CHECK(n_sc(-2) == 0);
    CHECK(n_sc(2) == 1);
    CHECK(n_sc(0) == doctest::Approx(0.5).epsilon(1e-15));
    for (double e = -2.5; e <= 2.5; e += 0.1) CHECK(n_sc(e) == doctest::Approx(n_sc_quadrature(e)).epsilon(1e-8));
  }

  TEST_CASE("classical locations") {
    const auto g2 = classical_locations(2);
    CHECK(std::abs(g2[0]) < 1e-14);
    CHECK(g2[1] == 2);
    CHECK(std::abs(classical_locations(4)[1]) < 1e-14);
    const auto g10 = classical_locations(10);
    CHECK(g10[4] < 0);
    CHECK(g10[5] > 0);
    CHECK(std::abs(n_sc_quadrature(g10[6]) - 0.7) < 1e-8);
    for (int n : {2, 10, 100}) {
      const auto g = classical_locations(n);
      for (int j = 1; j <= n; ++j) CHECK(std::abs(n * n_sc(g[j - 1]) - j) < 1e-10);
    }
  }

  TEST_CASE("control function") {
    CHECK(control_g({0, 0.01}, 1) == doctest::Approx(std::sqrt(2.01)).epsilon(1e-12));
    for (double e = -3; e <= 3; e += 0.25)
      for (double eta : {0.001, 0.1, 1.0}) {
        const ControlPoint c = control_point(e, eta, 0.3);
        CHECK(c.g <= std::sqrt(c.kappa + eta) + 1e-15);
        CHECK(control_g({e, eta}, 2.5) == doctest::Approx(std::sqrt(c.kappa + eta)));
      }
  }

  TEST_CASE("stable branch follows m_sc") {
    const cplx z(0, 2);
    CHECK(std::abs(stable_branch(z, 0) - msc(z)) < 1e-15);
    const cplx t(0.01, 0);
    const cplx s = stable_branch(z, t);
    CHECK(std::abs(s + 1.0 / (z + s) - t) < 1e-12);
    // s + 1/(z+s) = t  <=>  s^2 + (z - t) s + 1 - t z = 0; keep the root continuing m_sc
    const cplx b = z - t, c = 1.0 - t * z;
    const cplx d = std::sqrt(b * b - 4.0 * c);
    const cplx r1 = (-b + d) / 2.0, r2 = (-b - d) / 2.0;
    const cplx oracle = std::abs(r1 - msc(z)) < std::abs(r2 - msc(z)) ? r1 : r2;
    CHECK(std::abs(s - oracle) < 1e-12);
  }
}
