#include <doctest.h>

#include <cmath>

#include "rmtlab/errors.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/semicircle.hpp"
#include "rmtlab/vde.hpp"

using namespace rmt;

namespace {

// Newton on F(m)_i = m_i (z + (S m)_i) + 1 = 0, started at m_sc.
Eigen::VectorXcd newton_vde(const Eigen::MatrixXd& s, cplx z) {
  const Eigen::Index n = s.rows();
  Eigen::VectorXcd m = Eigen::VectorXcd::Constant(n, msc(z));
  const Eigen::MatrixXcd sc = s.cast<cplx>();
  for (int it = 0; it < 100; ++it) {
    const Eigen::VectorXcd sm = sc * m;
    const Eigen::VectorXcd f = (m.array() * (sm.array() + z) + 1.0).matrix();
    if (f.cwiseAbs().maxCoeff() < 1e-15) break;
    Eigen::MatrixXcd j = m.asDiagonal() * sc;
    j.diagonal() += (sm.array() + z).matrix();
    m -= j.partialPivLu().solve(f);
  }
  return m;
}

Eigen::VectorXcd mean_zero_vector(int n, std::uint64_t seed) {
  CounterRng r(seed);
  Eigen::VectorXcd w(n);
  for (auto& v : w) v = cplx(r.normal(), r.normal());
  return w.array() - w.mean();
}

}  // namespace

TEST_SUITE("vde") {
  TEST_CASE("constant profile reduces to m_sc") {
    for (cplx z : {cplx(0, 1), cplx(0.5, 0.01), cplx(-3, 0.2)}) {
      const VdeSolution s = solve_vde(wigner_profile(10), z);
      CHECK(s.iterations <= 3);
      CHECK(s.residual <= 1e-13);
      CHECK((s.m_vec.array() - msc(z)).abs().maxCoeff() <= 1e-13);
    }
  }

  TEST_CASE("circulant profile keeps all m_i equal to m_sc") {
    const VdeSolution s = solve_vde(band_profile(64, 8, BandShape::Uniform), {0, 2});
    CHECK((s.m_vec.array() - cplx(0, std::sqrt(2.0) - 1)).abs().maxCoeff() < 1e-13);
  }

  TEST_CASE("two-block profile matches the Newton oracle") {
    const VarianceProfile p = generalized_profile(8, two_block_weights(8));
    for (cplx z : {cplx(0.5, 0.5), cplx(-1.2, 0.1), cplx(0.1, 0.05)}) {
      const VdeSolution s = solve_vde(p, z);
      const Eigen::VectorXcd oracle = newton_vde(p.sigma2, z);
      CHECK((s.m_vec - oracle).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  TEST_CASE("solver preconditions") {
    CHECK_THROWS_AS(solve_vde(wigner_profile(4), {0, 1}, 1e-15), PreconditionViolation);
    CHECK_THROWS_AS(solve_vde(wigner_profile(4), {0, 0}), DomainError);
  }

  TEST_CASE("contraction certificate") {
    const ContractionCertificate w = contraction_certificate(wigner_profile(5), {0, 1});
    CHECK(w.tau == 0);
    CHECK(w.bound == 0);
    const ContractionCertificate b = contraction_certificate(band_profile(6, 2, BandShape::Uniform), {0.5, 0.5});
    CHECK(b.bound < 1);
    for (double e = -2.5; e <= 2.5; e += 0.5)
      for (double eta : {0.01, 0.3}) {
        const ContractionCertificate c = contraction_bound(band_profile(32, 4, BandShape::Triangular), {e, eta});
        CHECK(c.bound <= (std::abs(c.zeta) + c.tau) / (1 + c.tau) + 1e-15);
        CHECK(c.bound <= c.two_case_bound + 1e-15);
      }
  }

  TEST_CASE("neumann series on trivial inputs") {
    const VarianceProfile band = band_profile(32, 4, BandShape::Uniform);
    CHECK(neumann_solve(band, {1, 0.5}, Eigen::VectorXcd::Zero(32)).u.norm() == 0);
    const Eigen::VectorXcd w = mean_zero_vector(9, 2);
    CHECK((neumann_solve(wigner_profile(9), {0.3, 0.4}, w).u - w).norm() < 1e-14);
    CHECK_THROWS_AS(neumann_solve(band, {1, 0.5}, Eigen::VectorXcd::Ones(32)), NotOrthogonal);
  }

  TEST_CASE("neumann series matches a dense solve") {
    for (const VarianceProfile& p : {band_profile(32, 4, BandShape::Uniform),
                                     generalized_profile(12, two_block_weights(12))}) {
      for (cplx z : {cplx(1, 0.5), cplx(0, 0.2), cplx(-1.5, 0.05)}) {
        const Eigen::VectorXcd w = mean_zero_vector(p.n, 7);
        const cplx zeta = msc(z) * msc(z);
        const Eigen::MatrixXcd a =
            Eigen::MatrixXcd::Identity(p.n, p.n) - zeta * p.sigma2.cast<cplx>();
        const Eigen::VectorXcd oracle = a.partialPivLu().solve(w);
        const NeumannResult r = neumann_solve(p, z, w);
        CHECK((r.u - oracle).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(r.certificate.bound < 1);
      }
    }
  }
}
