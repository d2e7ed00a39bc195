#include <doctest.h>

#include <cmath>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/resolvent.hpp"
#include "rmtlab/semicircle.hpp"
#include "rmtlab/stats.hpp"

using namespace rmt;

namespace {

Eigen::MatrixXcd lu_inverse(const Eigen::MatrixXcd& h, cplx z) {
  const Eigen::Index n = h.rows();
  return (h - z * Eigen::MatrixXcd::Identity(n, n)).partialPivLu().inverse();
}

RandomMatrix gue(int n, std::uint64_t seed, SymmetryClass cls = SymmetryClass::ComplexHermitian) {
  return sample_matrix(wigner_profile(n), EntryLaw::gaussian(), cls, seed);
}

RandomMatrix two_by_two() {
  Eigen::MatrixXcd h(2, 2);
  h << 0, 1, 1, 0;
  return from_dense(h, SymmetryClass::RealSymmetric);
}

}  // namespace

TEST_SUITE("resolvent") {
  TEST_CASE("scalar and 2x2 cases") {
    Eigen::MatrixXcd a(1, 1);
    a << 0.7;
    const GreenEvaluation g1 = green(from_dense(a, SymmetryClass::RealSymmetric), {0.1, 0.2});
    CHECK(std::abs(g1.g_diag(0) - 1.0 / (0.7 - cplx(0.1, 0.2))) < 1e-15);
    CHECK(std::abs(g1.m_n - g1.g_diag(0)) < 1e-15);

    Eigen::MatrixXcd full;
    green(two_by_two(), {0, 1}, &full);
    CHECK(std::abs(full(0, 0) - cplx(0, 0.5)) < 1e-15);
    CHECK(std::abs(full(0, 1) - 0.5) < 1e-15);
  }

  TEST_CASE("spectral resolvent matches LU inversion") {
    for (auto cls : {SymmetryClass::RealSymmetric, SymmetryClass::ComplexHermitian}) {
      const RandomMatrix h = gue(30, 11, cls);
      const Resolvent r(h);
      for (cplx z : {cplx(0.3, 0.5), cplx(-1.9, 0.01), cplx(4, 2)}) {
        const Eigen::MatrixXcd oracle = lu_inverse(h.entries, z);
        CHECK((r.full(z) - oracle).cwiseAbs().maxCoeff() < 1e-10 * (1 + 1 / (z.imag() * z.imag())));
        CHECK((r.diagonal(z) - oracle.diagonal()).cwiseAbs().maxCoeff() < 1e-10 * (1 + 1 / (z.imag() * z.imag())));
        const std::vector<int> cols{0, 7, 29};
        const Eigen::MatrixXcd c = r.columns(z, cols);
        for (std::size_t k = 0; k < cols.size(); ++k) CHECK((c.col(k) - oracle.col(cols[k])).norm() < 1e-9);

        const GreenEvaluation ev = r.evaluate(z);
        double lam = 0, off = 0;
        for (int i = 0; i < 30; ++i) {
          lam = std::max(lam, std::abs(oracle(i, i) - msc(z)));
          for (int j = 0; j < 30; ++j)
            if (i != j) off = std::max(off, std::abs(oracle(i, j)));
        }
        CHECK(ev.lambda_d == doctest::Approx(lam).epsilon(1e-9));
        CHECK(ev.offdiag_max == doctest::Approx(off).epsilon(1e-9));
        CHECK(std::abs(ev.m_n - oracle.trace() / 30.0) < 1e-10);
      }
    }
  }

  TEST_CASE("defining identity (H - z) G = I") {
    const RandomMatrix h = gue(20, 3);
    for (double eta : {1.0, 1e-2, 1e-4}) {
      const cplx z(0.2, eta);
      const Eigen::MatrixXcd g = Resolvent(h).full(z);
      const Eigen::MatrixXcd id = (h.entries - z * Eigen::MatrixXcd::Identity(20, 20)) * g;
      CHECK((id - Eigen::MatrixXcd::Identity(20, 20)).cwiseAbs().maxCoeff() < 1e-10 * (1 + 1 / (eta * eta)));
    }
  }

  TEST_CASE("minor resolvent on the worked 2x2 case") {
    const RandomMatrix h = two_by_two();
    const MinorQuantities mq = minor_green(h, {1}, {0, 1});
    CHECK(std::abs(mq.g(0, 0) - cplx(0, 1)) < 1e-15);  // 1/(0 - i)
    CHECK(mq.g(1, 1) == 0.0);
    const Eigen::MatrixXcd g = lu_inverse(h.entries, {0, 1});
    CHECK(std::abs((g(0, 0) - mq.g(0, 0)) - g(0, 1) * g(1, 0) / g(1, 1)) < 1e-15);
    CHECK(minor_identity_residuals(h, {0, 1}).max() < 1e-14);
  }

  TEST_CASE("minor with all but one index removed is scalar") {
    const RandomMatrix h = gue(6, 4);
    const cplx z(0.1, 0.3);
    const Eigen::MatrixXcd g = minor_resolvent(h.entries, {0, 1, 2, 4, 5}, z);
    CHECK(std::abs(g(3, 3) - 1.0 / (h.entries(3, 3) - z)) < 1e-14);
  }

  TEST_CASE("minor identities on random 8x8") {
    for (auto cls : {SymmetryClass::RealSymmetric, SymmetryClass::ComplexHermitian}) {
      const RandomMatrix h = gue(8, 21, cls);
      const cplx z(0.3, 0.5);
      CHECK(minor_identity_residuals(h, z).max() < 1e-10);
      CHECK(minor_identity_residuals(h, z, {2, 5}).max() < 1e-10);
    }
  }

  TEST_CASE("diagonal H has a diagonal resolvent") {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(4, 4);
    d.diagonal() << -1, 0.5, 0.2, 3;
    const RandomMatrix h = from_dense(d, SymmetryClass::RealSymmetric);
    Eigen::MatrixXcd full;
    green(h, {0, 1}, &full);
    CHECK((full - Eigen::MatrixXcd(full.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0);
    CHECK(minor_identity_residuals(h, {0, 1}).gij_kij == 0);
  }

  TEST_CASE("ward and schur identities") {
    const RandomMatrix h = gue(16, 8);
    for (double eta : {1.0, 0.05}) {
      const cplx z(-0.4, eta);
      CHECK(ward_residual(Resolvent(h).full(z), eta) < 1e-10);
      for (int k : {1, 5, 15}) CHECK(schur_residual(h, z, k) < 1e-10);
    }
  }

  TEST_CASE("interlacing") {
    const RandomMatrix h = gue(25, 14);
    for (int k : {0, 12, 24}) CHECK(interlacing_violation(h, k) < 1e-12);
  }

  TEST_CASE("upsilon forms agree") {
    const VarianceProfile p = band_profile(16, 4, BandShape::Triangular);
    for (std::uint64_t s = 0; s < 20; ++s) {
      const RandomMatrix h = sample_matrix(p, build_matching_law(0.5, 3), SymmetryClass::ComplexHermitian, s);
      for (int i : {0, 9, 15}) {
        const UpsilonPair u = upsilon(h, p, {0.5, 0.1}, i);
        CHECK(std::abs(u.a - u.b) < 1e-9);
      }
    }
  }

  TEST_CASE("upsilon for N = 1") {
    Eigen::MatrixXcd a(1, 1);
    a << 0.4;
    const RandomMatrix h = from_dense(a, SymmetryClass::RealSymmetric);
    const VarianceProfile p = wigner_profile(1);
    const cplx z(0.2, 0.3);
    const cplx g = 1.0 / (0.4 - z);
    const UpsilonPair u = upsilon(h, p, z, 0);
    CHECK(std::abs(u.a - (1.0 / g + z + g)) < 1e-14);
    CHECK(std::abs(u.a - u.b) < 1e-14);
  }

  TEST_CASE("upsilon_max agrees with the pointwise definition") {
    const VarianceProfile p = wigner_profile(12);
    const RandomMatrix h = gue(12, 5);
    const cplx z(0.1, 0.2);
    double m = 0;
    for (int i = 0; i < 12; ++i) m = std::max(m, std::abs(upsilon(h, p, z, i).a));
    CHECK(upsilon_max(Resolvent(h), p, z) == doctest::Approx(m).epsilon(1e-10));
  }

  TEST_CASE("resolvent expansion") {
    const RandomMatrix q = zero_entry(gue(10, 2), 1, 4);
    const cplx z(0.2, 0.5);
    CHECK(swap_expansion_residual(q, 1, 4, {0.8, -0.6}, z, 5) < 1e-10);
    for (int order = 0; order <= 5; ++order) CHECK(swap_expansion_residual(q, 1, 4, 0.0, z, order) == 0.0);
  }

  TEST_CASE("expansion truncation error scales like N^(-(m+1)/2)") {
    const std::vector<int> ns{25, 50, 100, 200};
    const cplx z(0.3, 0.5), v(0.6, 0.8);
    for (int m = 1; m <= 3; ++m) {
      std::vector<double> lx, ly;
      for (int n : ns) {
        std::vector<double> e;
        for (std::uint64_t s = 0; s < 5; ++s)
          e.push_back(swap_expansion_residual(zero_entry(gue(n, derive(n, s)), 0, 1), 0, 1, v, z, m));
        lx.push_back(std::log(double(n)));
        ly.push_back(std::log(median(e)));
      }
      CHECK(std::abs(fit_line(lx, ly).slope + (m + 1) / 2.0) <= 0.3);
    }
  }
}
