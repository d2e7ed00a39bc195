#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rmtlab/errors.hpp"
#include "rmtlab/profiles.hpp"

using namespace rmt;

namespace {

void check_doubly_stochastic(const VarianceProfile& p, double tol) {
  CHECK((p.sigma2 - p.sigma2.transpose()).cwiseAbs().maxCoeff() <= tol);
  for (int i = 0; i < p.n; ++i) CHECK(std::abs(p.sigma2.row(i).sum() - 1) <= tol);
  CHECK(p.sigma2.minCoeff() >= 0);
}

}  // namespace

TEST_SUITE("profiles") {
  TEST_CASE("wigner profile") {
    const VarianceProfile p = wigner_profile(4);
    CHECK(p.sigma2.isConstant(0.25));
    check_doubly_stochastic(p, 1e-15);
    CHECK(p.delta_minus == 1);
    CHECK(p.delta_plus == 1);
    const SpectralGap g = spectral_gap(p);
    CHECK(g.delta_minus == doctest::Approx(1).epsilon(1e-12));
    CHECK(g.delta_plus == doctest::Approx(1).epsilon(1e-12));
    CHECK(g.simple_top);

    const VarianceProfile one = wigner_profile(1);
    CHECK(one.sigma2(0, 0) == 1);
    CHECK(one.m_param == 1);
  }

  TEST_CASE("sinkhorn fixed point and 2x2 closed form") {
    const VarianceProfile flat = generalized_profile(5, Eigen::MatrixXd::Constant(5, 5, 3.0));
    CHECK((flat.sigma2 - wigner_profile(5).sigma2).cwiseAbs().maxCoeff() < 1e-14);

    Eigen::MatrixXd w(2, 2);
    w << 1, 2, 2, 1;
    const VarianceProfile p = generalized_profile(2, w);
    // diag(x) W diag(x) with x1 = x2 = x: x^2 (1 + 2) = 1
    CHECK(p.sigma2(0, 0) == doctest::Approx(1.0 / 3).epsilon(1e-13));
    CHECK(p.sigma2(0, 1) == doctest::Approx(2.0 / 3).epsilon(1e-13));
    CHECK(p.sigma2(0, 0) == doctest::Approx(p.sigma2(1, 1)));
    check_doubly_stochastic(p, 1e-12);
  }

  TEST_CASE("sinkhorn on the two-block weights") {
    const VarianceProfile p = generalized_profile(8, two_block_weights(8));
    check_doubly_stochastic(p, 1e-12);
    CHECK(p.c_inf > 0);
    CHECK(p.c_sup > p.c_inf);
    // the scaled matrix is diag(x) W diag(x): ratios within a block are preserved
    CHECK(p.sigma2(0, 1) == doctest::Approx(p.sigma2(2, 3)));
    const SpectralGap g = spectral_gap(p);
    CHECK(g.delta_minus == doctest::Approx(p.delta_minus));
    CHECK(g.simple_top);
  }

  TEST_CASE("sinkhorn rejects non-positive weights") {
    Eigen::MatrixXd w = Eigen::MatrixXd::Ones(3, 3);
    w(0, 1) = w(1, 0) = 0;
    CHECK_THROWS_AS(generalized_profile(3, w), PreconditionViolation);
    Eigen::MatrixXd asym = Eigen::MatrixXd::Ones(3, 3);
    asym(0, 1) = 2;
    CHECK_THROWS_AS(generalized_profile(3, asym), PreconditionViolation);
  }

  TEST_CASE("band profile n = 6, W = 2") {
    const VarianceProfile p = band_profile(6, 2, BandShape::Uniform);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        const int d = std::min((i - j + 6) % 6, (j - i + 6) % 6);
        CHECK(p.sigma2(i, j) == doctest::Approx(d <= 1 ? 1.0 / 3 : 0.0));
      }
    CHECK(p.m_param == doctest::Approx(3));
    CHECK(p.pre_norm_m == doctest::Approx(2));
    check_doubly_stochastic(p, 1e-15);
    CHECK(p.delta_minus == doctest::Approx(2.0 / 3).epsilon(1e-13));
    CHECK(p.delta_plus == doctest::Approx(1.0 / 3).epsilon(1e-13));
    CHECK(p.simple_top);
  }

  TEST_CASE("band spectrum from the DFT matches the closed form and the dense solve") {
    const VarianceProfile p = band_profile(6, 2, BandShape::Uniform);
    const Eigen::VectorXd dft = circulant_spectrum(p);
    std::vector<double> expect;
    for (int q = 0; q < 6; ++q) expect.push_back((1 + 2 * std::cos(2 * std::numbers::pi * q / 6)) / 3);
    std::sort(expect.begin(), expect.end());
    for (int q = 0; q < 6; ++q) CHECK(dft(q) == doctest::Approx(expect[q]).epsilon(1e-13));

    for (auto shape : {BandShape::Uniform, BandShape::Triangular, BandShape::TruncatedGaussian}) {
      const VarianceProfile b = band_profile(40, 6, shape);
      const SpectralGap g = spectral_gap(b);
      CHECK(g.delta_minus == doctest::Approx(b.delta_minus).epsilon(1e-11));
      CHECK(g.delta_plus == doctest::Approx(b.delta_plus).epsilon(1e-11));
      check_doubly_stochastic(b, 1e-14);
    }
  }

  TEST_CASE("full band is flat") {
    const VarianceProfile p = band_profile(8, 8, BandShape::Uniform);
    CHECK((p.sigma2 - wigner_profile(8).sigma2).cwiseAbs().maxCoeff() < 1e-15);
  }

  TEST_CASE("band wider than the circle is rejected") {
    CHECK_THROWS_AS(band_profile(8, 20, BandShape::TruncatedGaussian), SupportTooWide);
  }

  TEST_CASE("top eigenvalue is one with the flat eigenvector") {
    for (const VarianceProfile& p :
         {wigner_profile(7), band_profile(32, 4, BandShape::Triangular), generalized_profile(10, two_block_weights(10))}) {
      const Eigen::VectorXd e = Eigen::VectorXd::Constant(p.n, 1 / std::sqrt(double(p.n)));
      CHECK((p.sigma2 * e - e).norm() < 1e-12);
    }
  }

  TEST_CASE("json round trip") {
    const nlohmann::json specs[] = {
        {{"type", "wigner"}, {"n", 5}},
        {{"type", "band"}, {"n", 32}, {"params", {{"w_fraction", 0.125}, {"shape", "triangular"}}}},
        {{"type", "generalized"}, {"n", 6}, {"params", {{"preset", "two_block"}}}},
    };
    for (const auto& s : specs) {
      const VarianceProfile p = profile_from_json(s);
      const VarianceProfile q = profile_from_json(p.to_json());
      CHECK(p.id() == q.id());
      CHECK((p.sigma2 - q.sigma2).cwiseAbs().maxCoeff() == 0);
    }
  }
}
