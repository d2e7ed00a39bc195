#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rmtlab/errors.hpp"
#include "rmtlab/semicircle.hpp"
#include "rmtlab/spectra.hpp"
#include "rmtlab/stats.hpp"

using namespace rmt;

namespace {

SpectralData from_values(std::vector<double> v) {
  SpectralData s;
  s.eigenvalues = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  return s;
}

RandomMatrix gue(int n, std::uint64_t seed) {
  return sample_matrix(wigner_profile(n), EntryLaw::gaussian(), SymmetryClass::ComplexHermitian, seed);
}

// Sums over distinct index tuples by inclusion-exclusion on power sums.
double distinct_pairs(const std::vector<double>& a, const std::vector<double>& b) {
  double sa = 0, sb = 0, sab = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    sab += a[i] * b[i];
  }
  return sa * sb - sab;
}

double distinct_triples(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& c) {
  double sa = 0, sb = 0, sc = 0, sab = 0, sac = 0, sbc = 0, sabc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    sc += c[i];
    sab += a[i] * b[i];
    sac += a[i] * c[i];
    sbc += b[i] * c[i];
    sabc += a[i] * b[i] * c[i];
  }
  return sa * sb * sc - sab * sc - sac * sb - sbc * sa + 2 * sabc;
}

std::vector<double> thetas(const SpectralData& s, double e, double alpha, double eta) {
  const double n = static_cast<double>(s.eigenvalues.size());
  std::vector<double> v;
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) v.push_back(theta_eta(s.eigenvalues(i) - e - alpha / n, eta));
  return v;
}

}  // namespace

TEST_SUITE("spectra") {
  TEST_CASE("trace and frobenius invariants") {
    for (auto cls : {SymmetryClass::RealSymmetric, SymmetryClass::ComplexHermitian}) {
      const RandomMatrix h = sample_matrix(wigner_profile(60), build_matching_law(0.5, 3), cls, 9);
      const SpectralData s = spectral_data(h);
      CHECK(std::abs(s.eigenvalues.sum() - h.entries.trace().real()) < 1e-8 * 60);
      CHECK(std::abs(s.eigenvalues.squaredNorm() - h.entries.squaredNorm()) < 1e-8 * 60);
      CHECK(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));
      // eigenvectors are orthonormal and diagonalize H
      const Eigen::MatrixXcd& u = s.eigenvectors;
      CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(60, 60)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((h.entries * u - u * s.eigenvalues.cast<cplx>().asDiagonal()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("counting function") {
    const SpectralData one = from_values({0.0});
    const std::vector<double> grid{-1, -1e-9, 0, 1};
    const CountingStats c = counting_stats(one, grid);
    CHECK(c.records[0].n_emp == 0);
    CHECK(c.records[1].n_emp == 0);
    CHECK(c.records[2].n_emp == 1);
    CHECK(c.records[3].n_emp == 1);

    const SpectralData s = spectral_data(gue(200, 1), false);
    std::vector<double> fine;
    for (double e = -3; e <= 3; e += 0.01) fine.push_back(e);
    const CountingStats g = counting_stats(s, fine);
    double prev = 0;
    for (const auto& r : g.records) {
      CHECK(r.n_emp >= prev);
      CHECK(std::abs(r.n_emp * 200 - std::round(r.n_emp * 200)) < 1e-12);
      prev = r.n_emp;
    }
    CHECK(g.records.front().n_emp == 0);
    CHECK(g.records.back().n_emp == 1);
    CHECK(g.l1 < 10.0 / 200);
  }

  TEST_CASE("rigidity statistic") {
    const std::vector<double> g = classical_locations(20);
    CHECK(rigidity_stat(from_values(g)) == 0);
    std::vector<double> shifted = g;
    for (auto& v : shifted) v += 0.03;
    CHECK(rigidity_stat(from_values(shifted)) == doctest::Approx(0.0009).epsilon(1e-12));
    CHECK(rigidity_stat_bulk(from_values(shifted)) == doctest::Approx(0.0009).epsilon(1e-12));
  }

  TEST_CASE("delocalization statistic") {
    SpectralData one = from_values({0.5});
    one.eigenvectors = Eigen::MatrixXcd::Ones(1, 1);
    CHECK(delocalization_stat(one, -1, 1).max_sup_norm == 1);

    SpectralData flat = from_values({0.0, 1.5, 3.0});
    flat.eigenvectors = Eigen::MatrixXcd::Constant(3, 3, 1 / std::sqrt(3.0));
    const DelocalizationStat d = delocalization_stat(flat, -1, 1);
    CHECK(d.max_sup_norm == doctest::Approx(1 / std::sqrt(3.0)));
    CHECK(d.count == 1);
    CHECK_THROWS_AS(delocalization_stat(flat, 0.1, 0.2), EmptyWindow);
  }

  TEST_CASE("smoothed correlations against inclusion-exclusion") {
    const SpectralData s = spectral_data(gue(120, 4), false);
    const double eta = 5.0 / 120, e = 0.1;
    const std::vector<double> al{0.0, 1.5, -2.0};
    const auto a = thetas(s, e, al[0], eta), b = thetas(s, e, al[1], eta), c = thetas(s, e, al[2], eta);
    const double n = 120;
    double s1 = 0;
    for (double v : a) s1 += v;
    CHECK(smoothed_correlation(s, e, std::span(al).first(1), eta) == doctest::Approx(s1 / n).epsilon(1e-13));
    CHECK(smoothed_correlation(s, e, std::span(al).first(2), eta) ==
          doctest::Approx(distinct_pairs(a, b) / (n * (n - 1))).epsilon(1e-12));
    CHECK(smoothed_correlation(s, e, al, eta) ==
          doctest::Approx(distinct_triples(a, b, c) / (n * (n - 1) * (n - 2))).epsilon(1e-10));

    const std::vector<double> swapped{1.5, 0.0};
    CHECK(smoothed_correlation(s, e, swapped, eta) ==
          doctest::Approx(smoothed_correlation(s, e, std::span(al).first(2), eta)).epsilon(1e-13));
  }

  TEST_CASE("sampled three-point sums at large N") {
    const SpectralData s = spectral_data(gue(500, 6), false);
    const double eta = 0.2, e = 0;
    const std::vector<double> al{0.0, 3.0, -3.0};
    const double n = 500;
    const double exact =
        distinct_triples(thetas(s, e, 0, eta), thetas(s, e, 3, eta), thetas(s, e, -3, eta)) / (n * (n - 1) * (n - 2));
    // theta <= 1/eta = 5, so each tuple term is below 125; 1e6 tuples give se < 0.13,
    // and the spread of the products is far smaller than that worst case.
    CHECK(smoothed_correlation(s, e, al, eta, 3) == doctest::Approx(exact).epsilon(0.02));
  }

  TEST_CASE("smoothed correlation edge cases") {
    const SpectralData two = from_values({-0.3, 0.4});
    const std::vector<double> al{0.0, 0.0};
    const double t11 = theta_eta(-0.3, 0.1), t22 = theta_eta(0.4, 0.1);
    CHECK(smoothed_correlation(two, 0, al, 0.1) == doctest::Approx((t11 * t22 + t22 * t11) / 2));
    CHECK(smoothed_correlation(two, 0, al, 1e12) < 1e-20);
  }

  TEST_CASE("k = 1 at E = 0 recovers pi rho_sc(0)") {
    const SpectralData s = spectral_data(gue(1000, 8), false);
    const std::vector<double> al{0.0};
    const double v = smoothed_correlation(s, 0, al, 10.0 / 1000);
    CHECK(std::abs(v / std::numbers::pi - 1 / std::numbers::pi) < 0.05);
  }

  TEST_CASE("unfolded bulk gaps have mean one") {
    std::vector<double> gaps;
    for (std::uint64_t k = 0; k < 10; ++k) {
      const auto g = gap_statistics(spectral_data(gue(300, 100 + k), false), -1, 1);
      gaps.insert(gaps.end(), g.begin(), g.end());
    }
    CHECK(std::abs(mean(gaps) - 1) < 3 * std_error(gaps));
    CHECK_THROWS_AS(gap_statistics(from_values({0, 1}), 1.9, 2.1), PreconditionViolation);
    CHECK(gaps_csv({0.5, 1.25}) == "gap\n0.5\n1.25\n");
  }

  TEST_CASE("sine kernel") {
    CHECK(sine_kernel(0) == 1);
    CHECK(std::abs(sine_kernel(1)) < 1e-15);
    CHECK(sine_kernel(0.5) == doctest::Approx(2 / std::numbers::pi).epsilon(1e-15));
  }

  TEST_CASE("moving average") {
    const SpectralData s = from_values({1, 2, 3, 4, 5});
    CHECK(moving_average(s, 1, 3) == 3.0);
    CHECK(moving_average(s, 0, 5) == 3.0);
    CHECK_THROWS_AS(moving_average(s, 3, 3), PreconditionViolation);
  }
}
