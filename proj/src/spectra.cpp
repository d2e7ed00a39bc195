#include "rmtlab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rmtlab/errors.hpp"
#include "rmtlab/report.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/semicircle.hpp"

namespace rmt {

SpectralData spectral_data(const RandomMatrix& h, bool want_vectors) {
  SpectralData s;
  s.provenance = h.provenance;
  if (h.symmetry == SymmetryClass::RealSymmetric) {
    SymmetricEig e = eigh(Eigen::MatrixXd(h.entries.real()), want_vectors);
    s.eigenvalues = std::move(e.values);
    if (want_vectors) s.eigenvectors = e.vectors.cast<cplx>();
  } else {
    HermitianEig e = eigh(h.entries, want_vectors);
    s.eigenvalues = std::move(e.values);
    if (want_vectors) s.eigenvectors = std::move(e.vectors);
  }
  return s;
}

CountingStats counting_stats(const SpectralData& s, std::span<const double> grid) {
  if (!std::is_sorted(grid.begin(), grid.end())) throw PreconditionViolation("counting grid must be sorted");
  const auto& ev = s.eigenvalues;
  const double n = static_cast<double>(ev.size());
  const double* begin = ev.data();
  const double* end = ev.data() + ev.size();
  auto n_emp = [&](double e) { return static_cast<double>(std::upper_bound(begin, end, e) - begin) / n; };

  CountingStats out;
  for (double e : grid) {
    const double ne = n_emp(e);
    out.records.push_back({e, ne, ne - n_sc(e)});
    out.sup = std::max(out.sup, std::abs(ne - n_sc(e)));
  }
  constexpr int kSteps = 600000;
  constexpr double lo = -3, hi = 3, h = (hi - lo) / kSteps;
  const double* p = begin;
  double prev = 0;
  for (int k = 0; k <= kSteps; ++k) {
    const double e = lo + k * h;
    while (p != end && *p <= e) ++p;
    const double d = std::abs(static_cast<double>(p - begin) / n - n_sc(e));
    out.sup = std::max(out.sup, d);
    if (k > 0) out.l1 += 0.5 * h * (prev + d);
    prev = d;
  }
  return out;
}

double rigidity_stat(const SpectralData& s) {
  const int n = static_cast<int>(s.eigenvalues.size());
  const std::vector<double> g = classical_locations(n);
  double sum = 0;
  for (int j = 0; j < n; ++j) sum += (s.eigenvalues(j) - g[j]) * (s.eigenvalues(j) - g[j]);
  return sum / n;
}

double rigidity_stat_bulk(const SpectralData& s, double kappa) {
  const int n = static_cast<int>(s.eigenvalues.size());
  const std::vector<double> g = classical_locations(n);
  double sum = 0;
  int count = 0;
  for (int j = 0; j < n; ++j) {
    if (std::abs(g[j]) > 2 - kappa) continue;
    sum += (s.eigenvalues(j) - g[j]) * (s.eigenvalues(j) - g[j]);
    ++count;
  }
  if (count == 0) throw EmptyWindow("no classical location inside the bulk");
  return sum / count;
}

DelocalizationStat delocalization_stat(const SpectralData& s, double lo, double hi) {
  if (!(lo >= -2 && hi <= 2 && lo <= hi)) throw PreconditionViolation("delocalization window must lie in [-2, 2]");
  if (s.eigenvectors.size() == 0) throw PreconditionViolation("delocalization needs eigenvectors");
  const Eigen::Index n = s.eigenvalues.size();
  DelocalizationStat d;
  for (Eigen::Index a = 0; a < n; ++a) {
    const double lam = s.eigenvalues(a);
    if (lam < lo || lam > hi) continue;
    const double sup = s.eigenvectors.col(a).cwiseAbs().maxCoeff();
    d.max_sup_norm = std::max(d.max_sup_norm, sup);
    const double w = std::sqrt(std::abs(std::abs(lam) - 2) + 1.0 / n);
    d.max_edge_weighted = std::max(d.max_edge_weighted, sup * std::sqrt(static_cast<double>(n)) * w);
    ++d.count;
  }
  if (d.count == 0) throw EmptyWindow("no eigenvalue inside the delocalization window");
  return d;
}

double theta_eta(double x, double eta) { return eta / (x * x + eta * eta); }

double smoothed_correlation(const SpectralData& s, double e, std::span<const double> alphas, double eta,
                            std::uint64_t seed) {
  const int k = static_cast<int>(alphas.size());
  const int n = static_cast<int>(s.eigenvalues.size());
  if (k < 1 || k > 3) throw PreconditionViolation("smoothed_correlation needs 1 <= k <= 3");
  if (!(eta > 0)) throw PreconditionViolation("smoothed_correlation needs eta > 0");
  if (n < k) throw PreconditionViolation("smoothed_correlation needs N >= k");
  std::vector<std::vector<double>> a(k, std::vector<double>(n));
  for (int m = 0; m < k; ++m)
    for (int i = 0; i < n; ++i) a[m][i] = theta_eta(s.eigenvalues(i) - e - alphas[m] / n, eta);

  const double dn = n;
  if (k == 1) {
    double sum = 0;
    for (double v : a[0]) sum += v;
    return sum / dn;
  }
  if (k == 2) {
    double sum = 0;
    for (int i = 0; i < n; ++i) {
      double row = 0;
      for (int j = 0; j < n; ++j)
        if (j != i) row += a[1][j];
      sum += a[0][i] * row;
    }
    return sum / (dn * (dn - 1));
  }
  if (dn * dn * dn <= 1e8) {
    double sum = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const double ij = a[0][i] * a[1][j];
        double row = 0;
        for (int l = 0; l < n; ++l)
          if (l != i && l != j) row += a[2][l];
        sum += ij * row;
      }
    return sum / (dn * (dn - 1) * (dn - 2));
  }
  CounterRng rng(derive(seed, 0xc0ffee, static_cast<std::uint64_t>(n)));
  constexpr int kTuples = 1000000;
  double sum = 0;
  for (int t = 0; t < kTuples; ++t) {
    std::uint64_t i, j, l;
    do {
      i = rng.below(n);
      j = rng.below(n);
      l = rng.below(n);
    } while (i == j || j == l || i == l);
    sum += a[0][i] * a[1][j] * a[2][l];
  }
  return sum / kTuples;
}

std::vector<double> gap_statistics(const SpectralData& s, double lo, double hi) {
  if (!(lo > -2 && hi < 2 && lo < hi)) throw PreconditionViolation("gap window must be a bulk interval inside (-2, 2)");
  const auto& ev = s.eigenvalues;
  const double n = static_cast<double>(ev.size());
  std::vector<double> gaps;
  for (Eigen::Index j = 0; j + 1 < ev.size(); ++j) {
    if (ev(j) < lo || ev(j + 1) > hi) continue;
    gaps.push_back(n * rho_sc(ev(j)) * (ev(j + 1) - ev(j)));
  }
  if (gaps.empty()) throw EmptyWindow("fewer than two eigenvalues inside the gap window");
  return gaps;
}

double sine_kernel(double x) {
  if (x == 0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

double moving_average(const SpectralData& s, int j, int k) {
  if (k < 1 || j < 0 || j + k > s.eigenvalues.size()) throw PreconditionViolation("moving_average out of range");
  return s.eigenvalues.segment(j, k).mean();
}

std::string gaps_csv(const std::vector<double>& gaps) {
  CsvTable t;
  t.header = {"gap"};
  for (double g : gaps) t.add({fmt17(g)});
  return t.str();
}

}  // namespace rmt
