#include "rmtlab/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "rmtlab/errors.hpp"
#include "rmtlab/report.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/semicircle.hpp"

namespace rmt {
namespace {

Eigen::MatrixXcd shifted_inverse(const Eigen::MatrixXcd& a, cplx z) {
  Eigen::MatrixXcd d = a;
  d.diagonal().array() -= z;
  return d.partialPivLu().inverse();
}

double max_abs(const Eigen::MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

Resolvent::Resolvent(const RandomMatrix& h) {
  if (h.symmetry == SymmetryClass::RealSymmetric) {
    SymmetricEig e = eigh(Eigen::MatrixXd(h.entries.real()), true);
    values_ = std::move(e.values);
    vectors_ = e.vectors.cast<cplx>();
  } else {
    HermitianEig e = eigh(h.entries, true);
    values_ = std::move(e.values);
    vectors_ = std::move(e.vectors);
  }
  weights_ = vectors_.cwiseAbs2();
}

Eigen::VectorXcd Resolvent::diagonal(cplx z) const {
  const Eigen::VectorXcd w = (values_.cast<cplx>().array() - z).inverse();
  const Eigen::VectorXd re = weights_ * w.real(), im = weights_ * w.imag();
  Eigen::VectorXcd g(re.size());
  g.real() = re;
  g.imag() = im;
  return g;
}

Eigen::MatrixXcd Resolvent::full(cplx z) const {
  const Eigen::VectorXcd w = (values_.cast<cplx>().array() - z).inverse();
  return (vectors_ * w.asDiagonal()) * vectors_.adjoint();
}

Eigen::MatrixXcd Resolvent::columns(cplx z, std::span<const int> cols) const {
  const Eigen::VectorXcd w = (values_.cast<cplx>().array() - z).inverse();
  Eigen::MatrixXcd rows(static_cast<Eigen::Index>(cols.size()), vectors_.cols());
  for (std::size_t c = 0; c < cols.size(); ++c) rows.row(static_cast<Eigen::Index>(c)) = vectors_.row(cols[c]);
  return (vectors_ * w.asDiagonal()) * rows.adjoint();
}

GreenEvaluation Resolvent::evaluate(cplx z, std::span<const int> cols) const {
  if (z.imag() == 0) throw DomainError("green needs Im z != 0");
  GreenEvaluation ev;
  ev.z = z;
  ev.g_diag = diagonal(z);
  ev.m_n = ev.g_diag.mean();
  if (z.imag() > 0) {
    const cplx m = msc(z);
    ev.lambda_d = (ev.g_diag.array() - m).abs().maxCoeff();
  } else {
    const cplx m = std::conj(msc(std::conj(z)));
    ev.lambda_d = (ev.g_diag.array() - m).abs().maxCoeff();
  }
  const int n = this->n();
  double off = 0;
  if (cols.empty()) {
    const Eigen::MatrixXcd g = full(z);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if (i != j) off = std::max(off, std::abs(g(i, j)));
  } else {
    const Eigen::MatrixXcd g = columns(z, cols);
    for (std::size_t c = 0; c < cols.size(); ++c)
      for (int i = 0; i < n; ++i)
        if (i != cols[c]) off = std::max(off, std::abs(g(i, static_cast<Eigen::Index>(c))));
  }
  ev.offdiag_max = off;
  return ev;
}

GreenEvaluation green(const RandomMatrix& h, cplx z, Eigen::MatrixXcd* full) {
  const Resolvent r(h);
  GreenEvaluation ev = r.evaluate(z);
  if (full) *full = r.full(z);
  return ev;
}

Eigen::MatrixXcd minor_resolvent(const Eigen::MatrixXcd& h, std::vector<int> removed, cplx z) {
  const int n = static_cast<int>(h.rows());
  std::sort(removed.begin(), removed.end());
  removed.erase(std::unique(removed.begin(), removed.end()), removed.end());
  std::vector<int> kept;
  for (int i = 0, r = 0; i < n; ++i) {
    if (r < static_cast<int>(removed.size()) && removed[r] == i) {
      ++r;
      continue;
    }
    kept.push_back(i);
  }
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  if (kept.empty()) return out;
  Eigen::MatrixXcd sub(kept.size(), kept.size());
  for (std::size_t a = 0; a < kept.size(); ++a)
    for (std::size_t b = 0; b < kept.size(); ++b) sub(a, b) = h(kept[a], kept[b]);
  const Eigen::MatrixXcd inv = shifted_inverse(sub, z);
  for (std::size_t a = 0; a < kept.size(); ++a)
    for (std::size_t b = 0; b < kept.size(); ++b) out(kept[a], kept[b]) = inv(a, b);
  return out;
}

MinorQuantities minor_green(const RandomMatrix& h, std::vector<int> t, cplx z) {
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  if (static_cast<int>(t.size()) >= h.n) throw PreconditionViolation("minor_green needs |T| < N");
  for (int i : t)
    if (i < 0 || i >= h.n) throw PreconditionViolation("minor index out of range");
  MinorQuantities q;
  q.t = t;
  q.g = minor_resolvent(h.entries, t, z);
  std::vector<cplx> diag;
  for (int i = 0, r = 0; i < h.n; ++i) {
    if (r < static_cast<int>(t.size()) && t[r] == i) {
      ++r;
      continue;
    }
    diag.push_back(q.g(i, i));
  }
  q.g_minor = Eigen::Map<Eigen::VectorXcd>(diag.data(), static_cast<Eigen::Index>(diag.size()));
  const auto m = static_cast<Eigen::Index>(t.size());
  q.z_ij.resize(m, m);
  q.k_ij.resize(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) {
      const int i = t[a], j = t[b];
      const cplx zz = (h.entries.row(i) * q.g * h.entries.col(j))(0, 0);
      q.z_ij(a, b) = zz;
      q.k_ij(a, b) = h.entries(i, j) - (i == j ? z : cplx(0)) - zz;
    }
  return q;
}

double IdentityResiduals::max() const { return std::max({gii_kii, gij_kij, gii_gjii, gij_gkij}); }

IdentityResiduals minor_identity_residuals(const RandomMatrix& h, cplx z, const std::vector<int>& t,
                                           std::uint64_t seed) {
  const int n = h.n;
  const Eigen::MatrixXcd& H = h.entries;
  std::vector<int> free_idx;
  for (int i = 0; i < n; ++i)
    if (std::find(t.begin(), t.end(), i) == t.end()) free_idx.push_back(i);
  const int nf = static_cast<int>(free_idx.size());

  std::map<std::vector<int>, Eigen::MatrixXcd> cache;
  auto minor = [&](std::vector<int> extra) -> const Eigen::MatrixXcd& {
    extra.insert(extra.end(), t.begin(), t.end());
    std::sort(extra.begin(), extra.end());
    auto it = cache.find(extra);
    if (it == cache.end()) it = cache.emplace(extra, minor_resolvent(H, extra, z)).first;
    return it->second;
  };
  // K^(S)_ab = h_ab - z delta_ab - (H G^(S) H)_ab for a, b in S
  auto kval = [&](const Eigen::MatrixXcd& gs, int a, int b) {
    return H(a, b) - (a == b ? z : cplx(0)) - (H.row(a) * gs * H.col(b))(0, 0);
  };

  const Eigen::MatrixXcd& g = minor({});
  IdentityResiduals r;
  const bool exhaustive = n <= 16;
  CounterRng rng(derive(seed, 0x1d, static_cast<std::uint64_t>(n)));
  auto pick = [&]() { return free_idx[rng.below(static_cast<std::uint64_t>(nf))]; };

  auto check1 = [&](int i) {
    const Eigen::MatrixXcd& gi = minor({i});
    r.gii_kii = std::max(r.gii_kii, std::abs(g(i, i) - 1.0 / kval(gi, i, i)));
  };
  auto check2 = [&](int i, int j) {
    const Eigen::MatrixXcd& gi = minor({i});
    const Eigen::MatrixXcd& gj = minor({j});
    const cplx k = kval(minor({i, j}), i, j);
    r.gij_kij = std::max({r.gij_kij, std::abs(g(i, j) + g(j, j) * gj(i, i) * k),
                          std::abs(g(i, j) + g(i, i) * gi(j, j) * k)});
  };
  auto check3 = [&](int i, int j) {
    const Eigen::MatrixXcd& gj = minor({j});
    r.gii_gjii = std::max(r.gii_gjii, std::abs(g(i, i) - gj(i, i) - g(i, j) * g(j, i) / g(j, j)));
  };
  auto check4 = [&](int i, int j, int k) {
    const Eigen::MatrixXcd& gk = minor({k});
    r.gij_gkij = std::max(r.gij_gkij, std::abs(g(i, j) - gk(i, j) - g(i, k) * g(k, j) / g(k, k)));
  };

  if (exhaustive) {
    for (int i : free_idx) check1(i);
    for (int i : free_idx)
      for (int j : free_idx) {
        if (i == j) continue;
        check2(i, j);
        check3(i, j);
        for (int k : free_idx)
          if (k != i && k != j) check4(i, j, k);
      }
  } else {
    for (int s = 0; s < 100; ++s) {
      int i = pick(), j = pick(), k = pick();
      check1(i);
      if (nf < 3) continue;
      while (j == i) j = pick();
      while (k == i || k == j) k = pick();
      check2(i, j);
      check3(i, j);
      check4(i, j, k);
    }
  }
  return r;
}

double schur_residual(const RandomMatrix& h, cplx z, int k) {
  const int n = h.n;
  if (k < 1 || k >= n) throw PreconditionViolation("schur_residual needs 1 <= k < N");
  Eigen::MatrixXcd d = h.entries;
  d.diagonal().array() -= z;
  const Eigen::MatrixXcd full = d.partialPivLu().inverse();
  const Eigen::MatrixXcd a = d.topLeftCorner(k, k);
  const Eigen::MatrixXcd bs = d.topRightCorner(k, n - k);
  const Eigen::MatrixXcd b = d.bottomLeftCorner(n - k, k);
  const Eigen::MatrixXcd c = d.bottomRightCorner(n - k, n - k);
  const Eigen::MatrixXcd hat = a - bs * c.partialPivLu().solve(b);
  return max_abs(full.topLeftCorner(k, k) - hat.partialPivLu().inverse());
}

double ward_residual(const Eigen::MatrixXcd& g, double eta) {
  double worst = 0;
  for (Eigen::Index l = 0; l < g.cols(); ++l) {
    const double lhs = g.col(l).squaredNorm();
    const double rhs = g(l, l).imag() / eta;
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
  }
  return worst;
}

double interlacing_violation(const RandomMatrix& h, int k) {
  const int n = h.n;
  if (n < 2 || k < 0 || k >= n) throw PreconditionViolation("interlacing needs N >= 2 and 0 <= k < N");
  std::vector<int> kept;
  for (int i = 0; i < n; ++i)
    if (i != k) kept.push_back(i);
  Eigen::MatrixXcd sub(n - 1, n - 1);
  for (int a = 0; a < n - 1; ++a)
    for (int b = 0; b < n - 1; ++b) sub(a, b) = h.entries(kept[a], kept[b]);
  const Eigen::VectorXd lam = eigh(h.entries, false).values;
  const Eigen::VectorXd mu = eigh(sub, false).values;
  double v = 0;
  for (int j = 0; j < n - 1; ++j) v = std::max({v, lam(j) - mu(j), mu(j) - lam(j + 1)});
  return v;
}

UpsilonPair upsilon(const RandomMatrix& h, const VarianceProfile& profile, cplx z, int i) {
  const int n = h.n;
  if (profile.n != n) throw PreconditionViolation("upsilon: profile size mismatch");
  if (i < 0 || i >= n) throw PreconditionViolation("upsilon: index out of range");
  const Eigen::MatrixXcd& H = h.entries;
  const Eigen::MatrixXcd g = minor_resolvent(H, {}, z);
  const Eigen::MatrixXcd gi = minor_resolvent(H, {i}, z);
  UpsilonPair u;
  cplx bg = 0;
  for (int j = 0; j < n; ++j) bg += profile.sigma2(i, j) * g(j, j);
  u.a = 1.0 / g(i, i) + z + bg;

  cplx off = 0, expect = -z;
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    off += profile.sigma2(i, j) * g(i, j) * g(j, i) / g(i, i);
    expect -= profile.sigma2(i, j) * gi(j, j);
  }
  const cplx k = H(i, i) - z - (H.row(i) * gi * H.col(i))(0, 0);
  u.b = profile.sigma2(i, i) * g(i, i) + off + (k - expect);
  return u;
}

double upsilon_max(const Resolvent& r, const VarianceProfile& profile, cplx z) {
  const Eigen::VectorXcd g = r.diagonal(z);
  const Eigen::VectorXd re = profile.sigma2 * g.real(), im = profile.sigma2 * g.imag();
  double worst = 0;
  for (Eigen::Index i = 0; i < g.size(); ++i)
    worst = std::max(worst, std::abs(1.0 / g(i) + z + cplx(re(i), im(i))));
  return worst;
}

RandomMatrix zero_entry(const RandomMatrix& h, int i, int j) {
  RandomMatrix q = h;
  q.entries(i, j) = 0;
  q.entries(j, i) = 0;
  return q;
}

double swap_expansion_residual(const RandomMatrix& q, int i, int j, cplx v, cplx z, int order) {
  const int n = q.n;
  if (order < 0 || order > 5) throw PreconditionViolation("swap expansion order must be in 0..5");
  if (i < 0 || j < 0 || i >= n || j >= n) throw PreconditionViolation("swap index out of range");
  if (q.entries(i, j) != cplx(0) || q.entries(j, i) != cplx(0))
    throw PreconditionViolation("swap expansion needs q with a zero (i,j) entry");
  if (z.imag() == 0) throw DomainError("swap expansion needs Im z != 0");
  Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(n, n);
  V(i, j) += v;
  V(j, i) += std::conj(v);
  const double eps = 1.0 / std::sqrt(static_cast<double>(n));
  const Eigen::MatrixXcd R = shifted_inverse(q.entries, z);
  const Eigen::MatrixXcd S = shifted_inverse(q.entries + eps * V, z);
  const Eigen::MatrixXcd RV = R * V;

  Eigen::MatrixXcd term = R, sum = R;
  double coef = 1;
  for (int m = 1; m <= std::min(order, 4); ++m) {
    term = RV * term;
    coef *= -eps;
    sum += coef * term;
  }
  if (order < 5) return max_abs(S - sum);
  Eigen::MatrixXcd tail = S;
  for (int m = 0; m < 5; ++m) tail = RV * tail;
  return max_abs(S - (sum - std::pow(eps, 5) * tail));
}

std::string green_csv(const std::vector<GreenEvaluation>& rows) {
  CsvTable t;
  t.header = {"z_re", "z_im", "m_re", "m_im", "lambda_d", "offdiag_max"};
  for (const auto& r : rows)
    t.add({fmt17(r.z.real()), fmt17(r.z.imag()), fmt17(r.m_n.real()), fmt17(r.m_n.imag()), fmt17(r.lambda_d),
           fmt17(r.offdiag_max)});
  return t.str();
}

}  // namespace rmt
