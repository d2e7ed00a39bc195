#include "rmtlab/vde.hpp"

#include <algorithm>
#include <cmath>

#include "rmtlab/errors.hpp"
#include "rmtlab/report.hpp"
#include "rmtlab/semicircle.hpp"

namespace rmt {
namespace {

double grid_max(cplx zeta, double tau, double lo, double hi) {
  constexpr int kGrid = 10000;
  auto f = [&](double x) { return std::abs(tau + x * zeta) / (1 + tau); };
  double best = std::max(f(lo), f(hi));
  for (int k = 1; k < kGrid - 1; ++k) best = std::max(best, f(lo + (hi - lo) * k / (kGrid - 1)));
  // vertex of the quadratic |tau + x zeta|^2
  const double xv = -tau * zeta.real() / std::norm(zeta);
  if (xv > lo && xv < hi) best = std::max(best, f(xv));
  return best;
}

double vde_residual(const VarianceProfile& p, cplx z, const Eigen::VectorXcd& m, Eigen::VectorXcd* f) {
  const Eigen::VectorXcd bm = p.sigma2 * m;
  Eigen::VectorXcd fm = -(bm.array() + z).inverse();
  const double r = (m - fm).cwiseAbs().maxCoeff();
  if (f) *f = std::move(fm);
  return r;
}

}  // namespace

ContractionCertificate contraction_bound(const VarianceProfile& p, cplx z) {
  if (!(p.delta_minus > 0)) throw PreconditionViolation("contraction needs delta_- > 0");
  ContractionCertificate c;
  const cplx m = msc(z);
  c.zeta = m * m;
  const double lo = -1 + p.delta_minus, hi = std::max(lo, 1 - p.delta_plus);
  c.g_hat = std::max(p.delta_plus, std::abs(1 - c.zeta.real()));
  const double tau1 = p.delta_minus / 10;
  const double b0 = grid_max(c.zeta, 0.0, lo, hi), b1 = grid_max(c.zeta, tau1, lo, hi);
  c.two_case_tau = c.g_hat == p.delta_plus ? 0.0 : tau1;
  c.two_case_bound = c.two_case_tau == 0 ? b0 : b1;
  if (b0 <= b1) {
    c.tau = 0;
    c.bound = b0;
  } else {
    c.tau = tau1;
    c.bound = b1;
  }
  return c;
}

ContractionCertificate contraction_certificate(const VarianceProfile& p, cplx z) {
  ContractionCertificate c = contraction_bound(p, z);
  if (!(c.bound < 1)) throw NoContraction("no contraction: bound " + fmt17(c.bound));
  return c;
}

VdeSolution solve_vde(const VarianceProfile& p, cplx z, double tol, int max_iter, double theta) {
  if (!(z.imag() > 0)) throw DomainError("solve_vde needs Im z > 0");
  if (!(tol >= 1e-13)) throw PreconditionViolation("solve_vde needs tol >= 1e-13");
  VdeSolution s;
  s.z = z;
  s.m_vec = Eigen::VectorXcd::Constant(p.n, msc(z));
  Eigen::VectorXcd f;
  double best = vde_residual(p, z, s.m_vec, &f);
  int it = 0;
  while (best > tol) {
    if (it >= max_iter) throw NonConvergence("solve_vde: best residual " + fmt17(best));
    s.m_vec = (1 - theta) * s.m_vec + theta * f;
    ++it;
    best = vde_residual(p, z, s.m_vec, &f);
  }
  s.residual = best;
  s.iterations = it;
  const ContractionCertificate c = contraction_bound(p, z);
  s.zeta = c.zeta;
  s.tau = c.tau;
  s.contraction = c.bound;
  return s;
}

NeumannResult neumann_solve(const VarianceProfile& p, cplx z, const Eigen::VectorXcd& w) {
  if (w.size() != p.n) throw PreconditionViolation("neumann_solve: size mismatch");
  const double n = p.n;
  const double scale = std::max(1.0, w.norm());
  if (std::abs(w.sum()) / std::sqrt(n) > 1e-12 * scale)
    throw NotOrthogonal("neumann_solve: w not orthogonal to the constant vector");
  NeumannResult r;
  r.certificate = contraction_certificate(p, z);
  const double tau = r.certificate.tau;
  const cplx zeta = r.certificate.zeta;

  Eigen::VectorXcd term = w.array() - w.mean();
  r.u = Eigen::VectorXcd::Zero(p.n);
  for (int k = 0;; ++k) {
    const double tn = term.norm();
    r.term_norms.push_back(tn);
    if (tn < 1e-14 * scale) break;
    if (k > 1000000) throw NonConvergence("neumann_solve: series did not converge");
    r.u += term / (1 + tau);
    Eigen::VectorXcd next = (zeta * (p.sigma2 * term) + tau * term) / (1 + tau);
    term = next.array() - next.mean();
  }
  return r;
}

std::string vde_csv(const VdeSolution& s) {
  CsvTable t;
  t.header = {"i", "m_re", "m_im"};
  for (Eigen::Index i = 0; i < s.m_vec.size(); ++i)
    t.add({std::to_string(i), fmt17(s.m_vec(i).real()), fmt17(s.m_vec(i).imag())});
  return t.str();
}

}  // namespace rmt
