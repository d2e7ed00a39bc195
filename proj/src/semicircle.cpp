#include "rmtlab/semicircle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rmtlab/errors.hpp"

namespace rmt {

using std::numbers::pi;

cplx msc(cplx z) {
  if (!(z.imag() > 0)) throw DomainError("msc needs Im z > 0");
  // sqrt(z-2) sqrt(z+2) has its cut on [-2,2] and behaves like z at infinity,
  // so z + r never cancels and -2/(z + r) is the Im-positive root.
  const cplx r = std::sqrt(z - 2.0) * std::sqrt(z + 2.0);
  return -2.0 / (z + r);
}

double rho_sc(double e) { return std::sqrt(std::max(4.0 - e * e, 0.0)) / (2 * pi); }

double n_sc(double e) {
  if (e <= -2) return 0.0;
  if (e >= 2) return 1.0;
  return 0.5 + e * std::sqrt(4 - e * e) / (4 * pi) + std::asin(e / 2) / pi;
}

std::vector<double> classical_locations(int n) {
  if (n < 1) throw PreconditionViolation("classical_locations needs n >= 1");
  std::vector<double> g(n);
  for (int j = 1; j <= n; ++j) {
    if (j == n) {
      g[j - 1] = 2.0;
      continue;
    }
    const double target = static_cast<double>(j) / n;
    double lo = -2, hi = 2;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (n_sc(mid) < target) lo = mid;
      else hi = mid;
    }
    g[j - 1] = 0.5 * (lo + hi);
  }
  return g;
}

double control_g(cplx z, double delta_plus) {
  const double kappa = std::abs(std::abs(z.real()) - 2);
  const cplx m = msc(z);
  return std::min(std::sqrt(kappa + z.imag()), std::max(delta_plus, std::abs((m * m).real() - 1)));
}

ControlPoint control_point(double e, double eta, double delta_plus) {
  ControlPoint c;
  c.e = e;
  c.eta = eta;
  c.z = cplx(e, eta);
  c.kappa = std::abs(std::abs(e) - 2);
  c.g = control_g(c.z, delta_plus);
  return c;
}

cplx stable_branch(cplx z, cplx t, int steps) {
  cplx s = msc(z);
  if (t == 0.0) return s;
  steps = std::max(steps, 1);
  for (int k = 1; k <= steps; ++k) {
    const cplx tk = t * (static_cast<double>(k) / steps);
    const cplx root = std::sqrt((z + tk) * (z + tk) - 4.0);
    const cplx base = tk + (-z - tk) / 2.0;
    const cplx s1 = base + root / 2.0, s2 = base - root / 2.0;
    if (std::abs(s1 - s2) < 10 * std::abs(t)) throw BranchAmbiguous("stable_branch: roots too close");
    s = std::abs(s1 - s) <= std::abs(s2 - s) ? s1 : s2;
  }
  // one Newton polish on s^2 + (z - t)s + 1 - tz = 0
  const cplx f = s * s + (z - t) * s + 1.0 - t * z;
  const cplx df = 2.0 * s + z - t;
  return s - f / df;
}

}  // namespace rmt
