#pragma once

#include <complex>
#include <vector>

namespace rmt {

using cplx = std::complex<double>;

struct ControlPoint {
  double e = 0, eta = 0;
  cplx z;
  double kappa = 0;
  double g = 0;
};

// Stieltjes transform of the semicircle law.  Throws DomainError if Im z <= 0.
cplx msc(cplx z);
double rho_sc(double e);
double n_sc(double e);
std::vector<double> classical_locations(int n);
double control_g(cplx z, double delta_plus);
ControlPoint control_point(double e, double eta, double delta_plus);
// Root of s + 1/(z + s) = t continued from m_sc(z) at t = 0.
cplx stable_branch(cplx z, cplx t, int steps = 10);

}  // namespace rmt
