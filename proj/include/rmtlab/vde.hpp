#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rmtlab/linalg.hpp"
#include "rmtlab/profiles.hpp"

namespace rmt {

struct ContractionCertificate {
  double tau = 0;
  double bound = 0;        // max_x |tau + x zeta| / (1 + tau) over [-1+delta_-, 1-delta_+]
  double two_case_tau = 0;    // 0 if g_hat == delta_+, else delta_-/10
  double two_case_bound = 0;
  double g_hat = 0;
  cplx zeta;
};

struct VdeSolution {
  cplx z;
  Eigen::VectorXcd m_vec;
  double residual = 0;
  int iterations = 0;
  cplx zeta;
  double tau = 0;
  double contraction = 0;
};

// Bound evaluation without the bound < 1 assertion.
ContractionCertificate contraction_bound(const VarianceProfile& p, cplx z);
// Throws NoContraction if the bound is >= 1.
ContractionCertificate contraction_certificate(const VarianceProfile& p, cplx z);

VdeSolution solve_vde(const VarianceProfile& p, cplx z, double tol = 1e-13, int max_iter = 10000,
                      double theta = 0.5);

struct NeumannResult {
  Eigen::VectorXcd u;
  std::vector<double> term_norms;
  ContractionCertificate certificate;
};
NeumannResult neumann_solve(const VarianceProfile& p, cplx z, const Eigen::VectorXcd& w);

std::string vde_csv(const VdeSolution& s);

}  // namespace rmt
