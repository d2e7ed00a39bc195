#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/linalg.hpp"
#include "rmtlab/profiles.hpp"

namespace rmt {

struct GreenEvaluation {
  cplx z;
  Eigen::VectorXcd g_diag;
  cplx m_n;
  double offdiag_max = 0;  // over all i != j, or over the sampled columns
  double lambda_d = 0;
};

// Cached eigendecomposition; every z reuses it.
class Resolvent {
 public:
  explicit Resolvent(const RandomMatrix& h);

  int n() const { return static_cast<int>(values_.size()); }
  const Eigen::VectorXd& eigenvalues() const { return values_; }
  const Eigen::MatrixXcd& eigenvectors() const { return vectors_; }

  Eigen::VectorXcd diagonal(cplx z) const;
  Eigen::MatrixXcd full(cplx z) const;
  // Columns j of G restricted to `cols` (N x |cols|).
  Eigen::MatrixXcd columns(cplx z, std::span<const int> cols) const;
  // Off-diagonal maximum is taken over `cols` when given, else over all of G.
  GreenEvaluation evaluate(cplx z, std::span<const int> cols = {}) const;

 private:
  Eigen::VectorXd values_;
  Eigen::MatrixXcd vectors_;
  Eigen::MatrixXd weights_;  // |U_{i alpha}|^2
};

GreenEvaluation green(const RandomMatrix& h, cplx z, Eigen::MatrixXcd* full = nullptr);

struct MinorQuantities {
  std::vector<int> t;          // removed indices, sorted
  Eigen::MatrixXcd g;          // (H^(T) - z)^-1 padded to N x N, zero on T rows/cols
  Eigen::VectorXcd g_minor;    // diagonal over the kept indices, in order
  Eigen::MatrixXcd z_ij, k_ij; // |T| x |T|, positions follow t
};

// Padded minor resolvent by direct LU inversion.
Eigen::MatrixXcd minor_resolvent(const Eigen::MatrixXcd& h, std::vector<int> removed, cplx z);
MinorQuantities minor_green(const RandomMatrix& h, std::vector<int> t, cplx z);

struct IdentityResiduals {
  double gii_kii = 0;   // G_ii = 1/K^(i)_ii
  double gij_kij = 0;   // G_ij = -G_jj G^(j)_ii K^(ij)_ij = -G_ii G^(i)_jj K^(ij)_ij
  double gii_gjii = 0;  // G_ii - G^(j)_ii = G_ij G_ji / G_jj
  double gij_gkij = 0;  // G_ij - G^(k)_ij = G_ik G_kj / G_kk
  double max() const;
};

// All identities relative to the minor T (default empty).  Exhaustive for
// N <= 16, else 100 seeded tuples per identity.
IdentityResiduals minor_identity_residuals(const RandomMatrix& h, cplx z, const std::vector<int>& t = {},
                                           std::uint64_t seed = 0);

// Block-inverse check: top-left k x k block of (H-z)^-1 vs (A - B* C^-1 B)^-1.
double schur_residual(const RandomMatrix& h, cplx z, int k);
// max_l |sum_k |G_kl|^2 - Im G_ll / eta| / (Im G_ll / eta)
double ward_residual(const Eigen::MatrixXcd& g, double eta);
// Largest amount by which the minor H^(k) spectrum fails to interlace H's.
double interlacing_violation(const RandomMatrix& h, int k);

struct UpsilonPair {
  cplx a;  // 1/G_ii + z + sum_j s2_ij G_jj
  cplx b;  // s2_ii G_ii + sum_{j!=i} s2_ij G_ij G_ji / G_ii + (K^(i)_ii - E K^(i)_ii)
};
UpsilonPair upsilon(const RandomMatrix& h, const VarianceProfile& profile, cplx z, int i);
// max_i |Upsilon_i| from the definitional form, using only the diagonal of G.
double upsilon_max(const Resolvent& r, const VarianceProfile& profile, cplx z);

// H = Q + N^-1/2 V, V = v E_ij + conj(v) E_ji.  For order 0..4 returns the
// truncation error ||S - sum_{m<=order} (-N^-1/2)^m (RV)^m R||_max; order 5
// returns the residual of the exact identity with the (RV)^5 S tail.
double swap_expansion_residual(const RandomMatrix& q, int i, int j, cplx v, cplx z, int order);
RandomMatrix zero_entry(const RandomMatrix& h, int i, int j);

std::string green_csv(const std::vector<GreenEvaluation>& rows);

}  // namespace rmt
