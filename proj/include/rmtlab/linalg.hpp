#pragma once

#include <Eigen/Dense>

namespace rmt {

using cplx = std::complex<double>;

struct HermitianEig {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXcd vectors; // columns; empty when only values were requested
};

struct SymmetricEig {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

// Dense LAPACK divide-and-conquer eigensolvers.  Throw EigFailure.
HermitianEig eigh(const Eigen::MatrixXcd& a, bool want_vectors = true);
SymmetricEig eigh(const Eigen::MatrixXd& a, bool want_vectors = true);

// Keep the BLAS backend single-threaded; parallelism lives at the sample level.
void pin_blas_threads();

}  // namespace rmt
