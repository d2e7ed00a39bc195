#include "rmtlab/linalg.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <string>

#include "rmtlab/errors.hpp"

extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace rmt {

HermitianEig eigh(const Eigen::MatrixXcd& a, bool want_vectors) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  HermitianEig out;
  out.values.resize(n);
  if (n == 0) return out;
  Eigen::MatrixXcd work = a;
  lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'L', n,
                                   work.data(), n, out.values.data());
  if (info != 0) throw EigFailure("zheevd failed, info=" + std::to_string(info));
  if (want_vectors) out.vectors = std::move(work);
  return out;
}

SymmetricEig eigh(const Eigen::MatrixXd& a, bool want_vectors) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  SymmetricEig out;
  out.values.resize(n);
  if (n == 0) return out;
  Eigen::MatrixXd work = a;
  lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'L', n,
                                   work.data(), n, out.values.data());
  if (info != 0) throw EigFailure("dsyevd failed, info=" + std::to_string(info));
  if (want_vectors) out.vectors = std::move(work);
  return out;
}

void pin_blas_threads() {
  if (openblas_set_num_threads) openblas_set_num_threads(1);
}

}  // namespace rmt
