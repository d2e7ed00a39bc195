#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "rmtlab/entrylaws.hpp"
#include "rmtlab/linalg.hpp"
#include "rmtlab/profiles.hpp"

namespace rmt {

enum class SymmetryClass { RealSymmetric, ComplexHermitian };

SymmetryClass symmetry_from_name(const std::string& s);
std::string symmetry_name(SymmetryClass c);

struct Provenance {
  std::string profile_id;
  std::string law_id;
  std::uint64_t master_seed = 0;
  double flow_time = 0;
  std::optional<std::uint64_t> flow_seed;
};

struct RandomMatrix {
  int n = 0;
  SymmetryClass symmetry = SymmetryClass::ComplexHermitian;
  Eigen::MatrixXcd entries;
  Provenance provenance;
};

RandomMatrix sample_matrix(const VarianceProfile& profile, const EntryLaw& law, SymmetryClass cls,
                           std::uint64_t seed, int threads = 1);

// Entries with phi(i, j) < cut come from law_first, the rest from law_rest,
// where phi enumerates i <= j row-major from 0.  Same per-entry substreams as
// sample_matrix, so cut = 0 reproduces sample_matrix(law_rest).
RandomMatrix sample_matrix_swapped(const VarianceProfile& profile, const EntryLaw& law_first,
                                   const EntryLaw& law_rest, std::int64_t cut, SymmetryClass cls,
                                   std::uint64_t seed, int threads = 1);

// H_t = e^(-t/2) H_0 + (1 - e^(-t))^(1/2) V with V Gaussian, entry variance 1/N.
RandomMatrix ou_evolve(const RandomMatrix& h0, double t, std::uint64_t seed, int threads = 1);

// Wraps an explicit Hermitian matrix (tests, external input).
RandomMatrix from_dense(const Eigen::MatrixXcd& h, SymmetryClass cls);

// Real symmetric: N columns.  Hermitian: 2N columns re_0,im_0,re_1,im_1,...
std::string matrix_csv(const RandomMatrix& m);

}  // namespace rmt
