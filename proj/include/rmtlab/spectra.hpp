#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/linalg.hpp"

namespace rmt {

struct SpectralData {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXcd eigenvectors; // empty when computed values-only
  Provenance provenance;
};

SpectralData spectral_data(const RandomMatrix& h, bool want_vectors = true);

struct CountingRecord {
  double e;
  double n_emp;
  double diff;  // n_emp - n_sc
};
struct CountingStats {
  std::vector<CountingRecord> records;
  double l1 = 0;   // trapezoid over [-3, 3], step 1e-5
  double sup = 0;  // over the same fine grid and the records
};
CountingStats counting_stats(const SpectralData& s, std::span<const double> grid);

double rigidity_stat(const SpectralData& s);
// Same average restricted to indices whose classical location has |gamma_j| <= 2 - kappa.
double rigidity_stat_bulk(const SpectralData& s, double kappa = 0.5);

struct DelocalizationStat {
  double max_sup_norm = 0;
  double max_edge_weighted = 0;  // ||u||_inf sqrt(N) (||lambda| - 2| + 1/N)^(1/2)
  int count = 0;
};
DelocalizationStat delocalization_stat(const SpectralData& s, double lo, double hi);

double theta_eta(double x, double eta);
// Direct sums over distinct index tuples; k = 3 falls back to 10^6 seeded
// tuples once N^3 exceeds 10^8.
double smoothed_correlation(const SpectralData& s, double e, std::span<const double> alphas, double eta,
                            std::uint64_t seed = 0);

// Unfolded gaps N rho_sc(lambda_j) (lambda_{j+1} - lambda_j) over consecutive
// eigenvalues inside [lo, hi].
std::vector<double> gap_statistics(const SpectralData& s, double lo, double hi);
double sine_kernel(double x);
// K^-1 sum_{i<K} lambda_{j+i}, j zero-based.
double moving_average(const SpectralData& s, int j, int k);

std::string gaps_csv(const std::vector<double>& gaps);

}  // namespace rmt
