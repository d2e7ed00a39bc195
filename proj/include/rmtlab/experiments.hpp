#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/entrylaws.hpp"
#include "rmtlab/profiles.hpp"

namespace rmt {

// One row of cells.csv.  Scalar cells carry only `value`; sampled cells
// carry the summary over their samples and value = mean.
struct Cell {
  std::string cell;
  std::string statistic;
  std::size_t samples = 0;
  double mean = NAN, stderr_ = NAN, median = NAN, q05 = NAN, q95 = NAN, value = NAN;

  static Cell from_samples(std::string cell, std::string statistic, const std::vector<double>& x);
  static Cell scalar(std::string cell, std::string statistic, double value, std::size_t samples);
};

struct Fit {
  std::string name;
  double slope = 0, intercept = 0;
  double slope_se = 0;  // bootstrap over samples
  std::size_t points = 0;
};

struct Rule {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentReport {
  std::string id;
  nlohmann::json params;
  std::uint64_t master_seed = 0;
  std::vector<Cell> cells;
  std::vector<Fit> fits;
  std::vector<Rule> rules;
  std::vector<std::string> warnings;
  double wall_clock_s = 0;

  bool passed() const;
  const Rule* rule(const std::string& name) const;
  const Fit* fit(const std::string& name) const;
  const Cell* find(const std::string& cell, const std::string& statistic) const;
  nlohmann::json to_json() const;
  // Columns: experiment,cell,statistic,samples,mean,stderr,median,q05,q95,value
  std::string cells_csv() const;
};

constexpr int kBootstrapResamples = 200;

struct LocalLawConfig {
  VarianceProfile profile;
  EntryLaw law = EntryLaw::gaussian();
  SymmetryClass symmetry = SymmetryClass::ComplexHermitian;
  std::vector<double> e_grid{0.0};
  std::vector<double> eta_grid;
  int samples = 1;
  std::uint64_t seed = 0;
  double admissibility = 1.0;  // cell kept when 1/sqrt(M eta) <= kappa^2 * admissibility
  int offdiag_columns = 128;   // 0: exact max over the full G
  double slope_lo = -0.7, slope_hi = -0.3;
  // Delocalization check over `deloc_samples` matrices (0 disables).
  int deloc_samples = 0;
  double deloc_lo = -1, deloc_hi = 1;
  double deloc_frequency = 0.99;
  int threads = 1;
};
ExperimentReport local_law_scan(const LocalLawConfig& cfg);

struct FourMomentConfig {
  VarianceProfile profile;
  EntryLaw law_v = EntryLaw::gaussian();
  EntryLaw law_w = EntryLaw::gaussian();
  EntryLaw control_a = EntryLaw::bernoulli();
  EntryLaw control_b = EntryLaw::gaussian();
  SymmetryClass symmetry = SymmetryClass::ComplexHermitian;
  std::vector<std::complex<double>> z_list;
  std::string statistic = "im_trace";
  int samples = 1;
  std::uint64_t seed = 0;
  double confidence = 0.95;
  // Per-entry telescoping for N <= 100: checkpoints every `telescoping_stride` swaps.
  bool telescoping = false;
  int telescoping_stride = 0;
  int threads = 1;
};
ExperimentReport four_moment_swap(const FourMomentConfig& cfg);

// F registry for the swap experiment, evaluated from eigenvalues.
double swap_statistic(const std::string& name, const Eigen::VectorXd& eigenvalues,
                      const std::vector<std::complex<double>>& z_list);
const std::vector<std::string>& swap_statistic_names();

struct TraceMomentConfig {
  int k_max = 8;
  std::vector<int> moment_ks{2, 4};
  VarianceProfile profile;
  EntryLaw law = EntryLaw::gaussian();
  SymmetryClass symmetry = SymmetryClass::ComplexHermitian;
  int samples = 1;
  std::uint64_t seed = 0;
  double delta = 0.1;  // exponent slack in S(k, p)
  int threads = 1;
};
ExperimentReport trace_moment_bound(const TraceMomentConfig& cfg);

enum class LdpMode { Linear, QuadraticDiag, QuadraticOffdiag };
LdpMode ldp_mode_from_name(const std::string& s);
std::string ldp_mode_name(LdpMode m);

struct LdpConfig {
  EntryLaw law = EntryLaw::gaussian();
  LdpMode mode = LdpMode::Linear;
  int n = 16;
  std::vector<double> coefficients;  // linear: A (length n); quadratic: B row-major n x n; empty: generated
  std::vector<double> d_grid{0, 1, 2, 3, 4, 5, 6};
  int samples = 100000;
  std::uint64_t seed = 0;
  double c_max = 10;  // largest acceptable envelope prefactor
  int threads = 1;
};
ExperimentReport ldp_tails(const LdpConfig& cfg);
double ldp_exponent(LdpMode mode, double alpha);

struct GapConfig {
  VarianceProfile profile_a, profile_b;
  EntryLaw law_a = EntryLaw::gaussian();
  EntryLaw law_b = EntryLaw::gaussian();
  SymmetryClass symmetry = SymmetryClass::ComplexHermitian;
  double window_lo = -1, window_hi = 1;
  int samples_a = 1, samples_b = 1;
  std::uint64_t seed = 0;
  std::vector<int> moving_ks{1, 4, 16};
  double moving_delta = 0.1;
  double ks_distance_max = 0.05;
  double ks_p_min = 0.01;
  int threads = 1;
};
ExperimentReport gap_universality(const GapConfig& cfg);

// Mean (1/N) sum (lambda_j - gamma_j)^2 over samples for each N, full and
// restricted to |gamma_j| <= 2 - kappa.
struct RigidityConfig {
  std::vector<int> n_list{250, 500, 1000};
  EntryLaw law = EntryLaw::gaussian();
  SymmetryClass symmetry = SymmetryClass::ComplexHermitian;
  int samples = 1;
  std::uint64_t seed = 0;
  double kappa = 0.5;
  double slope_lo = -2.4, slope_hi = -1.6;
  double bulk_max = 1e-4;  // bound on the bulk statistic at the largest N
  int threads = 1;
};
ExperimentReport rigidity_scaling(const RigidityConfig& cfg);

constexpr double kBulkMargin = 0.2;

}  // namespace rmt
