#pragma once

#include <string>

#include <Eigen/Dense>
#include <json.hpp>

namespace rmt {

enum class BandShape { Uniform, Triangular, TruncatedGaussian };

BandShape band_shape_from_name(const std::string& name);
std::string band_shape_name(BandShape s);
// Shape f with integral 1, and its sup norm / support half-width.
double band_shape_value(BandShape s, double x);
double band_shape_sup(BandShape s);
double band_shape_halfwidth(BandShape s);

struct VarianceProfile {
  std::string type;         // "wigner" | "generalized" | "band"
  nlohmann::json params;    // constructor arguments, enough to rebuild
  int n = 0;
  Eigen::MatrixXd sigma2;
  double m_param = 0;       // 1 / max sigma2
  double c_inf = 0, c_sup = 0;
  double delta_minus = 0, delta_plus = 0;
  bool simple_top = true;
  double pre_norm_m = 0;    // band only: 1 / max of the raw entries

  nlohmann::json to_json() const;
  std::string id() const { return to_json().dump(); }
};

struct SpectralGap {
  double delta_minus;
  double delta_plus;
  bool simple_top;
};

VarianceProfile wigner_profile(int n);
VarianceProfile generalized_profile(int n, const Eigen::MatrixXd& weights);
VarianceProfile band_profile(int n, double w, BandShape f);
VarianceProfile profile_from_json(const nlohmann::json& j);

// Two-block weights (0.5 inside the first half, 1.5 inside the second,
// 1 across), a standard nonconstant test case.
Eigen::MatrixXd two_block_weights(int n, double w_first = 0.5, double w_second = 1.5);

// Dense eigendecomposition of B.
SpectralGap spectral_gap(const VarianceProfile& p);
// Spectrum of a circulant profile from the DFT of its first row (sorted).
Eigen::VectorXd circulant_spectrum(const VarianceProfile& p);

std::string sigma2_csv(const VarianceProfile& p);

}  // namespace rmt
