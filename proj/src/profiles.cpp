#include "rmtlab/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rmtlab/errors.hpp"
#include "rmtlab/linalg.hpp"
#include "rmtlab/report.hpp"

namespace rmt {
namespace {

constexpr double kSimpleTol = 1e-9;

void fill_stats(VarianceProfile& p) {
  const double mx = p.sigma2.maxCoeff();
  p.m_param = 1.0 / mx;
  p.c_inf = p.n * p.sigma2.minCoeff();
  p.c_sup = p.n * mx;
}

SpectralGap gap_from_sorted(const Eigen::VectorXd& ev) {
  const Eigen::Index n = ev.size();
  SpectralGap g{1.0, 1.0, std::abs(ev(n - 1) - 1.0) <= kSimpleTol};
  if (n > 1) {
    g.delta_minus = 1.0 + ev(0);
    g.delta_plus = 1.0 - ev(n - 2);
    g.simple_top = g.simple_top && ev(n - 2) < 1.0 - kSimpleTol;
  }
  return g;
}

}  // namespace

BandShape band_shape_from_name(const std::string& name) {
  if (name == "uniform") return BandShape::Uniform;
  if (name == "triangular") return BandShape::Triangular;
  if (name == "truncated_gaussian") return BandShape::TruncatedGaussian;
  throw PreconditionViolation("unknown band shape '" + name + "'");
}

std::string band_shape_name(BandShape s) {
  switch (s) {
    case BandShape::Uniform: return "uniform";
    case BandShape::Triangular: return "triangular";
    case BandShape::TruncatedGaussian: return "truncated_gaussian";
  }
  return "";
}

double band_shape_value(BandShape s, double x) {
  const double ax = std::abs(x);
  switch (s) {
    case BandShape::Uniform: return ax <= 0.5 ? 1.0 : 0.0;
    case BandShape::Triangular: return std::max(0.0, 1.0 - ax);
    case BandShape::TruncatedGaussian: {
      static const double z = std::sqrt(2 * std::numbers::pi) * std::erf(3 / std::sqrt(2.0));
      return ax <= 3 ? std::exp(-0.5 * x * x) / z : 0.0;
    }
  }
  return 0.0;
}

double band_shape_sup(BandShape s) { return band_shape_value(s, 0.0); }

double band_shape_halfwidth(BandShape s) {
  switch (s) {
    case BandShape::Uniform: return 0.5;
    case BandShape::Triangular: return 1.0;
    case BandShape::TruncatedGaussian: return 3.0;
  }
  return 0.0;
}

nlohmann::json VarianceProfile::to_json() const { return {{"type", type}, {"n", n}, {"params", params}}; }

VarianceProfile wigner_profile(int n) {
  if (n < 1) throw PreconditionViolation("wigner_profile needs n >= 1");
  VarianceProfile p;
  p.type = "wigner";
  p.params = nlohmann::json::object();
  p.n = n;
  p.sigma2 = Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  fill_stats(p);
  // B is the projection onto the constant vector.
  p.delta_minus = p.delta_plus = 1.0;
  p.simple_top = true;
  return p;
}

VarianceProfile generalized_profile(int n, const Eigen::MatrixXd& weights) {
  if (n < 1 || weights.rows() != n || weights.cols() != n)
    throw PreconditionViolation("generalized_profile: weights must be n x n");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!(weights(i, j) > 0) || !std::isfinite(weights(i, j)))
        throw PreconditionViolation("generalized_profile: weights must be strictly positive");
      if (weights(i, j) != weights(j, i)) throw PreconditionViolation("generalized_profile: weights not symmetric");
    }

  // Symmetric Sinkhorn: find x > 0 with x_i (W x)_i = 1.
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(weights.sum() / n));
  bool converged = false;
  for (int it = 0; it < 10000; ++it) {
    const Eigen::VectorXd wx = weights * x;
    const double err = (x.array() * wx.array() - 1.0).abs().maxCoeff();
    if (err <= 1e-14) {
      converged = true;
      break;
    }
    x = (x.array() / wx.array()).sqrt();
  }

  VarianceProfile p;
  p.type = "generalized";
  p.n = n;
  p.sigma2.resize(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i) p.sigma2(i, j) = p.sigma2(j, i) = x(i) * weights(i, j) * x(j);
  const double row_err = (p.sigma2.rowwise().sum().array() - 1.0).abs().maxCoeff();
  if (!converged && row_err > 1e-12)
    throw SinkhornDivergence("Sinkhorn scaling did not converge in 10^4 iterations");
  if (row_err > 1e-12) throw SinkhornDivergence("Sinkhorn row sums off by " + std::to_string(row_err));

  std::vector<std::vector<double>> w(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w[i][j] = weights(i, j);
  p.params = {{"weights", w}};
  fill_stats(p);
  const SpectralGap g = spectral_gap(p);
  p.delta_minus = g.delta_minus;
  p.delta_plus = g.delta_plus;
  p.simple_top = g.simple_top;
  return p;
}

VarianceProfile band_profile(int n, double w, BandShape f) {
  if (n < 1 || !(w > 0)) throw PreconditionViolation("band_profile needs n >= 1 and W > 0");
  if (band_shape_halfwidth(f) > n / (2.0 * w) * (1 + 1e-12))
    throw SupportTooWide("band shape support exceeds [-N/(2W), N/(2W)]");
  std::vector<double> row(n);
  for (int k = 0; k < n; ++k) {
    const int dk = (k > n / 2) ? k - n : k;  // [k]_N in (-N/2, N/2]
    row[k] = band_shape_value(f, dk / w) / w;
  }
  double sum = 0, mx = 0;
  for (double v : row) {
    sum += v;
    mx = std::max(mx, v);
  }
  if (!(sum > 0)) throw PreconditionViolation("band_profile: empty band");

  VarianceProfile p;
  p.type = "band";
  p.params = {{"w", w}, {"shape", band_shape_name(f)}};
  p.n = n;
  p.pre_norm_m = 1.0 / mx;
  p.sigma2.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p.sigma2(i, j) = row[((i - j) % n + n) % n] / sum;
  fill_stats(p);
  const SpectralGap g = gap_from_sorted(circulant_spectrum(p));
  p.delta_minus = g.delta_minus;
  p.delta_plus = g.delta_plus;
  p.simple_top = g.simple_top;
  return p;
}

Eigen::MatrixXd two_block_weights(int n, double w_first, double w_second) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Ones(n, n);
  const int h = n / 2;
  w.topLeftCorner(h, h).setConstant(w_first);
  w.bottomRightCorner(n - h, n - h).setConstant(w_second);
  return w;
}

VarianceProfile profile_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  const int n = j.at("n").get<int>();
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  if (type == "wigner") return wigner_profile(n);
  if (type == "band") {
    double w = 0;
    if (params.contains("w")) w = params["w"].get<double>();
    else if (params.contains("w_fraction")) w = n * params["w_fraction"].get<double>();
    else throw PreconditionViolation("band profile needs params.w or params.w_fraction");
    return band_profile(n, w, band_shape_from_name(params.value("shape", std::string("uniform"))));
  }
  if (type == "generalized") {
    if (params.contains("weights")) {
      const auto rows = params["weights"].get<std::vector<std::vector<double>>>();
      Eigen::MatrixXd w(n, n);
      if (static_cast<int>(rows.size()) != n) throw PreconditionViolation("weights must have n rows");
      for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != n) throw PreconditionViolation("weights must have n columns");
        for (int k = 0; k < n; ++k) w(i, k) = rows[i][k];
      }
      return generalized_profile(n, w);
    }
    const std::string preset = params.value("preset", std::string("two_block"));
    if (preset != "two_block") throw PreconditionViolation("unknown generalized preset '" + preset + "'");
    VarianceProfile p =
        generalized_profile(n, two_block_weights(n, params.value("w_first", 0.5), params.value("w_second", 1.5)));
    p.params = params;
    p.params["preset"] = preset;
    return p;
  }
  throw PreconditionViolation("unknown profile type '" + type + "'");
}

SpectralGap spectral_gap(const VarianceProfile& p) {
  const SymmetricEig e = eigh(p.sigma2, false);
  return gap_from_sorted(e.values);
}

Eigen::VectorXd circulant_spectrum(const VarianceProfile& p) {
  const int n = p.n;
  Eigen::VectorXd ev(n);
  for (int q = 0; q < n; ++q) {
    double s = 0;
    for (int k = 0; k < n; ++k) s += p.sigma2(0, k) * std::cos(2 * std::numbers::pi * q * k / n);
    ev(q) = s;
  }
  std::sort(ev.data(), ev.data() + n);
  return ev;
}

std::string sigma2_csv(const VarianceProfile& p) {
  std::string out;
  for (int i = 0; i < p.n; ++i) {
    for (int j = 0; j < p.n; ++j) {
      if (j) out += ',';
      out += fmt17(p.sigma2(i, j));
    }
    out += '\n';
  }
  return out;
}

}  // namespace rmt
