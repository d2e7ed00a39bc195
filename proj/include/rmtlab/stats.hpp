#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace rmt {

double mean(std::span<const double> x);
double variance(std::span<const double> x);  // unbiased
double std_error(std::span<const double> x);
// Linear-interpolation quantile (type 7); q in [0, 1].
double quantile(std::vector<double> x, double q);
double median(std::vector<double> x);

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double slope_se = 0;  // ordinary least-squares standard error
};
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

struct KsResult {
  double distance = 0;
  double p_value = 1;
};
// Kolmogorov survival function Q(l) = 2 sum (-1)^(k-1) exp(-2 k^2 l^2).
double kolmogorov_q(double lambda);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
KsResult ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf);

double normal_cdf(double x);
double normal_quantile(double p);

// Runs body(i) for i in [0, n) on `threads` workers with static striping.
// Each index is handled exactly once, so results written per-index are
// independent of the thread count.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

// Thread count from RMT_LAB_THREADS, else 1.
int default_threads();

}  // namespace rmt
