#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rmtlab/rng.hpp"

namespace rmt {

struct Moments {
  double m1 = 0, m2 = 1, m3 = 0, m4 = 3;
};

// Tail envelope P(|xi| >= x^alpha) <= beta_tail * exp(-x).
struct SubexpEnvelope {
  double alpha = 1;
  double beta_tail = 1;
};

class EntryLaw;

struct GaussianLaw {};
struct BernoulliLaw {};  // symmetric +-1
// b/(a+b) N(a, sigma) + a/(a+b) N(-b, sigma); sigma is a variance.
struct TwoGaussianMixture {
  double a, b, sigma;
};
// (1-eps) (bump_tau * g_{d,beta}) + eps h_{a,b}, multiplied by `sign`.
// g_{d,beta}(x) = (beta+1)/(2 d^(beta+1)) |x|^beta on |x| <= d, h is the
// unit-variance Gaussian pair with centres a and -b.
struct SmoothedBetaMixture {
  double d, beta, eps, tau, a, b;
  int sign = 1;
};
// sqrt(1-gamma) base + sqrt(gamma) G.
struct GaussianDivisible {
  std::shared_ptr<const EntryLaw> base;
  double gamma;
};

using LawParams =
    std::variant<GaussianLaw, BernoulliLaw, TwoGaussianMixture, SmoothedBetaMixture, GaussianDivisible>;

class EntryLaw {
 public:
  explicit EntryLaw(LawParams params);

  static EntryLaw gaussian() { return EntryLaw(GaussianLaw{}); }
  static EntryLaw bernoulli() { return EntryLaw(BernoulliLaw{}); }

  const LawParams& params() const { return params_; }
  const Moments& moments() const { return moments_; }
  const SubexpEnvelope& subexp() const { return subexp_; }
  std::string kind_name() const;

  double draw(CounterRng& rng) const;
  // Density, or nullopt for laws with atoms (Bernoulli and its Gaussian-free
  // descendants).
  std::optional<double> density(double x) const;
  // Upper bound on P(|xi| >= x), exact for most kinds.
  double tail_bound(double x) const;

  nlohmann::json to_json() const;
  static EntryLaw from_json(const nlohmann::json& j);
  // Canonical compact JSON, used as the law id in provenance.
  std::string id() const { return to_json().dump(); }

 private:
  LawParams params_;
  Moments moments_;
  SubexpEnvelope subexp_;
};

std::vector<double> sample(const EntryLaw& law, CounterRng& rng, std::size_t n);
Moments exact_moments(const EntryLaw& law);

struct MatchingOptions {
  std::optional<double> delta;  // default min(1, c1)/100
  std::optional<double> c1;     // default m4 - m3^2 - 1
  double c2 = 100;
  double tau = 1e-4;
};

EntryLaw build_matching_law(double m3, double m4, const MatchingOptions& opt = {});
EntryLaw gaussian_divisible(const EntryLaw& base, double gamma);

// The four-moment matched Gaussian-divisible law: xi' = sqrt(1-g) xi_g + sqrt(g) G
// where xi_g matches m3 (1-g)^(-3/2) and m4(xi_g) = m3(xi_g)^2 + (m4 - m3^2).
// Its third moment equals m3 and its fourth differs from m4 by O(gamma).
EntryLaw matched_gaussian_divisible(double m3, double m4, double gamma, const MatchingOptions& opt = {});

// Mollifier bump on [-1, 1]: normalizer and even moments.
struct BumpMoments {
  double norm, s2, s4;
};
const BumpMoments& bump_moments();
double bump_density(double y);

}  // namespace rmt
