#include "rmtlab/entrylaws.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "rmtlab/errors.hpp"

namespace rmt {
namespace {

using std::numbers::pi;
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr double kQuadTol = 1e-10;

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * pi); }
// P(N(0,1) >= t)
double upper_q(double t) { return 0.5 * std::erfc(t / std::sqrt(2.0)); }

double bump_raw(double y) { return std::abs(y) < 1 ? std::exp(-1.0 / (1.0 - y * y)) : 0.0; }

template <class F>
double integrate_checked(F f, double a, double b, const char* what) {
  double err = 0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14, &err);
  if (!(err <= kQuadTol)) throw QuadratureFailure(std::string("quadrature failed: ") + what);
  return v;
}

Moments gaussian_pair_moments(double a, double b, double var) {
  const double p = b / (a + b), q = a / (a + b);
  std::array<std::pair<double, double>, 2> comps{{{p, a}, {q, -b}}};
  Moments m{0, 0, 0, 0};
  for (auto [w, mu] : comps) {
    m.m1 += w * mu;
    m.m2 += w * (mu * mu + var);
    m.m3 += w * (mu * mu * mu + 3 * mu * var);
    m.m4 += w * (mu * mu * mu * mu + 6 * mu * mu * var + 3 * var * var);
  }
  return m;
}

double gaussian_pair_density(double x, double a, double b, double var) {
  const double s = std::sqrt(var);
  return (b / (a + b)) * phi((x - a) / s) / s + (a / (a + b)) * phi((x + b) / s) / s;
}

double gaussian_pair_tail(double x, double a, double b, double var) {
  const double s = std::sqrt(var);
  const double p = b / (a + b), q = a / (a + b);
  return p * (upper_q((x - a) / s) + upper_q((x + a) / s)) +
         q * (upper_q((x + b) / s) + upper_q((x - b) / s));
}

// Moments of the symmetric smoothed component bump_tau * g_{d,beta}.
std::pair<double, double> smoothed_beta_even_moments(double d, double beta, double tau) {
  const auto& bm = bump_moments();
  const double g2 = d * d * (beta + 1) / (beta + 3);
  const double g4 = d * d * d * d * (beta + 1) / (beta + 5);
  const double t2 = tau * tau * bm.s2, t4 = tau * tau * tau * tau * bm.s4;
  return {g2 + t2, g4 + 6 * g2 * t2 + t4};
}

double beta_density(double y, double d, double beta) {
  if (std::abs(y) > d) return 0.0;
  return (beta + 1) / (2 * std::pow(d, beta + 1)) * std::pow(std::abs(y), beta);
}

double smoothed_beta_component_density(double x, double d, double beta, double tau) {
  if (tau == 0) return beta_density(x, d, beta);
  const double lo = std::max(-d, x - tau), hi = std::min(d, x + tau);
  if (lo >= hi) return 0.0;
  const auto& bm = bump_moments();
  auto f = [&](double y) { return bump_raw((x - y) / tau) / (bm.norm * tau) * beta_density(y, d, beta); };
  boost::math::quadrature::tanh_sinh<double> ts;
  if (lo < 0 && hi > 0) return ts.integrate(f, lo, 0.0) + ts.integrate(f, 0.0, hi);
  return ts.integrate(f, lo, hi);
}

Moments compute_moments(const LawParams& p) {
  return std::visit(
      overloaded{
          [](const GaussianLaw&) { return Moments{0, 1, 0, 3}; },
          [](const BernoulliLaw&) { return Moments{0, 1, 0, 1}; },
          [](const TwoGaussianMixture& t) { return gaussian_pair_moments(t.a, t.b, t.sigma); },
          [](const SmoothedBetaMixture& s) {
            const auto [c2, c4] = smoothed_beta_even_moments(s.d, s.beta, s.tau);
            const Moments h = gaussian_pair_moments(s.a, s.b, 1.0);
            Moments m;
            m.m1 = s.eps * h.m1;
            m.m2 = (1 - s.eps) * c2 + s.eps * h.m2;
            m.m3 = s.eps * h.m3;
            m.m4 = (1 - s.eps) * c4 + s.eps * h.m4;
            m.m1 *= s.sign;
            m.m3 *= s.sign;
            return m;
          },
          [](const GaussianDivisible& g) {
            const Moments& b = g.base->moments();
            const double c = std::sqrt(1 - g.gamma), s2 = g.gamma;
            Moments m;
            m.m1 = c * b.m1;
            m.m2 = (1 - g.gamma) * b.m2 + s2;
            m.m3 = (1 - g.gamma) * c * b.m3 + 3 * c * b.m1 * s2;
            m.m4 = (1 - g.gamma) * (1 - g.gamma) * b.m4 + 6 * (1 - g.gamma) * b.m2 * s2 + 3 * s2 * s2;
            return m;
          },
      },
      p);
}

void validate(const LawParams& p) {
  std::visit(overloaded{
                 [](const GaussianLaw&) {},
                 [](const BernoulliLaw&) {},
                 [](const TwoGaussianMixture& t) {
                   if (!(t.a > 0 && t.b > 0 && t.sigma > 0 && t.sigma < 1))
                     throw PreconditionViolation("two_gaussian_mixture needs a,b > 0 and sigma in (0,1)");
                 },
                 [](const SmoothedBetaMixture& s) {
                   if (!(s.d > 0 && s.beta > -1 && s.eps >= 0 && s.eps < 1 && s.tau >= 0 && s.a > 0 &&
                         s.b > 0 && (s.sign == 1 || s.sign == -1)))
                     throw PreconditionViolation("smoothed_beta_mixture parameters out of range");
                 },
                 [](const GaussianDivisible& g) {
                   if (!g.base) throw PreconditionViolation("gaussian_divisible without base");
                   if (!(g.gamma >= 0 && g.gamma <= 1))
                     throw PreconditionViolation("gaussian_divisible gamma outside [0,1]");
                 },
             },
             p);
}

SubexpEnvelope fit_envelope(const EntryLaw& law) {
  // alpha = 1; beta_tail bounds sup_x P(|xi| >= x) e^x.  On [x_k, x_k+h] the
  // tail is at most tail(x_k) and e^x at most e^(x_k+h).
  constexpr double h = 0.01;
  double best = 1.0;
  for (int k = 0; k <= 6000; ++k) {
    const double x = k * h;
    best = std::max(best, law.tail_bound(x) * std::exp(x + h));
  }
  return {1.0, best};
}

}  // namespace

const BumpMoments& bump_moments() {
  static const BumpMoments bm = [] {
    const double z = integrate_checked(bump_raw, -1.0, 1.0, "bump norm");
    const double s2 = integrate_checked([](double y) { return y * y * bump_raw(y); }, -1.0, 1.0, "bump m2") / z;
    const double s4 =
        integrate_checked([](double y) { return y * y * y * y * bump_raw(y); }, -1.0, 1.0, "bump m4") / z;
    return BumpMoments{z, s2, s4};
  }();
  return bm;
}

double bump_density(double y) { return bump_raw(y) / bump_moments().norm; }

EntryLaw::EntryLaw(LawParams params) : params_(std::move(params)) {
  validate(params_);
  moments_ = compute_moments(params_);
  subexp_ = fit_envelope(*this);
}

std::string EntryLaw::kind_name() const {
  return std::visit(overloaded{
                        [](const GaussianLaw&) { return std::string("gaussian"); },
                        [](const BernoulliLaw&) { return std::string("bernoulli"); },
                        [](const TwoGaussianMixture&) { return std::string("two_gaussian_mixture"); },
                        [](const SmoothedBetaMixture&) { return std::string("smoothed_beta_mixture"); },
                        [](const GaussianDivisible&) { return std::string("gaussian_divisible"); },
                    },
                    params_);
}

double EntryLaw::draw(CounterRng& rng) const {
  return std::visit(
      overloaded{
          [&](const GaussianLaw&) { return rng.normal(); },
          [&](const BernoulliLaw&) { return (rng() >> 63) ? 1.0 : -1.0; },
          [&](const TwoGaussianMixture& t) {
            const double centre = rng.uniform() < t.b / (t.a + t.b) ? t.a : -t.b;
            return centre + std::sqrt(t.sigma) * rng.normal();
          },
          [&](const SmoothedBetaMixture& s) {
            double x;
            if (rng.uniform() < s.eps) {
              x = (rng.uniform() < s.b / (s.a + s.b) ? s.a : -s.b) + rng.normal();
            } else {
              // inverse CDF of |X| = d U^(1/(beta+1)), symmetric sign
              const double mag = s.d * std::pow(rng.uniform_open(), 1.0 / (s.beta + 1));
              x = (rng() >> 63) ? mag : -mag;
              if (s.tau > 0) {
                double y;
                do {
                  y = 2 * rng.uniform() - 1;
                } while (rng.uniform() > std::exp(1.0) * bump_raw(y));
                x += s.tau * y;
              }
            }
            return s.sign * x;
          },
          [&](const GaussianDivisible& g) {
            const double b = g.base->draw(rng);
            return std::sqrt(1 - g.gamma) * b + std::sqrt(g.gamma) * rng.normal();
          },
      },
      params_);
}

std::optional<double> EntryLaw::density(double x) const {
  return std::visit(
      overloaded{
          [&](const GaussianLaw&) -> std::optional<double> { return phi(x); },
          [&](const BernoulliLaw&) -> std::optional<double> { return std::nullopt; },
          [&](const TwoGaussianMixture& t) -> std::optional<double> {
            return gaussian_pair_density(x, t.a, t.b, t.sigma);
          },
          [&](const SmoothedBetaMixture& s) -> std::optional<double> {
            const double y = s.sign * x;
            return (1 - s.eps) * smoothed_beta_component_density(y, s.d, s.beta, s.tau) +
                   s.eps * gaussian_pair_density(y, s.a, s.b, 1.0);
          },
          [&](const GaussianDivisible& g) -> std::optional<double> {
            if (g.gamma == 0) return g.base->density(x);
            const double sg = std::sqrt(g.gamma), c = std::sqrt(1 - g.gamma);
            if (c == 0) return phi(x);
            if (std::holds_alternative<BernoulliLaw>(g.base->params()))
              return 0.5 * (phi((x - c) / sg) + phi((x + c) / sg)) / sg;
            // density = int base(a) phi((x - c a)/s)/s da; the kernel lives
            // within 12 s of x/c in the a variable (scaled by 1/c).
            const double lo = (x - 12 * sg) / c, hi = (x + 12 * sg) / c;
            auto f = [&](double a) { return g.base->density(a).value_or(0.0) * phi((x - c * a) / sg) / sg; };
            double err = 0;
            return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 15, 1e-12, &err);
          },
      },
      params_);
}

double EntryLaw::tail_bound(double x) const {
  if (x <= 0) return 1.0;
  return std::visit(
      overloaded{
          [&](const GaussianLaw&) { return 2 * upper_q(x); },
          [&](const BernoulliLaw&) { return x <= 1 ? 1.0 : 0.0; },
          [&](const TwoGaussianMixture& t) { return std::min(1.0, gaussian_pair_tail(x, t.a, t.b, t.sigma)); },
          [&](const SmoothedBetaMixture& s) {
            const double r = x - s.tau;
            double g = 1.0;
            if (r > s.d) g = 0.0;
            else if (r > 0) g = 1.0 - std::pow(r / s.d, s.beta + 1);
            return std::min(1.0, (1 - s.eps) * g + s.eps * gaussian_pair_tail(x, s.a, s.b, 1.0));
          },
          [&](const GaussianDivisible& g) {
            const double c = std::sqrt(1 - g.gamma), sg = std::sqrt(g.gamma);
            if (sg == 0) return g.base->tail_bound(x);
            if (c == 0) return 2 * upper_q(x);
            // union bound over the split x = theta x + (1-theta) x
            double best = 1.0;
            for (int k = 1; k < 20; ++k) {
              const double th = k / 20.0;
              best = std::min(best, g.base->tail_bound(th * x / c) + 2 * upper_q((1 - th) * x / sg));
            }
            return best;
          },
      },
      params_);
}

nlohmann::json EntryLaw::to_json() const {
  nlohmann::json j;
  j["kind"] = kind_name();
  j["params"] = std::visit(
      overloaded{
          [](const GaussianLaw&) { return nlohmann::json::object(); },
          [](const BernoulliLaw&) { return nlohmann::json::object(); },
          [](const TwoGaussianMixture& t) { return nlohmann::json{{"a", t.a}, {"b", t.b}, {"sigma", t.sigma}}; },
          [](const SmoothedBetaMixture& s) {
            return nlohmann::json{{"d", s.d},     {"beta", s.beta}, {"eps", s.eps}, {"tau", s.tau},
                                  {"a", s.a},     {"b", s.b},       {"sign", s.sign}};
          },
          [](const GaussianDivisible& g) { return nlohmann::json{{"base", g.base->to_json()}, {"gamma", g.gamma}}; },
      },
      params_);
  j["subexp"] = {{"alpha", subexp_.alpha}, {"beta_tail", subexp_.beta_tail}};
  return j;
}

EntryLaw EntryLaw::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  auto make = [&]() -> EntryLaw {
    if (kind == "gaussian") return gaussian();
    if (kind == "bernoulli") return bernoulli();
    if (kind == "two_gaussian_mixture")
      return EntryLaw(TwoGaussianMixture{params.at("a").get<double>(), params.at("b").get<double>(),
                                         params.at("sigma").get<double>()});
    if (kind == "smoothed_beta_mixture")
      return EntryLaw(SmoothedBetaMixture{params.at("d").get<double>(), params.at("beta").get<double>(),
                                          params.at("eps").get<double>(), params.at("tau").get<double>(),
                                          params.at("a").get<double>(), params.at("b").get<double>(),
                                          params.value("sign", 1)});
    if (kind == "gaussian_divisible")
      return EntryLaw(GaussianDivisible{std::make_shared<const EntryLaw>(from_json(params.at("base"))),
                                        params.at("gamma").get<double>()});
    throw PreconditionViolation("unknown law kind '" + kind + "'");
  };
  EntryLaw law = make();
  if (j.contains("subexp")) {
    law.subexp_.alpha = j["subexp"].at("alpha").get<double>();
    law.subexp_.beta_tail = j["subexp"].at("beta_tail").get<double>();
  }
  return law;
}

std::vector<double> sample(const EntryLaw& law, CounterRng& rng, std::size_t n) {
  std::vector<double> out(n);
  for (auto& v : out) v = law.draw(rng);
  return out;
}

Moments exact_moments(const EntryLaw& law) { return law.moments(); }

namespace {

// Bisection on a monotone function with f(lo) and f(hi) of opposite sign,
// run until the bracket stops shrinking.
template <class F>
double bisect(F f, double lo, double hi, const char* what) {
  double flo = f(lo), fhi = f(hi);
  if (!(flo * fhi <= 0)) throw RootNotBracketed(std::string("root not bracketed: ") + what);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= 1e-15 * std::max(1.0, std::abs(mid))) break;
    const double fm = f(mid);
    if (fm == 0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

EntryLaw two_gaussian_match(double m3, double m4) {
  auto f = [&](double s) { return 1 + m3 * m3 / (1 - s) + 4 * s - 2 * s * s - m4; };
  // f(0) = 1 + m3^2 - m4 < 0 and f -> +inf as s -> 1; f is increasing.
  double hi = 0.5;
  while (f(hi) < 0 && hi < 1 - 1e-15) hi = 0.5 * (1 + hi);
  const double sigma = bisect(f, 0.0, hi, "mixture variance");
  const double diff = m3 / (1 - sigma), prod = 1 - sigma;
  const double a = 0.5 * (diff + std::sqrt(diff * diff + 4 * prod));
  return EntryLaw(TwoGaussianMixture{a, a - diff, sigma});
}

EntryLaw smoothed_beta_match(double m3, double m4, double tau) {
  const int sign = m3 < 0 ? -1 : 1;
  const double eps = std::abs(m3) / 2;
  const double a = 2, b = 1;
  const Moments h = gaussian_pair_moments(a, b, 1.0);
  const auto& bm = bump_moments();
  const double t2 = tau * tau * bm.s2, t4 = tau * tau * tau * tau * bm.s4;
  const double g2 = (1 - eps * h.m2) / (1 - eps) - t2;
  if (!(g2 > 0)) throw RootNotBracketed("smoothed beta: mollifier too wide");
  auto d2_of = [&](double beta) { return g2 * (beta + 3) / (beta + 1); };
  auto f = [&](double beta) {
    const double d2 = d2_of(beta);
    const double g4 = d2 * d2 * (beta + 1) / (beta + 5);
    return (1 - eps) * (g4 + 6 * g2 * t2 + t4) + eps * h.m4 - m4;  // decreasing in beta
  };
  double hi = 1.0;
  while (f(hi) > 0) {
    hi *= 2;
    if (hi > 1e12) throw RootNotBracketed("smoothed beta: m4 below the beta -> inf limit");
  }
  double lo = -0.5;
  while (f(lo) < 0) {
    lo = -1 + 0.5 * (lo + 1);
    if (lo + 1 < 1e-300) throw RootNotBracketed("smoothed beta: lower bracket");
  }
  const double beta = bisect(f, lo, hi, "smoothed beta exponent");
  return EntryLaw(SmoothedBetaMixture{std::sqrt(d2_of(beta)), beta, eps, tau, a, b, sign});
}

}  // namespace

EntryLaw build_matching_law(double m3, double m4, const MatchingOptions& opt) {
  const double gap = m4 - m3 * m3 - 1;
  const double c1 = opt.c1.value_or(gap);
  if (!(gap > 0) || !(c1 > 0) || gap < c1 || m4 > opt.c2)
    throw InfeasibleMoments("moments infeasible: need m4 - m3^2 - 1 >= C1 > 0 and m4 <= C2");
  const double delta = opt.delta.value_or(std::min(1.0, c1) / 100);
  if (std::abs(m3) >= delta) return two_gaussian_match(m3, m4);
  return smoothed_beta_match(m3, m4, opt.tau);
}

EntryLaw gaussian_divisible(const EntryLaw& base, double gamma) {
  if (!(gamma >= 0 && gamma <= 1)) throw PreconditionViolation("gamma outside [0, 1]");
  if (gamma == 0) return base;
  return EntryLaw(GaussianDivisible{std::make_shared<const EntryLaw>(base), gamma});
}

EntryLaw matched_gaussian_divisible(double m3, double m4, double gamma, const MatchingOptions& opt) {
  if (!(gamma >= 0 && gamma < 1)) throw PreconditionViolation("gamma outside [0, 1)");
  const double m3g = m3 / std::pow(1 - gamma, 1.5);
  const double m4g = m3g * m3g + (m4 - m3 * m3);
  return gaussian_divisible(build_matching_law(m3g, m4g, opt), gamma);
}

}  // namespace rmt
