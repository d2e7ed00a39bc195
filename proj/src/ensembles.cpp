#include "rmtlab/ensembles.hpp"

#include <cmath>
#include <cstdio>

#include "rmtlab/errors.hpp"
#include "rmtlab/report.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/stats.hpp"

namespace rmt {
namespace {

std::string short_id(const std::string& prefix, const std::string& text) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(text)));
  return prefix + ":" + buf;
}

template <class LawOf>
RandomMatrix assemble(const VarianceProfile& profile, LawOf law_of, SymmetryClass cls, std::uint64_t seed,
                      int threads) {
  const int n = profile.n;
  RandomMatrix m;
  m.n = n;
  m.symmetry = cls;
  m.entries = Eigen::MatrixXcd::Zero(n, n);
  m.provenance.master_seed = seed;
  const bool complex = cls == SymmetryClass::ComplexHermitian;
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t ui) {
    const int i = static_cast<int>(ui);
    // phi(i, i) for the row-major enumeration of the upper triangle
    const std::int64_t row_start = static_cast<std::int64_t>(i) * n - static_cast<std::int64_t>(i) * (i - 1) / 2;
    for (int j = i; j < n; ++j) {
      const double s2 = profile.sigma2(i, j);
      if (s2 == 0) continue;
      const double s = std::sqrt(s2);
      const EntryLaw& law = law_of(row_start + (j - i));
      CounterRng rng = substream(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
      if (i == j) {
        m.entries(i, i) = s * law.draw(rng);
      } else if (complex) {
        const double x = law.draw(rng), y = law.draw(rng);
        const cplx h(s * x / std::sqrt(2.0), s * y / std::sqrt(2.0));
        m.entries(i, j) = h;
        m.entries(j, i) = std::conj(h);
      } else {
        const double h = s * law.draw(rng);
        m.entries(i, j) = h;
        m.entries(j, i) = h;
      }
    }
  });
  return m;
}

}  // namespace

SymmetryClass symmetry_from_name(const std::string& s) {
  if (s == "real_symmetric" || s == "goe") return SymmetryClass::RealSymmetric;
  if (s == "complex_hermitian" || s == "gue") return SymmetryClass::ComplexHermitian;
  throw PreconditionViolation("unknown symmetry class '" + s + "'");
}

std::string symmetry_name(SymmetryClass c) {
  return c == SymmetryClass::RealSymmetric ? "real_symmetric" : "complex_hermitian";
}

RandomMatrix sample_matrix(const VarianceProfile& profile, const EntryLaw& law, SymmetryClass cls,
                           std::uint64_t seed, int threads) {
  RandomMatrix m = assemble(profile, [&](std::int64_t) -> const EntryLaw& { return law; }, cls, seed, threads);
  m.provenance.profile_id = short_id(profile.type, profile.id());
  m.provenance.law_id = law.id();
  return m;
}

RandomMatrix sample_matrix_swapped(const VarianceProfile& profile, const EntryLaw& law_first,
                                   const EntryLaw& law_rest, std::int64_t cut, SymmetryClass cls,
                                   std::uint64_t seed, int threads) {
  RandomMatrix m = assemble(
      profile, [&](std::int64_t phi) -> const EntryLaw& { return phi < cut ? law_first : law_rest; }, cls, seed,
      threads);
  m.provenance.profile_id = short_id(profile.type, profile.id());
  m.provenance.law_id = law_first.id() + "|" + law_rest.id() + "|cut=" + std::to_string(cut);
  return m;
}

RandomMatrix ou_evolve(const RandomMatrix& h0, double t, std::uint64_t seed, int threads) {
  if (!(t >= 0)) throw PreconditionViolation("ou_evolve needs t >= 0");
  RandomMatrix out = h0;
  out.provenance.flow_time = h0.provenance.flow_time + t;
  out.provenance.flow_seed = seed;
  if (t == 0) return out;
  static const EntryLaw gaussian = EntryLaw::gaussian();
  const RandomMatrix v = sample_matrix(wigner_profile(h0.n), gaussian, h0.symmetry, seed, threads);
  const double a = std::exp(-t / 2), b = std::sqrt(-std::expm1(-t));
  out.entries = a * h0.entries + b * v.entries;
  // keep the diagonal exactly real and the matrix exactly Hermitian
  for (int j = 0; j < out.n; ++j) {
    out.entries(j, j) = out.entries(j, j).real();
    for (int i = j + 1; i < out.n; ++i) out.entries(j, i) = std::conj(out.entries(i, j));
  }
  return out;
}

RandomMatrix from_dense(const Eigen::MatrixXcd& h, SymmetryClass cls) {
  if (h.rows() != h.cols()) throw PreconditionViolation("matrix must be square");
  RandomMatrix m;
  m.n = static_cast<int>(h.rows());
  m.symmetry = cls;
  m.entries = h;
  m.provenance.profile_id = "explicit";
  m.provenance.law_id = "explicit";
  return m;
}

std::string matrix_csv(const RandomMatrix& m) {
  std::string out;
  const bool complex = m.symmetry == SymmetryClass::ComplexHermitian;
  for (int i = 0; i < m.n; ++i) {
    for (int j = 0; j < m.n; ++j) {
      if (j) out += ',';
      out += fmt17(m.entries(i, j).real());
      if (complex) {
        out += ',';
        out += fmt17(m.entries(i, j).imag());
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace rmt
