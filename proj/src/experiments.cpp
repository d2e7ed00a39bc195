#include "rmtlab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "rmtlab/errors.hpp"
#include "rmtlab/report.hpp"
#include "rmtlab/resolvent.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/semicircle.hpp"
#include "rmtlab/spectra.hpp"
#include "rmtlab/stats.hpp"
#include "rmtlab/walks.hpp"

namespace rmt {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string kv(const std::string& k, double v) { return k + "=" + fmt17(v); }
std::string kv(const std::string& k, long long v) { return k + "=" + std::to_string(v); }

// Values-only spectrum of a sampled matrix.
Eigen::VectorXd spectrum(const RandomMatrix& h) { return spectral_data(h, false).eigenvalues; }

std::vector<int> pick_columns(int n, int count, std::uint64_t seed) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (count <= 0 || count >= n) return {};
  CounterRng rng(seed);
  for (int i = 0; i < count; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

// Bootstrap standard error of the slope of log(median_s y[s][c]) vs log x[c].
double bootstrap_slope_se(const std::vector<std::vector<double>>& y, const std::vector<std::size_t>& cols,
                          const std::vector<double>& logx, std::uint64_t seed) {
  const std::size_t s = y.size();
  if (s < 2) return 0.0;
  CounterRng rng(seed);
  std::vector<double> slopes;
  slopes.reserve(kBootstrapResamples);
  std::vector<std::size_t> pick(s);
  for (int b = 0; b < kBootstrapResamples; ++b) {
    for (auto& p : pick) p = rng.below(s);
    std::vector<double> logy;
    for (std::size_t c : cols) {
      std::vector<double> v;
      v.reserve(s);
      for (std::size_t p : pick) v.push_back(y[p][c]);
      logy.push_back(std::log(median(v)));
    }
    slopes.push_back(fit_line(logx, logy).slope);
  }
  return std::sqrt(variance(slopes));
}

std::string fmt_rule(double v) { return fmt17(v); }

}  // namespace

Cell Cell::from_samples(std::string cell, std::string statistic, const std::vector<double>& x) {
  Cell c;
  c.cell = std::move(cell);
  c.statistic = std::move(statistic);
  c.samples = x.size();
  if (x.empty()) return c;
  c.mean = rmt::mean(x);
  c.stderr_ = std_error(x);
  c.median = rmt::median(x);
  c.q05 = quantile(x, 0.05);
  c.q95 = quantile(x, 0.95);
  c.value = c.mean;
  return c;
}

Cell Cell::scalar(std::string cell, std::string statistic, double value, std::size_t samples) {
  Cell c;
  c.cell = std::move(cell);
  c.statistic = std::move(statistic);
  c.samples = samples;
  c.value = value;
  return c;
}

bool ExperimentReport::passed() const {
  return std::all_of(rules.begin(), rules.end(), [](const Rule& r) { return r.passed; });
}

const Rule* ExperimentReport::rule(const std::string& name) const {
  for (const auto& r : rules)
    if (r.name == name) return &r;
  return nullptr;
}

const Fit* ExperimentReport::fit(const std::string& name) const {
  for (const auto& f : fits)
    if (f.name == name) return &f;
  return nullptr;
}

const Cell* ExperimentReport::find(const std::string& cell, const std::string& statistic) const {
  for (const auto& c : cells)
    if (c.cell == cell && c.statistic == statistic) return &c;
  return nullptr;
}

nlohmann::json ExperimentReport::to_json() const {
  auto num = [](double v) -> nlohmann::json {
    if (std::isnan(v)) return nullptr;
    return v;
  };
  nlohmann::json j;
  j["experiment"] = id;
  j["params"] = params;
  j["master_seed"] = master_seed;
  j["passed"] = passed();
  j["wall_clock_s"] = wall_clock_s;
  j["warnings"] = warnings;
  auto& cs = j["cells"] = nlohmann::json::array();
  for (const auto& c : cells)
    cs.push_back({{"cell", c.cell},
                  {"statistic", c.statistic},
                  {"samples", c.samples},
                  {"mean", num(c.mean)},
                  {"stderr", num(c.stderr_)},
                  {"median", num(c.median)},
                  {"q05", num(c.q05)},
                  {"q95", num(c.q95)},
                  {"value", num(c.value)}});
  auto& fs = j["fits"] = nlohmann::json::array();
  for (const auto& f : fits)
    fs.push_back({{"name", f.name},
                  {"slope", f.slope},
                  {"slope_se", f.slope_se},
                  {"intercept", f.intercept},
                  {"points", f.points}});
  auto& rs = j["rules"] = nlohmann::json::array();
  for (const auto& r : rules) rs.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
  return j;
}

std::string ExperimentReport::cells_csv() const {
  auto num = [](double v) { return std::isnan(v) ? std::string() : fmt17(v); };
  CsvTable t;
  t.header = {"experiment", "cell", "statistic", "samples", "mean", "stderr", "median", "q05", "q95", "value"};
  for (const auto& c : cells)
    t.add({id, c.cell, c.statistic, std::to_string(c.samples), num(c.mean), num(c.stderr_), num(c.median),
           num(c.q05), num(c.q95), num(c.value)});
  return t.str();
}

// ---------------------------------------------------------------------------
// local law

ExperimentReport local_law_scan(const LocalLawConfig& cfg) {
  const auto t0 = Clock::now();
  if (cfg.eta_grid.empty() || cfg.e_grid.empty()) throw PreconditionViolation("local_law_scan needs E and eta grids");
  if (cfg.samples < 1) throw PreconditionViolation("local_law_scan needs samples >= 1");
  const VarianceProfile& prof = cfg.profile;
  const int n = prof.n;
  const double m_param = prof.m_param;

  struct CellSpec {
    double e, eta, kappa;
    bool admissible;
  };
  std::vector<CellSpec> specs;
  for (double e : cfg.e_grid)
    for (double eta : cfg.eta_grid) {
      const double kappa = std::abs(std::abs(e) - 2);
      const bool adm = eta > 0 && 1.0 / std::sqrt(m_param * eta) <= kappa * kappa * cfg.admissibility;
      specs.push_back({e, eta, kappa, adm});
    }
  const std::size_t nc = specs.size();
  const int total = std::max(cfg.samples, cfg.deloc_samples);

  std::vector<std::vector<double>> lam(cfg.samples, std::vector<double>(nc, NAN));
  std::vector<std::vector<double>> off = lam, merr = lam, ups = lam;
  std::vector<std::vector<cplx>> mn(cfg.samples, std::vector<cplx>(nc));
  std::vector<double> deloc_sup(std::max(cfg.deloc_samples, 0)), deloc_edge(deloc_sup.size());

  parallel_for(static_cast<std::size_t>(total), cfg.threads, [&](std::size_t s) {
    const std::uint64_t seed_s = derive(cfg.seed, "local_law", s);
    const RandomMatrix h = sample_matrix(prof, cfg.law, cfg.symmetry, seed_s);
    const Resolvent r(h);
    if (static_cast<int>(s) < cfg.samples) {
      const std::vector<int> cols = pick_columns(n, cfg.offdiag_columns, derive(seed_s, "columns", 0));
      for (std::size_t c = 0; c < nc; ++c) {
        if (!specs[c].admissible) continue;
        const cplx z(specs[c].e, specs[c].eta);
        const GreenEvaluation ev = r.evaluate(z, cols);
        lam[s][c] = ev.lambda_d;
        off[s][c] = ev.offdiag_max;
        mn[s][c] = ev.m_n;
        merr[s][c] = std::abs(ev.m_n - msc(z));
        ups[s][c] = upsilon_max(r, prof, z);
      }
    }
    if (static_cast<int>(s) < cfg.deloc_samples) {
      SpectralData sd;
      sd.eigenvalues = r.eigenvalues();
      sd.eigenvectors = r.eigenvectors();
      const DelocalizationStat d = delocalization_stat(sd, cfg.deloc_lo, cfg.deloc_hi);
      deloc_sup[s] = d.max_sup_norm;
      deloc_edge[s] = d.max_edge_weighted;
    }
  });

  ExperimentReport rep;
  rep.id = "local_law_scan";
  rep.master_seed = cfg.seed;
  rep.params = {{"profile", prof.to_json()},
                {"law", cfg.law.to_json()},
                {"symmetry", symmetry_name(cfg.symmetry)},
                {"e_grid", cfg.e_grid},
                {"eta_grid", cfg.eta_grid},
                {"samples", cfg.samples},
                {"admissibility", cfg.admissibility},
                {"offdiag_columns", cfg.offdiag_columns},
                {"deloc_samples", cfg.deloc_samples}};
  if (prof.type == "generalized" && prof.params.contains("weights")) rep.params["profile"]["params"] = "explicit";

  auto column = [&](const std::vector<std::vector<double>>& y, std::size_t c) {
    std::vector<double> v;
    for (const auto& row : y) v.push_back(row[c]);
    return v;
  };

  std::vector<double> envelope(nc, NAN);
  for (std::size_t c = 0; c < nc; ++c) {
    const auto& sp = specs[c];
    const std::string id = kv("E", sp.e) + ";" + kv("eta", sp.eta);
    if (!sp.admissible) {
      rep.cells.push_back(Cell::scalar(id, "skipped", 1.0, 0));
      continue;
    }
    const cplx z(sp.e, sp.eta);
    const double g = control_g(z, prof.delta_plus);
    envelope[c] = std::pow(sp.kappa + sp.eta, 0.25) / (std::sqrt(m_param * sp.eta) * g);
    rep.cells.push_back(Cell::from_samples(id, "lambda_d", column(lam, c)));
    rep.cells.push_back(Cell::from_samples(id, "offdiag_max", column(off, c)));
    rep.cells.push_back(Cell::from_samples(id, "m_error", column(merr, c)));
    rep.cells.push_back(Cell::from_samples(id, "upsilon_max", column(ups, c)));
    cplx msum = 0;
    for (int s = 0; s < cfg.samples; ++s) msum += mn[s][c];
    rep.cells.push_back(
        Cell::scalar(id, "averaged_m_error", std::abs(msum / static_cast<double>(cfg.samples) - msc(z)), cfg.samples));
    rep.cells.push_back(Cell::scalar(id, "envelope", envelope[c], cfg.samples));
  }

  for (std::size_t ei = 0; ei < cfg.e_grid.size(); ++ei) {
    std::vector<std::size_t> cols;
    std::vector<double> logx;
    for (std::size_t c = 0; c < nc; ++c)
      if (specs[c].admissible && specs[c].e == cfg.e_grid[ei]) {
        cols.push_back(c);
        logx.push_back(std::log(specs[c].eta));
      }
    const std::string etag = "[" + kv("E", cfg.e_grid[ei]) + "]";
    if (cols.size() < 2) {
      rep.warnings.push_back("fewer than two admissible eta values at " + etag);
      continue;
    }
    std::vector<double> ratios;
    for (std::size_t c : cols) ratios.push_back(median(column(lam, c)) / envelope[c]);
    rep.cells.push_back(Cell::scalar(kv("E", cfg.e_grid[ei]), "fitted_constant", median(ratios), cfg.samples));

    for (const auto& [name, data] : {std::pair{std::string("lambda_d_slope"), &lam},
                                     std::pair{std::string("offdiag_slope"), &off}}) {
      std::vector<double> logy;
      for (std::size_t c : cols) logy.push_back(std::log(median(column(*data, c))));
      const LinearFit lf = fit_line(logx, logy);
      Fit f;
      f.name = name + etag;
      f.slope = lf.slope;
      f.intercept = lf.intercept;
      f.points = cols.size();
      f.slope_se = bootstrap_slope_se(*data, cols, logx, derive(cfg.seed, "bootstrap:" + name, ei));
      rep.fits.push_back(f);
      const bool ok = f.slope >= cfg.slope_lo && f.slope <= cfg.slope_hi;
      rep.rules.push_back({f.name, ok,
                           "slope " + fmt_rule(f.slope) + " +- " + fmt_rule(f.slope_se) + " in [" +
                               fmt_rule(cfg.slope_lo) + ", " + fmt_rule(cfg.slope_hi) + "]"});
    }
  }

  if (cfg.deloc_samples > 0) {
    const double bound = 10 * std::sqrt(std::log(static_cast<double>(n)) / n);
    int ok = 0;
    for (double v : deloc_sup) ok += v <= bound;
    const double freq = static_cast<double>(ok) / cfg.deloc_samples;
    const std::string id = "window=[" + fmt17(cfg.deloc_lo) + "," + fmt17(cfg.deloc_hi) + "]";
    rep.cells.push_back(Cell::from_samples(id, "deloc_sup_norm", deloc_sup));
    rep.cells.push_back(Cell::from_samples(id, "deloc_edge_weighted", deloc_edge));
    rep.cells.push_back(Cell::scalar(id, "deloc_bound", bound, deloc_sup.size()));
    rep.cells.push_back(Cell::scalar(id, "deloc_pass_fraction", freq, deloc_sup.size()));
    rep.rules.push_back({"delocalization", freq >= cfg.deloc_frequency,
                         "fraction " + fmt_rule(freq) + " of samples with max sup-norm <= " + fmt_rule(bound)});
  }
  rep.wall_clock_s = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------
// four-moment swap

const std::vector<std::string>& swap_statistic_names() {
  static const std::vector<std::string> names{"re_trace", "im_trace", "re_trace_product", "im_trace_product",
                                              "tanh_im_trace"};
  return names;
}

double swap_statistic(const std::string& name, const Eigen::VectorXd& ev, const std::vector<cplx>& z_list) {
  if (z_list.empty()) throw PreconditionViolation("swap statistic needs at least one z");
  const double n = static_cast<double>(ev.size());
  auto trace = [&](cplx z) {
    cplx s = 0;
    for (Eigen::Index a = 0; a < ev.size(); ++a) s += 1.0 / (ev(a) - z);
    return s / n;
  };
  auto trace_product = [&]() {
    if (z_list.size() > 3) throw PreconditionViolation("trace products take at most 3 z values");
    cplx s = 0;
    for (Eigen::Index a = 0; a < ev.size(); ++a) {
      cplx p = 1;
      for (cplx z : z_list) p /= (ev(a) - z);
      s += p;
    }
    return s / std::pow(n, static_cast<double>(z_list.size()));
  };
  if (name == "re_trace") return trace(z_list[0]).real();
  if (name == "im_trace") return trace(z_list[0]).imag();
  if (name == "re_trace_product") return trace_product().real();
  if (name == "im_trace_product") return trace_product().imag();
  if (name == "tanh_im_trace") return std::tanh(trace(z_list[0]).imag());
  throw StatisticUnknown("unknown swap statistic '" + name + "'");
}

ExperimentReport four_moment_swap(const FourMomentConfig& cfg) {
  const auto t0 = Clock::now();
  const auto& names = swap_statistic_names();
  if (std::find(names.begin(), names.end(), cfg.statistic) == names.end())
    throw StatisticUnknown("unknown swap statistic '" + cfg.statistic + "'");
  if (cfg.z_list.empty()) throw PreconditionViolation("four_moment_swap needs z values");
  if (cfg.samples < 2) throw PreconditionViolation("four_moment_swap needs samples >= 2");
  const VarianceProfile& prof = cfg.profile;
  const std::size_t ns = static_cast<std::size_t>(cfg.samples);

  std::vector<double> fv(ns), fw(ns), fa(ns), fb(ns);
  parallel_for(ns, cfg.threads, [&](std::size_t s) {
    const std::uint64_t seed_m = derive(cfg.seed, "four_moment", s);
    const std::uint64_t seed_c = derive(cfg.seed, "four_moment_control", s);
    fv[s] = swap_statistic(cfg.statistic, spectrum(sample_matrix(prof, cfg.law_v, cfg.symmetry, seed_m)), cfg.z_list);
    fw[s] = swap_statistic(cfg.statistic, spectrum(sample_matrix(prof, cfg.law_w, cfg.symmetry, seed_m)), cfg.z_list);
    fa[s] = swap_statistic(cfg.statistic, spectrum(sample_matrix(prof, cfg.control_a, cfg.symmetry, seed_c)),
                           cfg.z_list);
    fb[s] = swap_statistic(cfg.statistic, spectrum(sample_matrix(prof, cfg.control_b, cfg.symmetry, seed_c)),
                           cfg.z_list);
  });

  ExperimentReport rep;
  rep.id = "four_moment_swap";
  rep.master_seed = cfg.seed;
  nlohmann::json zs = nlohmann::json::array();
  for (cplx z : cfg.z_list) zs.push_back({z.real(), z.imag()});
  rep.params = {{"profile", prof.to_json()},       {"law_v", cfg.law_v.to_json()},
                {"law_w", cfg.law_w.to_json()},     {"control_a", cfg.control_a.to_json()},
                {"control_b", cfg.control_b.to_json()}, {"symmetry", symmetry_name(cfg.symmetry)},
                {"z_list", zs},                      {"statistic", cfg.statistic},
                {"samples", cfg.samples},            {"confidence", cfg.confidence}};

  auto diff = [](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
  };
  const std::vector<double> dm = diff(fv, fw), dc = diff(fa, fb);
  const double delta_m = std::abs(mean(dm)), se_m = std_error(dm);
  const double delta_c = std::abs(mean(dc)), se_c = std_error(dc);
  const double zq = normal_quantile(cfg.confidence);

  rep.cells.push_back(Cell::from_samples("pair=matched", "F_v", fv));
  rep.cells.push_back(Cell::from_samples("pair=matched", "F_w", fw));
  rep.cells.push_back(Cell::from_samples("pair=matched", "paired_difference", dm));
  rep.cells.push_back(Cell::scalar("pair=matched", "delta", delta_m, ns));
  rep.cells.push_back(Cell::scalar("pair=matched", "ci_half_width", zq * se_m, ns));
  rep.cells.push_back(Cell::from_samples("pair=control", "F_v", fa));
  rep.cells.push_back(Cell::from_samples("pair=control", "F_w", fb));
  rep.cells.push_back(Cell::from_samples("pair=control", "paired_difference", dc));
  rep.cells.push_back(Cell::scalar("pair=control", "delta", delta_c, ns));
  rep.cells.push_back(Cell::scalar("pair=control", "ci_half_width", zq * se_c, ns));
  const double margin = zq * std::sqrt(se_m * se_m + se_c * se_c);
  rep.cells.push_back(Cell::scalar("comparison", "delta_control_minus_matched", delta_c - delta_m, ns));
  rep.cells.push_back(Cell::scalar("comparison", "required_margin", margin, ns));
  rep.rules.push_back({"matched_below_control", delta_c - delta_m > margin,
                       "delta_matched " + fmt_rule(delta_m) + " (se " + fmt_rule(se_m) + "), delta_control " +
                           fmt_rule(delta_c) + " (se " + fmt_rule(se_c) + "), required margin " + fmt_rule(margin)});

  const double m4gap = std::abs(cfg.control_a.moments().m4 - cfg.control_b.moments().m4);
  if (m4gap < 1) rep.warnings.push_back("control pair mismatches m4 by less than 1");

  if (cfg.telescoping) {
    const int n = prof.n;
    if (n > 100) throw PreconditionViolation("telescoping mode needs N <= 100");
    const std::int64_t total = static_cast<std::int64_t>(n) * (n + 1) / 2;
    const std::int64_t stride = cfg.telescoping_stride > 0 ? cfg.telescoping_stride : std::max<std::int64_t>(1, total / 20);
    std::vector<std::int64_t> cuts;
    for (std::int64_t c = 0; c < total; c += stride) cuts.push_back(c);
    cuts.push_back(total);
    std::vector<std::vector<double>> f(cuts.size(), std::vector<double>(ns));
    parallel_for(ns, cfg.threads, [&](std::size_t s) {
      const std::uint64_t seed_m = derive(cfg.seed, "four_moment", s);
      for (std::size_t k = 0; k < cuts.size(); ++k)
        f[k][s] = swap_statistic(
            cfg.statistic,
            spectrum(sample_matrix_swapped(prof, cfg.law_v, cfg.law_w, cuts[k], cfg.symmetry, seed_m)), cfg.z_list);
    });
    for (std::size_t k = 0; k < cuts.size(); ++k)
      rep.cells.push_back(Cell::from_samples(kv("cut", static_cast<long long>(cuts[k])), "F", f[k]));
    rep.cells.push_back(Cell::scalar("telescoping", "delta", mean(f.back()) - mean(f.front()), ns));
  }
  rep.wall_clock_s = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------
// moment method

ExperimentReport trace_moment_bound(const TraceMomentConfig& cfg) {
  const auto t0 = Clock::now();
  if (cfg.k_max < 1 || cfg.k_max > 10) throw PreconditionViolation("trace_moment_bound needs 1 <= k_max <= 10");
  ExperimentReport rep;
  rep.id = "trace_moment_bound";
  rep.master_seed = cfg.seed;
  rep.params = {{"k_max", cfg.k_max},         {"moment_ks", cfg.moment_ks},
                {"profile", cfg.profile.to_json()}, {"law", cfg.law.to_json()},
                {"symmetry", symmetry_name(cfg.symmetry)}, {"samples", cfg.samples},
                {"delta", cfg.delta}};

  bool within = true, known = true, ratio_ok = true;
  std::string known_detail;
  const double n = cfg.profile.n;
  for (int k = 1; k <= cfg.k_max; ++k) {
    const std::vector<std::uint64_t> w = count_ordered_walks(k);
    for (int p = 1; p <= k; ++p) {
      const std::string id = kv("k", static_cast<long long>(k)) + ";" + kv("p", static_cast<long long>(p));
      const double bound = walk_bound(k, p);
      rep.cells.push_back(Cell::scalar(id, "walks", static_cast<double>(w[p]), 0));
      rep.cells.push_back(Cell::scalar(id, "walk_bound", bound, 0));
      if (static_cast<double>(w[p]) > bound) within = false;
      if (bound > 0) rep.cells.push_back(Cell::scalar(id, "S", walk_weight(k, p, n, cfg.delta), 0));
      if (k % 2 == 0 && p >= 2 && walk_bound(k, p) > 0) {
        const double lhs = walk_weight(k, p - 1, n, cfg.delta);
        const double rhs = std::pow(n, 2 * cfg.delta) * std::pow(k, 6.0) / (4 * n) * walk_weight(k, p, n, cfg.delta);
        if (lhs > rhs) ratio_ok = false;
      }
    }
    // tree walks: W(2m, m+1) = Catalan(m)
    if (k % 2 == 0 && w[k / 2 + 1] != catalan(k / 2)) {
      known = false;
      known_detail += " W(" + std::to_string(k) + "," + std::to_string(k / 2 + 1) + ")";
    }
    if (k == 2 && (w[1] != 1 || w[2] != 1)) {
      known = false;
      known_detail += " W(2,1)/W(2,2)";
    }
  }
  rep.rules.push_back({"walk_bound", within, "W(k,p) <= binom(k,2p-2) p^(2(k-2p+2)) 2^(2p-2) for k <= k_max"});
  rep.rules.push_back(
      {"walk_known_values", known, known ? "W(2,1)=W(2,2)=1 and W(2m,m+1)=Catalan(m)" : "mismatch:" + known_detail});
  rep.rules.push_back({"skp_ratio", ratio_ok, "S(k,p-1) <= N^(2 delta) k^6/(4N) S(k,p) for even k"});

  if (cfg.samples > 0 && !cfg.moment_ks.empty()) {
    const std::size_t ns = static_cast<std::size_t>(cfg.samples);
    std::vector<std::vector<double>> tr(cfg.moment_ks.size(), std::vector<double>(ns));
    parallel_for(ns, cfg.threads, [&](std::size_t s) {
      const Eigen::VectorXd ev =
          spectrum(sample_matrix(cfg.profile, cfg.law, cfg.symmetry, derive(cfg.seed, "trace_moment", s)));
      for (std::size_t q = 0; q < cfg.moment_ks.size(); ++q) tr[q][s] = ev.array().pow(cfg.moment_ks[q]).mean();
    });
    for (std::size_t q = 0; q < cfg.moment_ks.size(); ++q) {
      const int k = cfg.moment_ks[q];
      const double expect = k % 2 == 0 ? static_cast<double>(catalan(k / 2)) : 0.0;
      const std::string id = kv("k", static_cast<long long>(k));
      const Cell c = Cell::from_samples(id, "trace_moment", tr[q]);
      rep.cells.push_back(c);
      rep.cells.push_back(Cell::scalar(id, "catalan", expect, 0));
      const double dev = std::abs(c.mean - expect);
      rep.rules.push_back({"trace_moment[" + id + "]", dev <= 4 * c.stderr_ + 1e-12,
                           "|mean - " + fmt_rule(expect) + "| = " + fmt_rule(dev) + " vs 4 se = " +
                               fmt_rule(4 * c.stderr_)});
    }
  }
  rep.wall_clock_s = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------
// large deviations

LdpMode ldp_mode_from_name(const std::string& s) {
  if (s == "linear") return LdpMode::Linear;
  if (s == "quadratic_diag" || s == "quadratic-diag") return LdpMode::QuadraticDiag;
  if (s == "quadratic_offdiag" || s == "quadratic-offdiag") return LdpMode::QuadraticOffdiag;
  throw PreconditionViolation("unknown ldp mode '" + s + "'");
}

std::string ldp_mode_name(LdpMode m) {
  switch (m) {
    case LdpMode::Linear: return "linear";
    case LdpMode::QuadraticDiag: return "quadratic_diag";
    case LdpMode::QuadraticOffdiag: return "quadratic_offdiag";
  }
  return "";
}

double ldp_exponent(LdpMode mode, double alpha) {
  switch (mode) {
    case LdpMode::Linear: return 2 / (2 + alpha);
    case LdpMode::QuadraticDiag: return 1 / (1 + alpha);
    case LdpMode::QuadraticOffdiag: return 1 / (2 * (1 + alpha));
  }
  return 0;
}

ExperimentReport ldp_tails(const LdpConfig& cfg) {
  const auto t0 = Clock::now();
  const int n = cfg.n;
  if (n < 1 || (cfg.mode == LdpMode::QuadraticOffdiag && n < 2)) throw PreconditionViolation("ldp_tails: n too small");
  if (cfg.samples < 100000) throw PreconditionViolation("ldp_tails needs samples >= 1e5");
  const bool linear = cfg.mode == LdpMode::Linear;
  std::vector<double> coef = cfg.coefficients;
  const std::size_t want = linear ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
  if (coef.empty()) {
    CounterRng rng(derive(cfg.seed, "ldp_coefficients", 0));
    coef.assign(want, 0.0);
    if (linear) {
      for (auto& c : coef) c = rng.normal();
    } else {
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) coef[i * n + j] = coef[j * n + i] = rng.normal();
    }
  }
  if (coef.size() != want) throw PreconditionViolation("ldp_tails: coefficient count does not match n");

  double norm = 0;
  if (linear) {
    for (double c : coef) norm += c * c;
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const bool diag = i == j;
        if (diag == (cfg.mode == LdpMode::QuadraticDiag)) norm += coef[i * n + j] * coef[i * n + j];
      }
  }
  norm = std::sqrt(norm);
  if (!(norm > 0)) throw PreconditionViolation("ldp_tails: coefficients vanish");

  const std::size_t ns = static_cast<std::size_t>(cfg.samples);
  std::vector<double> x(ns);
  const double var = cfg.law.moments().m2;
  parallel_for(ns, cfg.threads, [&](std::size_t s) {
    CounterRng rng(derive(cfg.seed, "ldp", s));
    std::vector<double> a(n);
    for (auto& v : a) v = cfg.law.draw(rng);
    double t = 0;
    if (linear) {
      for (int i = 0; i < n; ++i) t += a[i] * coef[i];
    } else if (cfg.mode == LdpMode::QuadraticDiag) {
      for (int i = 0; i < n; ++i) t += coef[i * n + i] * (a[i] * a[i] - var);
    } else {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j) t += a[i] * coef[i * n + j] * a[j];
    }
    x[s] = t / norm;
  });

  ExperimentReport rep;
  rep.id = "ldp_tails";
  rep.master_seed = cfg.seed;
  const double p = ldp_exponent(cfg.mode, cfg.law.subexp().alpha);
  rep.params = {{"law", cfg.law.to_json()}, {"mode", ldp_mode_name(cfg.mode)}, {"n", n},
                {"coefficients", coef},     {"d_grid", cfg.d_grid},          {"samples", cfg.samples},
                {"exponent", p},            {"c_max", cfg.c_max}};

  const double dn = static_cast<double>(ns);
  std::vector<double> tails;
  for (double d : cfg.d_grid) {
    std::size_t hits = 0;
    for (double v : x) hits += std::abs(v) >= d;
    tails.push_back(static_cast<double>(hits) / dn);
  }
  std::vector<double> fx, fy;
  for (std::size_t k = 0; k < cfg.d_grid.size(); ++k)
    if (cfg.d_grid[k] > 0 && tails[k] > 0) {
      fx.push_back(std::pow(cfg.d_grid[k], p));
      fy.push_back(std::log(tails[k]));
    }
  double c_rate = NAN, c_pre = NAN, c_reg = NAN;
  // Cap the rate at the largest one whose envelope still dominates every
  // grid point with prefactor c_max.
  double c_cap = INFINITY;
  for (std::size_t k = 0; k < fx.size(); ++k) c_cap = std::min(c_cap, (std::log(cfg.c_max) - fy[k]) / fx[k]);
  if (fx.size() == 1) c_rate = c_cap;
  if (fx.size() >= 2) {
    const LinearFit lf = fit_line(fx, fy);
    c_reg = -lf.slope;
    c_rate = std::min(c_reg, c_cap);
    Fit f;
    f.name = "log_tail_vs_D^p";
    f.slope = lf.slope;
    f.intercept = lf.intercept;
    f.slope_se = lf.slope_se;
    f.points = fx.size();
    rep.fits.push_back(f);
  }
  if (!std::isnan(c_rate)) {
    c_pre = 0;
    for (std::size_t k = 0; k < cfg.d_grid.size(); ++k)
      c_pre = std::max(c_pre, tails[k] * std::exp(c_rate * std::pow(cfg.d_grid[k], p)));
  }
  // No positive tail beyond D = 0: every envelope dominates.
  const bool vanishing = fx.empty();
  for (std::size_t k = 0; k < cfg.d_grid.size(); ++k) {
    const std::string id = kv("D", cfg.d_grid[k]);
    Cell c = Cell::scalar(id, "tail", tails[k], ns);
    c.stderr_ = std::sqrt(tails[k] * (1 - tails[k]) / dn);
    rep.cells.push_back(c);
    if (!std::isnan(c_rate))
      rep.cells.push_back(Cell::scalar(id, "envelope", c_pre * std::exp(-c_rate * std::pow(cfg.d_grid[k], p)), ns));
  }
  rep.cells.push_back(Cell::scalar("fit", "C", c_pre, ns));
  rep.cells.push_back(Cell::scalar("fit", "c", c_rate, ns));
  rep.cells.push_back(Cell::scalar("fit", "c_regression", c_reg, ns));
  rep.cells.push_back(Cell::scalar("fit", "p", p, ns));
  const bool env_ok = vanishing || (c_rate > 0 && c_pre <= cfg.c_max * (1 + 1e-12));
  rep.rules.push_back({"subexponential_envelope", env_ok,
                       vanishing ? "all tails vanish for D > 0"
                                 : "C = " + fmt_rule(c_pre) + ", c = " + fmt_rule(c_rate) + ", p = " + fmt_rule(p)});

  if (linear && std::holds_alternative<GaussianLaw>(cfg.law.params())) {
    bool ok = true;
    std::string worst;
    for (std::size_t k = 0; k < cfg.d_grid.size(); ++k) {
      const double exact = std::erfc(cfg.d_grid[k] / std::sqrt(2.0));
      const double se = std::max(std::sqrt(exact * (1 - exact) / dn), 1.0 / dn);
      if (std::abs(tails[k] - exact) > 4 * se) {
        ok = false;
        worst += " D=" + fmt17(cfg.d_grid[k]);
      }
      rep.cells.push_back(Cell::scalar(kv("D", cfg.d_grid[k]), "gaussian_tail", exact, 0));
    }
    rep.rules.push_back({"gaussian_oracle", ok, ok ? "within 4 se of erfc(D/sqrt 2)" : "outside 4 se at" + worst});
  }
  rep.wall_clock_s = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------
// gap universality

ExperimentReport gap_universality(const GapConfig& cfg) {
  const auto t0 = Clock::now();
  if (!(cfg.window_lo >= -2 + kBulkMargin && cfg.window_hi <= 2 - kBulkMargin && cfg.window_lo < cfg.window_hi))
    throw PreconditionViolation("gap_universality is bulk-only: window must lie in [-1.8, 1.8]");
  if (cfg.samples_a < 1 || cfg.samples_b < 1) throw PreconditionViolation("gap_universality needs samples >= 1");

  ExperimentReport rep;
  rep.id = "gap_universality";
  rep.master_seed = cfg.seed;
  rep.params = {{"profile_a", cfg.profile_a.to_json()}, {"profile_b", cfg.profile_b.to_json()},
                {"law_a", cfg.law_a.to_json()},         {"law_b", cfg.law_b.to_json()},
                {"symmetry", symmetry_name(cfg.symmetry)}, {"window", {cfg.window_lo, cfg.window_hi}},
                {"samples_a", cfg.samples_a},            {"samples_b", cfg.samples_b},
                {"moving_ks", cfg.moving_ks},            {"moving_delta", cfg.moving_delta}};
  for (const auto& [tag, law] : {std::pair{"law_a", &cfg.law_a}, std::pair{"law_b", &cfg.law_b}}) {
    const Moments& m = law->moments();
    if (m.m4 - m.m3 * m.m3 <= 1 + 1e-12)
      rep.warnings.push_back(std::string(tag) + " violates m4 - m3^2 > 1 (two-point law)");
  }

  const std::size_t na = cfg.samples_a, nb = cfg.samples_b;
  std::vector<std::vector<double>> gaps(na + nb);
  std::vector<std::vector<double>> moving(na + nb, std::vector<double>(cfg.moving_ks.size()));
  parallel_for(na + nb, cfg.threads, [&](std::size_t t) {
    const bool is_a = t < na;
    const std::size_t s = is_a ? t : t - na;
    const VarianceProfile& prof = is_a ? cfg.profile_a : cfg.profile_b;
    const RandomMatrix h = sample_matrix(prof, is_a ? cfg.law_a : cfg.law_b, cfg.symmetry,
                                         derive(cfg.seed, is_a ? "gap_a" : "gap_b", s));
    const SpectralData sd = spectral_data(h, false);
    gaps[t] = gap_statistics(sd, cfg.window_lo, cfg.window_hi);
    for (std::size_t q = 0; q < cfg.moving_ks.size(); ++q) {
      const int k = cfg.moving_ks[q];
      moving[t][q] = moving_average(sd, prof.n / 2 - k / 2, k);
    }
  });

  std::vector<double> pa, pb;
  for (std::size_t t = 0; t < na + nb; ++t) {
    auto& dst = t < na ? pa : pb;
    dst.insert(dst.end(), gaps[t].begin(), gaps[t].end());
  }
  if (pa.size() < 1000 || pb.size() < 1000)
    throw InsufficientGaps("pooled gap count below 1000 (a: " + std::to_string(pa.size()) +
                           ", b: " + std::to_string(pb.size()) + ")");
  rep.cells.push_back(Cell::from_samples("ensemble=a", "unfolded_gap", pa));
  rep.cells.push_back(Cell::from_samples("ensemble=b", "unfolded_gap", pb));
  const KsResult ks = ks_two_sample(pa, pb);
  rep.cells.push_back(Cell::scalar("ks", "distance", ks.distance, pa.size() + pb.size()));
  rep.cells.push_back(Cell::scalar("ks", "p_value", ks.p_value, pa.size() + pb.size()));

  for (int e = 0; e < 2; ++e) {
    const std::size_t lo = e == 0 ? 0 : na, hi = e == 0 ? na : na + nb;
    const int n = e == 0 ? cfg.profile_a.n : cfg.profile_b.n;
    for (std::size_t q = 0; q < cfg.moving_ks.size(); ++q) {
      const int k = cfg.moving_ks[q];
      std::vector<double> v;
      for (std::size_t t = lo; t < hi; ++t) v.push_back(moving[t][q]);
      const double mu = mean(v);
      const double thr = std::pow(static_cast<double>(n), -0.5 + cfg.moving_delta) / std::sqrt(static_cast<double>(k));
      std::size_t over = 0;
      for (double x : v) over += std::abs(x - mu) >= thr;
      const std::string id = std::string("ensemble=") + (e == 0 ? "a" : "b") + ";" + kv("K", static_cast<long long>(k));
      rep.cells.push_back(Cell::from_samples(id, "moving_average", v));
      rep.cells.push_back(Cell::scalar(id, "moving_threshold", thr, v.size()));
      rep.cells.push_back(Cell::scalar(id, "moving_exceed_fraction", static_cast<double>(over) / v.size(), v.size()));
    }
  }
  rep.rules.push_back({"ks_distance", ks.distance <= cfg.ks_distance_max,
                       "distance " + fmt_rule(ks.distance) + " <= " + fmt_rule(cfg.ks_distance_max)});
  rep.rules.push_back(
      {"ks_p_value", ks.p_value >= cfg.ks_p_min, "p " + fmt_rule(ks.p_value) + " >= " + fmt_rule(cfg.ks_p_min)});
  rep.wall_clock_s = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------
// rigidity

ExperimentReport rigidity_scaling(const RigidityConfig& cfg) {
  const auto t0 = Clock::now();
  if (cfg.n_list.size() < 2) throw PreconditionViolation("rigidity_scaling needs at least two N values");
  if (cfg.samples < 1) throw PreconditionViolation("rigidity_scaling needs samples >= 1");
  const std::size_t nn = cfg.n_list.size(), ns = cfg.samples;
  std::vector<std::vector<double>> full(nn, std::vector<double>(ns)), bulk = full;
  parallel_for(nn * ns, cfg.threads, [&](std::size_t t) {
    const std::size_t q = t / ns, s = t % ns;
    const int n = cfg.n_list[q];
    const SpectralData sd =
        spectral_data(sample_matrix(wigner_profile(n), cfg.law, cfg.symmetry,
                                    derive(derive(cfg.seed, "rigidity", static_cast<std::uint64_t>(n)), s)),
                      false);
    full[q][s] = rigidity_stat(sd);
    bulk[q][s] = rigidity_stat_bulk(sd, cfg.kappa);
  });

  ExperimentReport rep;
  rep.id = "rigidity_scaling";
  rep.master_seed = cfg.seed;
  rep.params = {{"n_list", cfg.n_list},         {"law", cfg.law.to_json()}, {"symmetry", symmetry_name(cfg.symmetry)},
                {"samples", cfg.samples},       {"kappa", cfg.kappa},       {"slope", {cfg.slope_lo, cfg.slope_hi}},
                {"bulk_max", cfg.bulk_max}};
  std::vector<double> logn, logf, logb;
  for (std::size_t q = 0; q < nn; ++q) {
    const std::string id = kv("N", static_cast<long long>(cfg.n_list[q]));
    const Cell cf = Cell::from_samples(id, "rigidity", full[q]);
    const Cell cb = Cell::from_samples(id, "rigidity_bulk", bulk[q]);
    rep.cells.push_back(cf);
    rep.cells.push_back(cb);
    logn.push_back(std::log(static_cast<double>(cfg.n_list[q])));
    logf.push_back(std::log(cf.mean));
    logb.push_back(std::log(cb.mean));
  }
  for (const auto& [name, logy] : {std::pair{std::string("rigidity_slope"), &logf},
                                   std::pair{std::string("rigidity_bulk_slope"), &logb}}) {
    const LinearFit lf = fit_line(logn, *logy);
    rep.fits.push_back({name, lf.slope, lf.intercept, lf.slope_se, nn});
  }
  const Fit& f = rep.fits.front();
  rep.rules.push_back({"rigidity_slope", f.slope >= cfg.slope_lo && f.slope <= cfg.slope_hi,
                       "slope " + fmt_rule(f.slope) + " +- " + fmt_rule(f.slope_se) + " in [" +
                           fmt_rule(cfg.slope_lo) + ", " + fmt_rule(cfg.slope_hi) + "]"});
  const double last = std::exp(logb.back());
  rep.rules.push_back({"rigidity_bulk_value", last <= cfg.bulk_max,
                       "bulk statistic " + fmt_rule(last) + " <= " + fmt_rule(cfg.bulk_max) + " at the largest N"});
  rep.wall_clock_s = seconds_since(t0);
  return rep;
}

}  // namespace rmt
