#include "rmtlab/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <Eigen/Core>
#include <boost/version.hpp>

#include "rmtlab/errors.hpp"
#include "rmtlab/report.hpp"
#include "rmtlab/rng.hpp"

namespace rmt {
namespace {

using nlohmann::json;

const std::set<std::string> kCommonKeys{"experiment", "seed", "threads", "out", "description"};

const std::map<std::string, std::set<std::string>>& experiment_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"local_law_scan",
       {"profile", "law", "symmetry", "e_grid", "eta_grid", "eta_exponents", "samples", "admissibility",
        "offdiag_columns", "slope_range", "deloc_samples", "deloc_window", "deloc_frequency"}},
      {"four_moment_swap",
       {"profile", "law_v", "law_w", "control_a", "control_b", "symmetry", "z_list", "statistic", "samples",
        "confidence", "telescoping", "telescoping_stride"}},
      {"trace_moment_bound", {"profile", "law", "symmetry", "k_max", "moment_ks", "samples", "delta"}},
      {"ldp_tails", {"law", "mode", "n", "coefficients", "d_grid", "samples", "c_max"}},
      {"gap_universality",
       {"profile_a", "profile_b", "law_a", "law_b", "symmetry", "window", "samples_a", "samples_b", "moving_ks",
        "moving_delta", "ks_distance_max", "ks_p_min"}},
      {"rigidity_scaling", {"n_list", "law", "symmetry", "samples", "kappa", "slope_range", "bulk_max"}},
  };
  return keys;
}

// Typed access to one JSON object, with errors that name the key.
class Reader {
 public:
  Reader(const json& j, std::string prefix = "") : j_(j), prefix_(std::move(prefix)) {}

  bool has(const std::string& k) const { return j_.contains(k); }
  std::string path(const std::string& k) const { return prefix_.empty() ? k : prefix_ + "." + k; }

  [[noreturn]] void fail(const std::string& k, const std::string& what) const {
    throw ConfigInvalid("config key '" + path(k) + "': " + what);
  }

  const json& at(const std::string& k) const {
    if (!j_.contains(k)) fail(k, "missing required key");
    return j_.at(k);
  }

  template <class T>
  T get(const std::string& k) const {
    const json& v = at(k);
    try {
      check_type<T>(k, v);
      return v.get<T>();
    } catch (const json::exception& e) {
      fail(k, e.what());
    }
  }

  template <class T>
  T get(const std::string& k, T fallback) const {
    return has(k) ? get<T>(k) : fallback;
  }

  double positive(const std::string& k, double fallback) const {
    const double v = get<double>(k, fallback);
    if (!(v > 0)) fail(k, "must be positive");
    return v;
  }

  int at_least(const std::string& k, int lo, std::optional<int> fallback = std::nullopt) const {
    const int v = fallback && !has(k) ? *fallback : get<int>(k);
    if (v < lo) fail(k, "must be >= " + std::to_string(lo));
    return v;
  }

  std::pair<double, double> range(const std::string& k, std::pair<double, double> fallback) const {
    if (!has(k)) return fallback;
    const auto v = get<std::vector<double>>(k);
    if (v.size() != 2 || !(v[0] < v[1])) fail(k, "expected [lo, hi] with lo < hi");
    return {v[0], v[1]};
  }

 private:
  template <class T>
  void check_type(const std::string& k, const json& v) const {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(k, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail(k, "expected an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) fail(k, "expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(k, "expected a string");
    } else {
      if (!v.is_array()) fail(k, "expected an array");
    }
  }

  const json& j_;
  std::string prefix_;
};

template <class F>
auto wrap(const std::string& key, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigInvalid&) {
    throw;
  } catch (const Error& e) {
    throw ConfigInvalid("config key '" + key + "': " + e.kind() + ": " + e.what());
  } catch (const json::exception& e) {
    throw ConfigInvalid("config key '" + key + "': " + e.what());
  }
}

SymmetryClass symmetry_of(const Reader& r) {
  if (!r.has("symmetry")) return SymmetryClass::ComplexHermitian;
  return wrap(r.path("symmetry"), [&] { return symmetry_from_name(r.get<std::string>("symmetry")); });
}

EntryLaw law_or(const Reader& r, const std::string& k, const EntryLaw& fallback) {
  return r.has(k) ? law_from_spec(r.at(k), r.path(k)) : fallback;
}

MatchingOptions matching_options(const Reader& p) {
  MatchingOptions opt;
  if (p.has("delta")) opt.delta = p.get<double>("delta");
  if (p.has("c1")) opt.c1 = p.get<double>("c1");
  opt.c2 = p.get<double>("c2", opt.c2);
  opt.tau = p.get<double>("tau", opt.tau);
  return opt;
}

std::vector<double> eta_grid(const Reader& r, int n) {
  if (r.has("eta_grid") == r.has("eta_exponents")) r.fail("eta_grid", "give exactly one of eta_grid or eta_exponents");
  if (r.has("eta_grid")) return r.get<std::vector<double>>("eta_grid");
  std::vector<double> out;
  for (double x : r.get<std::vector<double>>("eta_exponents")) out.push_back(std::pow(static_cast<double>(n), -x));
  return out;
}

ExperimentReport run_local_law(const Reader& r, std::uint64_t seed, int threads) {
  LocalLawConfig c;
  c.profile = profile_from_spec(r.at("profile"), r.path("profile"));
  c.law = law_or(r, "law", c.law);
  c.symmetry = symmetry_of(r);
  c.e_grid = r.get<std::vector<double>>("e_grid", c.e_grid);
  c.eta_grid = eta_grid(r, c.profile.n);
  c.samples = r.at_least("samples", 1);
  c.seed = seed;
  c.admissibility = r.positive("admissibility", c.admissibility);
  c.offdiag_columns = r.at_least("offdiag_columns", 0, c.offdiag_columns);
  std::tie(c.slope_lo, c.slope_hi) = r.range("slope_range", {c.slope_lo, c.slope_hi});
  c.deloc_samples = r.at_least("deloc_samples", 0, c.deloc_samples);
  std::tie(c.deloc_lo, c.deloc_hi) = r.range("deloc_window", {c.deloc_lo, c.deloc_hi});
  c.deloc_frequency = r.get<double>("deloc_frequency", c.deloc_frequency);
  c.threads = threads;
  return local_law_scan(c);
}

ExperimentReport run_four_moment(const Reader& r, std::uint64_t seed, int threads) {
  FourMomentConfig c;
  c.profile = profile_from_spec(r.at("profile"), r.path("profile"));
  c.law_v = law_from_spec(r.at("law_v"), r.path("law_v"));
  c.law_w = law_from_spec(r.at("law_w"), r.path("law_w"));
  c.control_a = law_or(r, "control_a", c.control_a);
  c.control_b = law_or(r, "control_b", c.control_b);
  c.symmetry = symmetry_of(r);
  for (const auto& z : r.get<std::vector<std::vector<double>>>("z_list")) {
    if (z.size() != 2 || !(z[1] > 0)) r.fail("z_list", "entries must be [re, im] with im > 0");
    c.z_list.emplace_back(z[0], z[1]);
  }
  if (c.z_list.empty()) r.fail("z_list", "must not be empty");
  c.statistic = r.get<std::string>("statistic", c.statistic);
  const auto& names = swap_statistic_names();
  if (std::find(names.begin(), names.end(), c.statistic) == names.end()) r.fail("statistic", "unknown statistic");
  c.samples = r.at_least("samples", 2);
  c.seed = seed;
  c.confidence = r.get<double>("confidence", c.confidence);
  if (!(c.confidence > 0.5 && c.confidence < 1)) r.fail("confidence", "must lie in (0.5, 1)");
  c.telescoping = r.get<bool>("telescoping", c.telescoping);
  c.telescoping_stride = r.at_least("telescoping_stride", 0, c.telescoping_stride);
  c.threads = threads;
  return four_moment_swap(c);
}

ExperimentReport run_trace_moment(const Reader& r, std::uint64_t seed, int threads) {
  TraceMomentConfig c;
  c.k_max = r.at_least("k_max", 1, c.k_max);
  if (c.k_max > 10) r.fail("k_max", "exhaustive enumeration supports k_max <= 10");
  c.moment_ks = r.get<std::vector<int>>("moment_ks", c.moment_ks);
  c.samples = r.at_least("samples", 0);
  if (c.samples > 0) c.profile = profile_from_spec(r.at("profile"), r.path("profile"));
  c.law = law_or(r, "law", c.law);
  c.symmetry = symmetry_of(r);
  c.seed = seed;
  c.delta = r.get<double>("delta", c.delta);
  c.threads = threads;
  return trace_moment_bound(c);
}

ExperimentReport run_ldp(const Reader& r, std::uint64_t seed, int threads) {
  LdpConfig c;
  c.law = law_or(r, "law", c.law);
  c.mode = wrap(r.path("mode"), [&] { return ldp_mode_from_name(r.get<std::string>("mode", std::string("linear"))); });
  c.n = r.at_least("n", 1, c.n);
  c.coefficients = r.get<std::vector<double>>("coefficients", c.coefficients);
  c.d_grid = r.get<std::vector<double>>("d_grid", c.d_grid);
  c.samples = r.at_least("samples", 100000);
  c.seed = seed;
  c.c_max = r.positive("c_max", c.c_max);
  c.threads = threads;
  return wrap("coefficients", [&] { return ldp_tails(c); });
}

ExperimentReport run_gap(const Reader& r, std::uint64_t seed, int threads) {
  GapConfig c;
  c.profile_a = profile_from_spec(r.at("profile_a"), r.path("profile_a"));
  c.profile_b = profile_from_spec(r.at("profile_b"), r.path("profile_b"));
  c.law_a = law_or(r, "law_a", c.law_a);
  c.law_b = law_or(r, "law_b", c.law_b);
  c.symmetry = symmetry_of(r);
  std::tie(c.window_lo, c.window_hi) = r.range("window", {c.window_lo, c.window_hi});
  if (c.window_lo < -2 + kBulkMargin || c.window_hi > 2 - kBulkMargin)
    r.fail("window", "must lie in the bulk [-1.8, 1.8]");
  c.samples_a = r.at_least("samples_a", 1);
  c.samples_b = r.at_least("samples_b", 1);
  c.seed = seed;
  c.moving_ks = r.get<std::vector<int>>("moving_ks", c.moving_ks);
  c.moving_delta = r.get<double>("moving_delta", c.moving_delta);
  c.ks_distance_max = r.positive("ks_distance_max", c.ks_distance_max);
  c.ks_p_min = r.get<double>("ks_p_min", c.ks_p_min);
  c.threads = threads;
  return gap_universality(c);
}

ExperimentReport run_rigidity(const Reader& r, std::uint64_t seed, int threads) {
  RigidityConfig c;
  c.n_list = r.get<std::vector<int>>("n_list", c.n_list);
  for (int n : c.n_list)
    if (n < 2) r.fail("n_list", "entries must be >= 2");
  c.law = law_or(r, "law", c.law);
  c.symmetry = symmetry_of(r);
  c.samples = r.at_least("samples", 1);
  c.seed = seed;
  c.kappa = r.positive("kappa", c.kappa);
  std::tie(c.slope_lo, c.slope_hi) = r.range("slope_range", {c.slope_lo, c.slope_hi});
  c.bulk_max = r.positive("bulk_max", c.bulk_max);
  c.threads = threads;
  return rigidity_scaling(c);
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : experiment_keys()) v.push_back(k);
    return v;
  }();
  return names;
}

EntryLaw law_from_spec(const json& j, const std::string& key) {
  if (!j.is_object()) throw ConfigInvalid("config key '" + key + "': expected an object");
  const Reader r(j, key);
  const std::string kind = r.get<std::string>("kind");
  const json params = j.value("params", json::object());
  const Reader p(params, key + ".params");
  return wrap(key, [&]() -> EntryLaw {
    if (kind == "matching") return build_matching_law(p.get<double>("m3"), p.get<double>("m4"), matching_options(p));
    if (kind == "matched_gaussian_divisible")
      return matched_gaussian_divisible(p.get<double>("m3"), p.get<double>("m4"), p.get<double>("gamma"),
                                        matching_options(p));
    if (kind == "gaussian_divisible")
      return gaussian_divisible(law_from_spec(p.at("base"), key + ".params.base"), p.get<double>("gamma"));
    return EntryLaw::from_json(j);
  });
}

VarianceProfile profile_from_spec(const json& j, const std::string& key) {
  if (!j.is_object()) throw ConfigInvalid("config key '" + key + "': expected an object");
  const Reader r(j, key);
  r.get<std::string>("type");
  if (r.at_least("n", 1) > 20000) r.fail("n", "must be <= 20000");
  return wrap(key, [&] { return profile_from_json(j); });
}

RunConfig parse_run_config(const json& j) {
  if (!j.is_object()) throw ConfigInvalid("config key '<root>': expected an object");
  const Reader r(j);
  RunConfig c;
  c.experiment = r.get<std::string>("experiment");
  const auto& keys = experiment_keys();
  const auto it = keys.find(c.experiment);
  if (it == keys.end()) r.fail("experiment", "unknown experiment '" + c.experiment + "'");
  const json& s = r.at("seed");
  if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
    r.fail("seed", "expected a non-negative 64-bit integer");
  c.seed = s.get<std::uint64_t>();
  if (r.has("threads")) c.threads = r.at_least("threads", 1);
  if (r.has("out")) c.out = r.get<std::string>("out");
  if (r.has("description")) r.get<std::string>("description");
  for (const auto& [k, _] : j.items())
    if (!kCommonKeys.count(k) && !it->second.count(k)) r.fail(k, "unknown key for " + c.experiment);
  c.body = j;
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigInvalid(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_run_config(j);
}

ExperimentReport run_experiment(const RunConfig& cfg, int threads) {
  const Reader r(cfg.body);
  if (cfg.experiment == "local_law_scan") return run_local_law(r, cfg.seed, threads);
  if (cfg.experiment == "four_moment_swap") return run_four_moment(r, cfg.seed, threads);
  if (cfg.experiment == "trace_moment_bound") return run_trace_moment(r, cfg.seed, threads);
  if (cfg.experiment == "ldp_tails") return run_ldp(r, cfg.seed, threads);
  if (cfg.experiment == "gap_universality") return run_gap(r, cfg.seed, threads);
  if (cfg.experiment == "rigidity_scaling") return run_rigidity(r, cfg.seed, threads);
  throw ConfigInvalid("config key 'experiment': unknown experiment '" + cfg.experiment + "'");
}

std::string config_hash(const json& j) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

json make_manifest(const RunConfig& cfg, const ExperimentReport& rep, int threads) {
  // Seed overrides from the command line are folded into the hashed config.
  json hashed = cfg.body;
  hashed["seed"] = cfg.seed;
  hashed.erase("threads");
  hashed.erase("out");
  return {{"config_hash", config_hash(hashed)},
          {"master_seed", cfg.seed},
          {"threads", threads},
          {"versions",
           {{"rmt_lab", kVersion},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"boost", std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) +
                          "." + std::to_string(BOOST_VERSION % 100)},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
            {"compiler", __VERSION__}}},
          {"experiments", json::array({{{"id", rep.id}, {"wall_clock_s", rep.wall_clock_s}, {"passed", rep.passed()}}})}};
}

void write_outputs(const std::filesystem::path& dir, const RunConfig& cfg, const ExperimentReport& rep, int threads) {
  json report = rep.to_json();
  report["config"] = cfg.body;
  report["config"]["seed"] = cfg.seed;
  write_text(dir / "report.json", report.dump(2) + "\n");
  write_text(dir / "cells.csv", rep.cells_csv());
  write_text(dir / "manifest.json", make_manifest(cfg, rep, threads).dump(2) + "\n");
}

json profile_info(const VarianceProfile& p) {
  return {{"type", p.type},
          {"n", p.n},
          {"delta_minus", p.delta_minus},
          {"delta_plus", p.delta_plus},
          {"M", p.m_param},
          {"C_inf", p.c_inf},
          {"C_sup", p.c_sup},
          {"simple_top_eigenvalue", p.simple_top}};
}

}  // namespace rmt
