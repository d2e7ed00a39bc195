#include <doctest.h>

#include <string>

#include "rmtlab/config.hpp"
#include "rmtlab/errors.hpp"

using namespace rmt;
using nlohmann::json;

namespace {

json base() {
  return json::parse(R"({"experiment": "local_law_scan", "seed": 5,
                         "profile": {"type": "wigner", "n": 30},
                         "eta_grid": [0.5, 0.2], "samples": 2})");
}

std::string invalid_message(const json& j) {
  try {
    parse_run_config(j);
    run_experiment(parse_run_config(j), 1);
  } catch (const ConfigInvalid& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("valid config parses and runs") {
    const RunConfig c = parse_run_config(base());
    CHECK(c.experiment == "local_law_scan");
    CHECK(c.seed == 5);
    CHECK_FALSE(c.threads.has_value());
    const ExperimentReport r = run_experiment(c, 1);
    CHECK(r.master_seed == 5);
    CHECK(r.rule("lambda_d_slope[E=0]") != nullptr);
  }

  TEST_CASE("errors name the offending key") {
    json j = base();
    j.erase("seed");
    CHECK(invalid_message(j).find("'seed'") != std::string::npos);

    j = base();
    j["seed"] = -1;
    CHECK(invalid_message(j).find("'seed'") != std::string::npos);

    j = base();
    j["samples"] = "many";
    CHECK(invalid_message(j).find("'samples'") != std::string::npos);

    j = base();
    j["etagrid"] = {0.1};
    CHECK(invalid_message(j).find("'etagrid'") != std::string::npos);

    j = base();
    j["experiment"] = "nope";
    CHECK(invalid_message(j).find("'experiment'") != std::string::npos);

    j = base();
    j["law"] = {{"kind", "matching"}, {"params", {{"m3", 0}, {"m4", 1}}}};
    CHECK(invalid_message(j).find("'law'") != std::string::npos);

    j = base();
    j["profile"]["type"] = "spiral";
    CHECK(invalid_message(j).find("'profile'") != std::string::npos);

    j = base();
    j["eta_exponents"] = {0.5};
    CHECK(invalid_message(j).find("'eta_grid'") != std::string::npos);
  }

  TEST_CASE("full 64-bit seeds are accepted") {
    json j = base();
    j["seed"] = 18446744073709551615ULL;
    CHECK(parse_run_config(j).seed == 18446744073709551615ULL);
  }

  TEST_CASE("law specs") {
    const EntryLaw m = law_from_spec({{"kind", "matching"}, {"params", {{"m3", 0.5}, {"m4", 3}}}});
    CHECK(m.kind_name() == "two_gaussian_mixture");
    const EntryLaw g = law_from_spec(
        {{"kind", "matched_gaussian_divisible"}, {"params", {{"m3", 0.5}, {"m4", 3.2}, {"gamma", 0.1}}}});
    CHECK(g.kind_name() == "gaussian_divisible");
    CHECK(g.moments().m3 == doctest::Approx(0.5));
    const EntryLaw nested = law_from_spec(
        {{"kind", "gaussian_divisible"},
         {"params", {{"gamma", 0.2}, {"base", {{"kind", "matching"}, {"params", {{"m3", 0}, {"m4", 2}}}}}}}});
    CHECK(nested.moments().m4 == doctest::Approx(0.64 * 2 + 6 * 0.2 - 3 * 0.04));
    // canonical law JSON is a valid spec too
    CHECK(law_from_spec(m.to_json()).id() == m.id());
  }

  TEST_CASE("every experiment is reachable from a config") {
    const json configs[] = {
        json::parse(R"({"experiment": "four_moment_swap", "seed": 1, "profile": {"type": "wigner", "n": 10},
                        "law_v": {"kind": "bernoulli"}, "law_w": {"kind": "bernoulli"},
                        "z_list": [[0.5, 0.2]], "samples": 4})"),
        json::parse(R"({"experiment": "trace_moment_bound", "seed": 1, "k_max": 6, "samples": 0})"),
        json::parse(R"({"experiment": "ldp_tails", "seed": 1, "law": {"kind": "bernoulli"}, "n": 8,
                        "samples": 100000})"),
        json::parse(R"({"experiment": "gap_universality", "seed": 1,
                        "profile_a": {"type": "wigner", "n": 200}, "profile_b": {"type": "wigner", "n": 200},
                        "samples_a": 10, "samples_b": 10})"),
        json::parse(R"({"experiment": "rigidity_scaling", "seed": 1, "n_list": [20, 40], "samples": 2})"),
    };
    for (const auto& j : configs) {
      const ExperimentReport r = run_experiment(parse_run_config(j), 1);
      CHECK(r.id == j["experiment"].get<std::string>());
    }
    CHECK(experiment_names().size() == 6);
  }

  TEST_CASE("manifest and hash") {
    const RunConfig c = parse_run_config(base());
    const ExperimentReport r = run_experiment(c, 1);
    const json m = make_manifest(c, r, 1);
    CHECK(m["master_seed"] == 5);
    CHECK(m["config_hash"].get<std::string>().size() == 16);
    CHECK(m["experiments"][0]["wall_clock_s"].get<double>() >= 0);
    json other = base();
    other["seed"] = 6;
    CHECK(config_hash(other) != config_hash(base()));
    json reordered = json::parse(R"({"seed": 5, "samples": 2, "eta_grid": [0.5, 0.2],
                                     "profile": {"n": 30, "type": "wigner"}, "experiment": "local_law_scan"})");
    CHECK(config_hash(reordered) == config_hash(base()));
  }

  TEST_CASE("profile info") {
    const json info = profile_info(profile_from_spec({{"type", "band"}, {"n", 6}, {"params", {{"w", 2}}}}));
    CHECK(info["delta_minus"].get<double>() == doctest::Approx(2.0 / 3));
    CHECK(info["delta_plus"].get<double>() == doctest::Approx(1.0 / 3));
    CHECK(info["M"].get<double>() == doctest::Approx(3));
  }
}
