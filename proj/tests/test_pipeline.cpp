#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "isl/config.hpp"
#include "isl/error.hpp"
#include "isl/pipeline.hpp"

using namespace isl;
using nlohmann::json;

namespace
{

std::string config_path(const std::string &stem)
{
  return std::string(ISL_CONFIG_DIR) + "/" + stem + ".json";
}

std::string data_path(const std::string &stem)
{
  return std::string(ISL_TEST_DATA) + "/" + stem + ".json";
}

json minimal()
{
  return json{{"name", "m"},
              {"interval", {0.0, 1.0}},
              {"p", 1.0},
              {"q", 0.0},
              {"w", {{"sign_step", {{"x0", 0.5}}}}},
              {"domain", "dirichlet"}};
}

}  // namespace

TEST_CASE("parse_config rejects malformed documents")
{
  CHECK_NOTHROW(parse_config(minimal()));
  auto j = minimal();
  j["extra"] = 1;
  CHECK_THROWS_AS(parse_config(j), InvalidInput);
  j = minimal();
  j.erase("w");
  CHECK_THROWS_AS(parse_config(j), InvalidInput);
  j = minimal();
  j["interval"] = {1.0, 0.0};
  CHECK_THROWS_AS(parse_config(j), InvalidInput);
  j = minimal();
  j["p"] = -1.0;
  CHECK_THROWS_AS(make_coefficients(parse_config(j)), InvalidInput);
  j = minimal();
  j["domain"] = {{"coupled", {{"phi", 0.0}, {"R", {{1.0, 1.0}, {1.0, 1.0}}}}}};
  CHECK_THROWS_AS(parse_config(j), InvalidInput);
  j = minimal();
  j["settings"] = {{"grid_n", 10}};
  CHECK_THROWS_AS(parse_config(j), InvalidInput);
  j = minimal();
  j["g"] = {{"sawtooth", 1.0}};
  CHECK_THROWS_AS(parse_config(j), InvalidInput);
  CHECK_THROWS_AS(load_config(data_path("unknown_key")), InvalidInput);
  CHECK_THROWS_AS(load_config(data_path("does_not_exist")), InvalidInput);
}

TEST_CASE("resolved config fills defaults and hashes deterministically")
{
  const auto a = parse_config(minimal());
  const auto b = parse_config(json::parse(minimal().dump()));
  CHECK(a.resolved.contains("settings"));
  CHECK(a.resolved["settings"]["grid_n"] == 500);
  CHECK(config_hash(a.resolved) == config_hash(b.resolved));
  CHECK(config_hash(a.resolved).size() == 16);
  auto j = minimal();
  j["q"] = 1.0;
  CHECK(config_hash(parse_config(j).resolved) != config_hash(a.resolved));
}

TEST_CASE("bounds on sgn(x - 1/2), q = 0 vanish")
{
  const auto r = cmd_bounds(load_config(config_path("dirichlet_sign_q0")));
  CHECK(r.exit_code == 0);
  REQUIRE(r.bounds->combined);
  CHECK(r.bounds->constants.beta == 0.0);
  CHECK(r.bounds->combined->im_bound == 0.0);
  CHECK(r.report["bounds"]["combined"]["im_bound"] == 0.0);
}

TEST_CASE("sin(1/x) example reports the g norms")
{
  const auto r = cmd_bounds(load_config(config_path("example_sin_inv_x")));
  CHECK(r.exit_code == 0);
  REQUIRE(r.bounds->g);
  CHECK(r.bounds->g->g_inf_norm == doctest::Approx(0.00297363898).epsilon(1e-8));
  CHECK(r.bounds->g->g_prime_p2_norm == doctest::Approx(0.0175974173).epsilon(1e-8));
  CHECK(r.bounds->g->g_inf_norm <= 0.003);
  CHECK(r.bounds->g->g_prime_p2_norm <= 0.02);
}

TEST_CASE("exit codes")
{
  CHECK(cmd_bounds(load_config(data_path("osc_no_g"))).exit_code == 2);
  CHECK(cmd_verify(load_config(data_path("robin_zero_c_d"))).exit_code == 1);
  CHECK(cmd_verify(load_config(config_path("robin_sign"))).exit_code == 0);
  CHECK(cmd_solve(load_config(config_path("definite_w1"))).exit_code == 0);
}

TEST_CASE("verify is deterministic")
{
  const auto cfg = load_config(config_path("quarter_step"));
  const auto a = cmd_verify(cfg), b = cmd_verify(cfg);
  CHECK(a.report.dump() == b.report.dump());
  CHECK(a.spectrum_csv == b.spectrum_csv);
  CHECK(a.bounds_csv == b.bounds_csv);
  CHECK(a.report["config_hash"] == config_hash(cfg.resolved));
}

TEST_CASE("write_outputs writes the three files")
{
  const auto dir = std::filesystem::temp_directory_path() / "isl_test_pipeline_out";
  std::filesystem::remove_all(dir);
  const auto r = cmd_verify(load_config(config_path("ghost_q_minus50")));
  write_outputs(r, dir.string());
  for (const char *f : {"report.json", "spectrum.csv", "bounds.csv"})
  {
    CHECK(std::filesystem::exists(dir / f));
  }
  std::ifstream in(dir / "report.json");
  const auto j = json::parse(in);
  CHECK(j == r.report);
  CHECK(j["spectrum"]["counts"]["nonreal"].get<int>() >= 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("every bundled config verifies")
{
  for (const auto &entry : std::filesystem::directory_iterator(ISL_CONFIG_DIR))
  {
    CAPTURE(entry.path().string());
    const auto r = cmd_verify(load_config(entry.path().string()));
    CHECK(r.exit_code == 0);
    CHECK(r.verify->failures.empty());
  }
}
