#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "vffrls/config.hpp"
#include "vffrls/error.hpp"

using namespace vffrls;

namespace {

bool mentions(ConfigError const &e, std::string const &text)
{
  for (auto const &p : e.problems) {
    if (p.find(text) != std::string::npos) { return true; }
  }
  return false;
}

std::string with_change(std::string json, std::string const &from, std::string const &to)
{
  auto const pos = json.find(from);
  REQUIRE(pos != std::string::npos);
  return json.replace(pos, from.size(), to);
}

} // namespace

TEST_CASE("every preset validates and round-trips")
{
  for (auto const &name : preset_names()) {
    auto const p = find_preset(name);
    CHECK(p.name == name);
    REQUIRE_FALSE(p.cases.empty());
    for (auto const &ec : p.cases) { CHECK(validation_errors(ec.config).empty()); }
    auto const text   = to_json(p.cases);
    auto const parsed = parse_experiment(text);
    CHECK(to_json(parsed) == text);
  }
}

TEST_CASE("fig4 carries the stated parameters")
{
  auto const  c = find_preset("fig4").cases[0].config;
  CHECK(c.N == 15);
  CHECK(c.K_initial == 6);
  CHECK(c.power_offsets_db == std::vector<double>{3, 3, 6, 0, 0});
  CHECK(c.path_powers_db == std::vector<double>{0, -6, -10});
  CHECK(c.f_dT == 1e-5);
  CHECK(c.snr_db == 15.0);
  CHECK(c.training_symbols == 250);
  CHECK(c.total_symbols == 2000);
  REQUIRE(c.events.size() == 1);
  CHECK(c.events[0].symbol == 1000);
  CHECK(c.events[0].power_offsets_db == std::vector<double>{3, 3, 6, 0});
  REQUIRE(c.receivers.size() == 4);
  auto const &ct = c.receivers[0].ctvff;
  CHECK(ct.lambda_minus == 0.98);
  CHECK(ct.lambda_plus == 0.99998);
  CHECK(ct.delta1 == 0.934);
  CHECK(ct.delta2 == 0.005);
  CHECK(ct.delta3 == 0.99);
  auto const &gv = c.receivers[1].gvff;
  CHECK(gv.mu == 0.0025);
  CHECK(gv.lambda_minus == 0.992);
  CHECK(gv.lambda0 == 0.998);
  CHECK(c.receivers[2].fixed.lambda == 0.997);
  CHECK(c.total_users() == 10);
}

TEST_CASE("analysis presets carry the stated deltas")
{
  auto const p = find_preset("fig9");
  REQUIRE(p.cases.size() == 2);
  auto const &s = p.cases[0].config.receivers[0].ctvff;
  CHECK(s.delta1 == 0.99);
  CHECK(s.delta2 == 0.0035);
  CHECK(s.delta3 == 0.995);
  CHECK(p.cases[0].config.channel_model == ChannelModel::Static);
  auto const &t = p.cases[1].config.receivers[0].ctvff;
  CHECK(t.delta2 == 0.0004);
  CHECK(t.delta3 == 0.99);
  CHECK(p.cases[1].config.f_dT == 1e-5);
  CHECK(p.cases[0].analytical);
}

TEST_CASE("unknown preset")
{
  CHECK_THROWS_AS(find_preset("fig99"), ConfigError);
}

TEST_CASE("validation names the broken invariant")
{
  auto const base = to_json(find_preset("fig5").cases);

  try {
    parse_experiment(with_change(base, "\"training_symbols\": 250", "\"training_symbols\": 2500"));
    FAIL("expected ConfigError");
  } catch (ConfigError const &e) {
    CHECK(mentions(e, "training_symbols"));
  }

  try {
    parse_experiment(with_change(base, "\"delta1\": 0.934", "\"delta1\": 1.0"));
    FAIL("expected ConfigError");
  } catch (ConfigError const &e) {
    CHECK(mentions(e, "delta1 must lie in (0, 1)"));
  }

  try {
    parse_experiment(with_change(base, "\"N\": 15", "\"N\": 15, \"colour\": 3"));
    FAIL("expected ConfigError");
  } catch (ConfigError const &e) {
    CHECK(mentions(e, "colour: unknown key"));
  }

  try {
    parse_experiment(with_change(base, "\"L_p\": 3", "\"L_p\": 2"));
    FAIL("expected ConfigError");
  } catch (ConfigError const &e) {
    CHECK(mentions(e, "L_p"));
  }

  try {
    parse_experiment(with_change(base, "\"K_initial\": 6", "\"K_initial\": 16"));
    FAIL("expected ConfigError");
  } catch (ConfigError const &e) {
    CHECK(mentions(e, "capacity"));
  }

  CHECK_THROWS_AS(parse_experiment("{ not json"), ConfigError);
  CHECK_THROWS_AS(parse_experiment(with_change(base, "\"kind\": \"ctvff\"", "\"kind\": \"mgvff\"")), ConfigError);
}

TEST_CASE("defaults fill a minimal file")
{
  auto const cases = parse_experiment(R"({"receivers": [{"kind": "ctvff"}]})");
  REQUIRE(cases.size() == 1);
  auto const &c = cases[0].config;
  CHECK(c.N == 15);
  CHECK(c.total_symbols == 2000);
  CHECK(c.receivers[0].ctvff.delta1 == 0.934);
  CHECK(c.receivers[0].convention == ErrorConvention::APriori);
}

TEST_CASE("files")
{
  CHECK_THROWS_AS(load_experiment("definitely/missing.json"), ConfigError);
  auto const path = std::filesystem::temp_directory_path() / "vffrls_cfg.json";
  std::ofstream(path) << to_json(find_preset("fig9").cases);
  auto const cases = load_experiment(path);
  CHECK(cases.size() == 2);
  CHECK(cases[1].label == "tracking");
  std::filesystem::remove(path);
}
