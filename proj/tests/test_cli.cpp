#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "msol/commands.hpp"
#include "msol/common.hpp"
#include "msol/config.hpp"
#include "msol/csv.hpp"

using namespace msol;

namespace {
Json golden_config() {
  return Json::parse(R"({
    "solenoid": {"transversal": {"kind": "circle"}, "map": {"kind": "rotation", "real": 0.6180339887498949}},
    "measure": {"kind": "lebesgue"},
    "forms": [{"id": "dtheta2", "dtheta": 2}],
    "options": {"random_forms": {"count": 2}},
    "seed": 7
  })");
}

std::string config_error_path(const Json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}
}  // namespace

TEST_CASE("config errors name the field") {
  auto j = Json::parse(R"({"solenoid": {"transversal": {"kind": "cantor", "p": 1, "depth": 4}, "map": {"kind": "odometer"}}})");
  const auto p = config_error_path(j);
  CHECK(p.find("transversal.p") != std::string::npos);

  auto u = golden_config();
  u["solenoid"]["map"]["reall"] = 0.3;
  CHECK(config_error_path(u).find("solenoid.map") != std::string::npos);

  auto s = golden_config();
  s.erase("seed");
  CHECK(config_error_path(s) == "seed");

  auto g = golden_config();
  g["options"]["grid"] = -4;
  CHECK(config_error_path(g).find("grid") != std::string::npos);

  auto m = golden_config();
  m["measure"] = Json::parse(R"({"kind": "finite_weights", "weights": [1, 2]})");
  CHECK(config_error_path(m).find("measure") != std::string::npos);
}

TEST_CASE("echo is complete and a fixed point") {
  const auto cfg = parse_config(golden_config());
  const auto& e = cfg.echo;
  for (const char* k : {"solenoid", "measure", "immersion", "forms", "options", "seed", "output"}) CHECK(e.contains(k));
  for (const char* k : {"quad", "ulam", "minimality", "grid", "r", "r_prime", "refinements", "samples_per_radius",
                        "flowbox_depths", "horizon", "x0", "random_forms", "fail_on_atoms"})
    CHECK(e["options"].contains(k));
  CHECK(e["immersion"]["kind"] == "rotation_standard");
  const auto again = parse_config(e);
  CHECK(again.echo.dump() == e.dump());
}

TEST_CASE("reruns are byte identical") {
  const auto cfg = parse_config(golden_config());
  for (const char* cmd : {"build", "pair", "homology", "ergodic"}) {
    const auto a = run_command(cmd, cfg);
    const auto b = run_command(cmd, cfg);
    CHECK(a.to_json().dump() == b.to_json().dump());
    REQUIRE(a.files.size() == b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) CHECK(a.files[i] == b.files[i]);
  }
  // the seed changes the random forms and nothing else
  auto j = golden_config();
  j["seed"] = 8;
  const auto other = run_command("pair", parse_config(j));
  const auto base = run_command("pair", cfg);
  CHECK(other.files.front().second != base.files.front().second);
}

TEST_CASE("command outputs") {
  const auto cfg = parse_config(golden_config());
  const auto h = run_command("homology", cfg);
  CHECK(std::fabs(h.results["class"][0].get<double>() - 1.0) <= 1e-9);
  CHECK(std::fabs(h.results["class"][1].get<double>() - 0.6180339887498949) <= 1e-9);
  const auto& csv = h.files.front();
  CHECK(csv.first == "homology.csv");
  CHECK(csv.second.rfind("component,value,quad_error\r\n", 0) == 0);

  const auto rat = parse_config(Json::parse(R"({
    "solenoid": {"transversal": {"kind": "circle"}, "map": {"kind": "rotation", "rational": [1, 3]}}})"));
  const auto b = run_command("build", rat);
  CHECK(b.results["minimal"] == false);

  const auto dy = parse_config(Json::parse(R"({
    "solenoid": {"transversal": {"kind": "cantor", "p": 2, "depth": 6}, "map": {"kind": "odometer", "p": 2}}})"));
  const auto bd = run_command("build", dy);
  CHECK(bd.results["transversal"] == "CantorSet");
  CHECK(bd.results["minimal"] == true);
  const auto er = run_command("ergodic", dy);
  CHECK(er.results["uniquely_ergodic"] == true);

  CHECK_THROWS_AS(run_command("nope", cfg), ConfigError);
}

TEST_CASE("csv formatting") {
  CHECK(csv_number(0.1) == "0.10000000000000001");
  CHECK(csv_number(-2.5) == "-2.5");
  CHECK(CsvWriter::quote("a,b") == "\"a,b\"");
  CHECK(CsvWriter::quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(CsvWriter::quote("plain") == "plain");
  CsvWriter w({"x", "y"});
  w.row({"1", "line\nbreak"});
  CHECK(w.str() == "x,y\r\n1,\"line\nbreak\"\r\n");
}

TEST_CASE("shipped configs reparse from their echo") {
  for (const auto& entry : std::filesystem::directory_iterator(MSOL_CONFIG_DIR)) {
    if (entry.path().extension() != ".json" || entry.path().stem() == "bad_p1") continue;
    CAPTURE(entry.path().string());
    std::ifstream in(entry.path());
    const auto cfg = parse_config(Json::parse(in));
    CHECK(parse_config(cfg.echo).echo.dump() == cfg.echo.dump());
  }
}
