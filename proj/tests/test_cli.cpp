#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "combasym/cli.hpp"
#include "test_util.hpp"

using namespace combasym;
using Json = nlohmann::json;

namespace {

struct Out {
  int status;
  std::string out, err;
  Json json() const { return Json::parse(out); }
};

Out cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int s = run(args, out, err);
  return {s, out.str(), err.str()};
}

std::string temp_spec(const std::string& name, const std::string& text) {
  std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << text;
  return path;
}

// every object carrying a number-like field has a certification tag
void expect_tagged(const Json& j, const std::string& where) {
  if (j.is_object()) {
    bool numeric = j.contains("re") || j.contains("value") || j.contains("lo");
    if (numeric) {
      ASSERT_TRUE(j.contains("cert")) << where;
      std::string c = j["cert"];
      EXPECT_TRUE(c == "exact" || c == "certified" || c == "heuristic") << where << " " << c;
    }
    for (const auto& [k, v] : j.items()) expect_tagged(v, where + "." + k);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) expect_tagged(j[i], where + "[" + std::to_string(i) + "]");
  } else if (j.is_number_float()) {
    ADD_FAILURE() << "untagged float at " << where;
  }
}

const Json& coord(const Json& j, const std::string& name) {
  for (const auto& c : j["coordinates"])
    if (c["name"] == name) return c;
  throw std::runtime_error("no coordinate " + name);
}

}  // namespace

TEST(Cli, CheckReportsSweepsAndComponents) {
  auto r = cli({"check", corpus("forest.spec"), "--json", "--no-timings"});
  ASSERT_EQ(r.status, 0) << r.err;
  auto j = r.json();
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["sweeps"], 6);
  EXPECT_EQ(j["trace"].back(), "[1, 2Z, Z, 1, Z, 1, Z, 1, Z, Z^3, Z, 1, Z, 1, Z, Z^2]");
  EXPECT_EQ(j["components"].size(), 5u);
  expect_tagged(j, "$");
}

TEST(Cli, NotWellFoundedExitsTwo) {
  auto r = cli({"check", corpus("badforest.spec"), "--json", "--no-timings"});
  EXPECT_EQ(r.status, 2);
  auto j = r.json();
  EXPECT_FALSE(j["well_founded"]);
  EXPECT_EQ(j["failing_equation"], "_N3 = Seq(T_g)");
  EXPECT_EQ(cli({"coeffs", corpus("badforest2.spec")}).status, 2);
}

TEST(Cli, ParseErrorExitsOne) {
  auto path = temp_spec("bad.spec", "A = Z + ;\n");
  auto r = cli({"coeffs", path, "--json"});
  EXPECT_EQ(r.status, 1);
  auto j = r.json();
  EXPECT_EQ(j["error"]["kind"], "parse");
  EXPECT_EQ(j["error"]["line"], 1);
  EXPECT_EQ(cli({"coeffs", corpus("forest.spec"), "--coord", "Q"}).status, 1);
  EXPECT_EQ(cli({"coeffs", corpus("forest.spec"), "--count", "0"}).status, 1);
  EXPECT_EQ(cli({"frobnicate", corpus("forest.spec")}).status, 1);
}

TEST(Cli, SuperpolynomialAsymptExitsThree) {
  auto path = temp_spec("exp.spec", "S = Set(Z*Seq(Z));\n");
  EXPECT_EQ(cli({"asympt", path}).status, 3);
  // the other commands still report
  EXPECT_EQ(cli({"expand", path}).status, 0);
}

TEST(Cli, CoeffsExact) {
  auto r = cli({"coeffs", corpus("forest.spec"), "--count", "11", "--coord", "F", "--json", "--no-timings"});
  ASSERT_EQ(r.status, 0) << r.err;
  auto j = r.json();
  EXPECT_EQ(coord(j, "F")["egf"][10], "5767537729/14175");
  EXPECT_EQ(coord(j, "F")["counts"][10], "1476489658624");
}

TEST(Cli, RadiusIntervalAndSystem) {
  auto r = cli({"radius", corpus("forest.spec"), "--digits", "10", "--json", "--no-timings"});
  ASSERT_EQ(r.status, 0) << r.err;
  auto j = r.json();
  expect_tagged(j, "$");
  const auto& rad = coord(j, "T_r")["radius"];
  EXPECT_EQ(rad["cert"], "certified");
  EXPECT_EQ(rad["radix"], 10);
  double lo = std::stod(rad["lo"].get<std::string>()), hi = std::stod(rad["hi"].get<std::string>());
  EXPECT_LE(lo, 0.1703917);
  EXPECT_GE(hi, 0.1703916);
  EXPECT_LT(hi - lo, 1e-10);
  int c = coord(j, "T_r")["component"];
  EXPECT_TRUE(j["components"][c]["radius"].contains("system"));
  EXPECT_NE(cli({"radius", corpus("forest.spec"), "--digits", "10"}).out.find("ρ_T_r ≈ 0.1703916"), std::string::npos);
}

TEST(Cli, ArgumentsAreTurns) {
  auto r = cli({"singularities", corpus("four_singularities.spec"), "--json", "--no-timings"});
  ASSERT_EQ(r.status, 0) << r.err;
  auto j = r.json();
  EXPECT_EQ(j["args"]["turns"], Json({"0", "1/4", "1/2", "3/4"}));
  expect_tagged(j, "$");
}

TEST(Cli, ExpandIsTagged) {
  auto r = cli({"expand", corpus("forest.spec"), "--order", "6", "--json", "--no-timings"});
  ASSERT_EQ(r.status, 0) << r.err;
  auto j = r.json();
  expect_tagged(j, "$");
  const auto& s = j["singularities"][0];
  EXPECT_EQ(s["arg"], "0");
  const Json* f = nullptr;
  for (const auto& c : s["coordinates"])
    if (c["name"] == "F") f = &c;
  ASSERT_NE(f, nullptr);
  EXPECT_EQ((*f)["terms"][1]["exponent"]["value"], "1/2");
  EXPECT_NEAR(std::stod((*f)["terms"][1]["coef"]["re"].get<std::string>()), -0.892560, 2e-6);
}

TEST(Cli, AsymptTableAtTen) {
  auto r = cli({"asympt", corpus("forest.spec"), "--terms", "3", "--eval", "10", "--json", "--no-timings"});
  ASSERT_EQ(r.status, 0) << r.err;
  auto j = r.json();
  expect_tagged(j, "$");
  const auto& e = coord(j, "F")["eval"][0];
  EXPECT_EQ(e["exact"]["value"], "5767537729/14175");
  EXPECT_EQ(std::stol(e["exact"]["decimal"].get<std::string>()), 406880);
  EXPECT_EQ(e["stirling"][2]["orders"], 3);
  EXPECT_EQ(std::stol(e["stirling"][2]["re"].get<std::string>()), 405060);
}

TEST(Cli, JsonIsDeterministic) {
  std::vector<std::string> args{"asympt", corpus("set_cyc4.spec"), "--eval", "20,21", "--json", "--no-timings"};
  auto a = cli(args), b = cli(args);
  ASSERT_EQ(a.status, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_FALSE(a.json().contains("timings_ms"));
  args.pop_back();
  EXPECT_TRUE(cli(args).json().contains("timings_ms"));
}

TEST(Cli, PrecisionFromEnvironmentAndFlag) {
  setenv("COMBASYM_PREC", "128", 1);
  auto a = cli({"singularities", corpus("catalan.spec"), "--json", "--no-timings"}).json();
  auto b = cli({"singularities", corpus("catalan.spec"), "--json", "--no-timings", "--precision", "192"}).json();
  unsetenv("COMBASYM_PREC");
  EXPECT_EQ(a["precision"]["bits"], 128);
  EXPECT_EQ(b["precision"]["bits"], 192);
  auto c = cli({"singularities", corpus("catalan.spec"), "--json", "--oracle-digits", "40"}).json();
  EXPECT_EQ(c["precision"]["oracle_digits"], 40);
}

TEST(Cli, DirectedDecimalRounding) {
  PrecisionScope p(256);
  Real third = Real(1) / 3;
  EXPECT_EQ(decimal(third, 5, -1), "0.33333");
  EXPECT_EQ(decimal(third, 5, 1), "0.33334");
  EXPECT_EQ(decimal(-third, 5, -1), "-0.33334");
  EXPECT_EQ(decimal(Real(1234567), 3, 1), "1.24e6");
  EXPECT_EQ(decimal(Real(25), 4), "25.00");
}
