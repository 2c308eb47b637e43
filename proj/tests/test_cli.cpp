#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dirac/cli.hpp"
#include "dirac/poly_algebra.hpp"
#include "json.hpp"

using namespace dirac;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

bool contains(const std::string& s, const std::string& needle) { return s.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("analyze model A") {
  const auto r = run({"analyze", "--model", "a", "--radius", "2"});
  REQUIRE(r.code == 0);
  CHECK(contains(r.out, "{q2,p1}_D = -q1/q2"));
  CHECK(contains(r.out, "{q1,q2}_D = -p1/q2"));
  CHECK(contains(r.out, "{q1,p1}_D = 1"));
  CHECK(contains(r.err, "second-class"));
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["multipliers"]["v2"] == "0");
  CHECK(j["constraints"][0]["expression"] == "p2");
}

TEST_CASE("analyze model B lists its constraints") {
  const auto r = run({"analyze", "--model", "b", "--radius", "2"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["constraints"][0]["expression"] == "p2");
  // The reported secondary agrees with q1^2 - q2^2 + p1^2 + p2^2 - 4 once p2 = 0.
  const auto chi2 = parse_observable(j["constraints"][1]["expression_at_radius"].get<std::string>());
  const auto printed = parse_observable("q1^2 - q2^2 + p1^2 + p2^2 - 4");
  CHECK((printed - chi2) == parse_observable("p2^2"));
}

TEST_CASE("analyze output is deterministic and round-trips") {
  const auto a = run({"analyze", "--model", "a", "--seed", "7"});
  const auto b = run({"analyze", "--model", "a", "--seed", "7"});
  CHECK(a.out == b.out);
  const auto j = nlohmann::json::parse(a.out);
  for (const auto& row : j["c_matrix"]) {
    for (const auto& e : row) {
      const auto s = e.get<std::string>();
      CHECK(parse_observable(s).to_string() == s);
    }
  }
  CHECK(j["c_matrix"] == nlohmann::json::parse(j.dump())["c_matrix"]);
}

TEST_CASE("validation failures exit with 2") {
  CHECK(run({"analyze", "--radius", "-1"}).code == 2);
  CHECK(run({"analyze", "--model", "c"}).code == 2);
  CHECK(run({"analyze", "--radius", "abc"}).code == 2);
  CHECK(run({"reduce", "--branch", "x"}).code == 2);
  CHECK(run({"simulate", "--dt", "0"}).code == 2);
  CHECK(run({"simulate", "--q0", "1.9", "--p0", "0.9", "--radius", "2"}).code == 2);
  CHECK(run({"quantize", "--hbar", "-1"}).code == 2);
  CHECK(run({"quantize", "--basis", "grid", "--grid-points", "8"}).code == 2);
  CHECK(run({"quantize", "--output", "xml"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("reduce reports domain and sign") {
  const auto a = run({"reduce", "--model", "a"});
  REQUIRE(a.code == 0);
  CHECK(contains(a.out, "domain: q^2 + p^2 < R^2"));
  CHECK(contains(a.out, "sign note"));
  CHECK(contains(a.out, "open disc of radius R"));
  const auto b = run({"reduce", "--model", "b"});
  REQUIRE(b.code == 0);
  CHECK(contains(b.out, "domain: q^2 + p^2 > R^2"));
  CHECK_FALSE(contains(b.out, "sign note"));
  CHECK(contains(b.out, "plane with a hole of radius R"));
  const auto j = nlohmann::json::parse(run({"reduce", "--model", "a", "--output", "json"}).out);
  CHECK(j["sign_discrepancy"] == true);
}

TEST_CASE("simulate writes CSV and a phase portrait") {
  const auto svg = (std::filesystem::temp_directory_path() / "dirac_cli_test.svg").string();
  const auto r = run({"simulate", "--model", "a", "--q0", "1", "--p0", "0", "--tmax", "6.283185307179586", "--plot",
                      svg});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("t,q,p,H,margin\n0,1,0,", 0) == 0);
  std::ifstream in(svg);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(contains(ss.str(), "<circle"));
  CHECK(contains(ss.str(), "<polyline"));
  std::filesystem::remove(svg);

  const auto again = run({"simulate", "--model", "a", "--tmax", "0.5"});
  CHECK(again.out == run({"simulate", "--model", "a", "--tmax", "0.5"}).out);
}

TEST_CASE("simulate compare-full appends the divergence") {
  const auto r = run({"simulate", "--model", "a", "--tmax", "5", "--compare-full"});
  REQUIRE(r.code == 0);
  const auto pos = r.out.find("# max_divergence,");
  REQUIRE(pos != std::string::npos);
  const double d = std::stod(r.out.substr(pos + 17));
  CHECK(d < 1e-6);
}

TEST_CASE("simulate domain exit exits with 4 and keeps the partial CSV") {
  const auto r = run({"simulate", "--model", "a", "--q0", "1.99", "--dt", "0.5", "--tmax", "10"});
  CHECK(r.code == 4);
  CHECK(r.out.rfind("t,q,p,H,margin\n", 0) == 0);
  CHECK(contains(r.err, "domain exit"));
}

TEST_CASE("quantize examples") {
  auto r = run({"quantize", "--model", "a", "--radius", "2", "--basis", "number", "--nmax", "10"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["physical_dimension"] == 2);
  CHECK(j["eigenvalues"][0].get<double>() == doctest::Approx(3.464102).epsilon(1e-6));
  CHECK(j["eigenvalues"][1].get<double>() == doctest::Approx(0.666667).epsilon(1e-6));

  r = run({"quantize", "--model", "a", "--radius", "0.5"});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["physical_dimension"] == 0);

  r = run({"quantize", "--model", "a", "--basis", "grid", "--grid-points", "400"});
  REQUIRE(r.code == 0);
  j = nlohmann::json::parse(r.out);
  CHECK(j["basis"]["kind"] == "grid");
  CHECK(j["physical_dimension"].get<int>() > 0);

  r = run({"quantize", "--model", "b", "--output", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("index,eigenvalue,constraint_eigenvalue\n", 0) == 0);
}

TEST_CASE("quantize convergence study") {
  const auto r = run({"quantize", "--model", "a", "--study", "--output", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("h,E1,E2,err1,err2,change1,change2,points\n", 0) == 0);
}
