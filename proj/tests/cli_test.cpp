#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "gdl/cli/cli.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args, const std::string& input = {}) {
  std::istringstream in(input);
  std::ostringstream out;
  std::ostringstream err;
  const int code = gdl::cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("gdl_cli_test_" + name); }

bool finite_json(const json& j) {
  if (j.is_number_float()) return std::isfinite(j.get<double>());
  if (j.is_structured()) {
    for (const auto& v : j) {
      if (!finite_json(v)) return false;
    }
  }
  return true;
}

// Reports are JSON; CSV cells are checked one by one.
bool all_finite(const std::string& text) {
  if (!text.empty() && text.front() == '{') return finite_json(json::parse(text));
  std::istringstream rows(text);
  std::string row;
  std::getline(rows, row);
  while (std::getline(rows, row)) {
    std::istringstream cells(row);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      if (cell == "inf" || cell == "-inf" || cell == "nan" || cell == "-nan") return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("integral report") {
  const auto r = run({"integral"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["schema"] == "gdl-1");
  CHECK(j["command"] == "integral");
  CHECK(j["result"]["target"] == "3*pi/2");
  CHECK(j["result"]["value"].get<double>() == doctest::Approx(1.5 * std::numbers::pi).epsilon(1e-12));
  CHECK(j["result"]["abs_err"].get<double>() < 1e-8);
  CHECK(j["config"].contains("seed"));
}

TEST_CASE("tau-bound exit codes") {
  CHECK(run({"verify", "tau-bound", "--upper", "2", "--lower", "0.7"}).code == 1);
  CHECK(run({"verify", "tau-bound", "--upper", "2", "--lower", "0.5"}).code == 0);
  CHECK(run({"verify", "tau-bound", "--upper", "3", "--lower", "0"}).code == 1);
  CHECK(run({"verify", "tau-bound", "--upper", "2"}).code == 2);
}

TEST_CASE("lattice to density pipeline") {
  const auto lat = run({"construct", "lattice", "--spacing", "1", "--radius", "20"});
  REQUIRE(lat.code == 0);
  const auto den = run({"density", "--window", "10,20"}, lat.out);
  REQUIRE(den.code == 0);
  const auto j = json::parse(den.out);
  CHECK(j["result"]["upper"].get<double>() == doctest::Approx(1.0).epsilon(0.05));
  CHECK(j["result"]["lower"].get<double>() == doctest::Approx(1.0).epsilon(0.05));
  CHECK(j["config"]["window"] == "10,20");
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"construct"}).code == 2);
  CHECK(run({"integral", "--tol", "abc"}).code == 2);
  const auto bad = run({"construct", "theorem4a", "--beta", "1.5"});
  CHECK(bad.code == 2);
  CHECK_FALSE(bad.err.empty());
  CHECK(run({"density", "--window", "20,10"}, "log_r,phi\n0,0\n").code == 2);
  CHECK(run({"density"}, "not a csv").code == 2);
  CHECK(run({"jensen", "--config", temp_file("missing.json").string()}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("config file with flag override") {
  const auto path = temp_file("cfg.json");
  {
    std::ofstream f(path);
    f << R"({"beta": 0.25, "seed": 5})";
  }
  const auto from_file = json::parse(run({"construct", "theorem4a", "--config", path.string()}).out);
  CHECK(from_file["config"]["beta"] == 0.25);
  CHECK(from_file["config"]["seed"] == 5);
  const auto flagged = json::parse(run({"construct", "theorem4a", "--config", path.string(), "--beta", "0.75"}).out);
  CHECK(flagged["config"]["beta"] == 0.75);
  CHECK(flagged["config"]["seed"] == 5);
  CHECK(flagged["result"]["a_squared"].get<double>() == doctest::Approx(1.786273).epsilon(1e-6));

  {
    std::ofstream f(path);
    f << R"({"beta": "half"})";
  }
  CHECK(run({"construct", "theorem4a", "--config", path.string()}).code == 2);
  fs::remove(path);
}

TEST_CASE("reports are deterministic and finite") {
  const std::vector<std::vector<std::string>> commands{
      {"construct", "theorem4a", "--beta", "0"},
      {"verify", "radial", "--beta", "0.5"},
      {"jensen", "--random", "50", "--seed", "3"},
      {"gram", "--lattice", "1,2", "--degree", "5", "--minimality"},
      {"plot-annulus", "--grid", "16x16"},
      {"bargmann", "--signal", "shifted", "--t0", "0.5", "--w0", "-0.5"},
  };
  for (const auto& c : commands) {
    const auto a = run(c);
    const auto b = run(c);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
    CHECK(all_finite(a.out));
  }
}

TEST_CASE("parallel settings do not change outputs") {
  const auto one = run({"construct", "atomize", "--beta", "0.5", "--window", "0,150", "--seed", "9", "--threads", "1"});
  const auto three = run({"construct", "atomize", "--beta", "0.5", "--window", "0,150", "--seed", "9", "--threads", "3"});
  REQUIRE(one.code == 0);
  CHECK(one.out == three.out);
  const auto g1 = run({"gram", "--lattice", "1,3", "--threads", "1"});
  const auto g4 = run({"gram", "--lattice", "1,3", "--threads", "4"});
  CHECK(g1.out == g4.out);
}

TEST_CASE("verify radial reports every property") {
  const auto r = run({"verify", "radial", "--beta", "0.5"});
  const auto j = json::parse(r.out);
  for (const char* key : {"H_nonnegative", "deficiency_convex", "property_i", "property_ii", "property_iii",
                          "property_iv"}) {
    CHECK(j["result"].contains(key));
  }
  CHECK(r.code == (j["result"]["pass"].get<bool>() ? 0 : 1));
  CHECK(j["result"]["property_iv"]["pass"] == true);
}

TEST_CASE("bulk commands write data to --out and the report to --report") {
  const auto data = temp_file("plot.csv");
  const auto report = temp_file("plot.json");
  const auto r = run({"plot-annulus", "--grid", "8x4", "--out", data.string(), "--report", report.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream csv(data);
  std::string header;
  std::getline(csv, header);
  CHECK(header == "log_r,phi,region_kind,g");
  std::ifstream rep(report);
  const auto j = json::parse(rep);
  CHECK(j["result"]["rows"] == 32);
  fs::remove(data);
  fs::remove(report);
}

TEST_CASE("jensen from a point set file and growth CSV") {
  const auto zeros = run({"construct", "circlepack", "--log-radii", "0,1", "--counts", "3,5"});
  REQUIRE(zeros.code == 0);
  const auto j = run({"jensen", "--r", "4"}, zeros.out);
  CHECK(j.code == 0);
  CHECK(json::parse(j.out)["result"]["zeros"] == 8);

  const auto g = run({"growth", "--C", "0.3", "--R", "5,8", "--terms-factor", "64"});
  REQUIRE(g.code == 0);
  CHECK(g.out.rfind("R,slope,tail_bound\n", 0) == 0);
}
